#pragma once

#include <cstdint>
#include <vector>

#include "ctmc/chain.hpp"
#include "ctmc/matrix.hpp"

namespace ctmc {

/// exp(t·B) by uniformization: with μ = max_i(−b_ii) the series
/// e^{−μt}·Σ (μt)^k/k!·(B/μ + I)^k has only nonnegative terms and is
/// truncated once the Poisson tail mass drops below 1e−14. Large μt is
/// reduced by halving t and squaring the result. μ = 0 or t = 0 give the
/// identity. Rows are renormalized to sum exactly to 1; all entries >= 0.
/// Throws DomainError for t < 0.
Matrix transition_matrix(const IntensityMatrix& b, double t);

struct HorizonEstimate {
  double t_star;
  /// Decay-rate estimate from the doubling differences; NaN when no pair of
  /// differences fell in a trustworthy range (already converged, or B = O).
  double gap_estimate;
};

/// Smallest power-of-two time t* (doubling from 1) with
/// ‖exp(2t*B) − exp(t*B)‖max <= tol. exp(t*B) then serves as the large-t
/// proxy for the final limit. Throws ConvergenceError when t* would exceed
/// `cap` (signals a near-degenerate spectral gap).
HorizonEstimate adaptive_horizon_detail(const IntensityMatrix& b, double tol = 1e-10,
                                        double cap = 1048576.0);

double adaptive_horizon(const IntensityMatrix& b, double tol = 1e-10, double cap = 1048576.0);

/// z·(zI − B)^{-1} for z > 0 via one LU solve against z·I. Stochastic up to
/// round-off and converges to the final limit as z → 0+. Throws DomainError
/// for z <= 0 and SingularMatrixError if zI − B is numerically singular
/// (which cannot happen for a valid intensity matrix).
Matrix resolvent(const IntensityMatrix& b, double z);

/// Monte Carlo estimate of exp(horizon·B): per start state, `trajectories`
/// independent jump-process paths (exponential holding times with rate d_i,
/// jumps by the embedded chain Q, states with b_ii = 0 absorb), recording the
/// occupied state at the horizon.
struct SimulationResult {
  Matrix empirical;  // row per start state, visit frequencies at the horizon
  Matrix counts;     // raw trajectory counts (integers, stored exactly)
  std::size_t trajectories_per_start;
  double horizon;
  std::uint64_t seed;
};

/// Deterministic given the seed: every trajectory draws from its own stream
/// keyed by (seed, start, trajectory index), so results are independent of
/// scheduling and identical to sequential execution.
SimulationResult simulate(const IntensityMatrix& b, double horizon, std::size_t trajectories,
                          std::uint64_t seed);

}  // namespace ctmc
