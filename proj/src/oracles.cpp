#include "ctmc/oracles.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "ctmc/errors.hpp"

namespace ctmc {

namespace {

constexpr double kPoissonTailTol = 1e-14;
constexpr double kMaxSeriesRate = 64.0;  // largest μ·t handled by one series

void renormalize_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) sum += m(i, j);
    if (sum <= 0.0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= sum;
  }
}

double uniformization_rate(const IntensityMatrix& b) {
  double mu = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) mu = std::max(mu, -b.b(i, i));
  return mu;
}

/// One uniformization series segment, valid for moderate μ·t. All terms are
/// nonnegative, so there is no cancellation; the truncated sum is divided by
/// the accumulated Poisson mass to restore exact stochasticity.
Matrix uniformized_series(const IntensityMatrix& b, double t, double mu) {
  const std::size_t n = b.size();
  Matrix jump(n, n, 0.0);  // B/μ + I, entrywise nonnegative and stochastic
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) jump(i, j) = b.b(i, j) / mu + (i == j ? 1.0 : 0.0);

  const double rate = mu * t;
  double weight = std::exp(-rate);
  double mass = weight;
  Matrix power = Matrix::identity(n);
  Matrix sum = power;
  sum *= weight;

  // Poisson mass above rate + 60·sqrt(rate) + 80 is far below any useful
  // tolerance; the k cap only guards against round-off stalling `mass`.
  const std::size_t k_max =
      static_cast<std::size_t>(rate + 60.0 * std::sqrt(rate + 1.0) + 80.0);
  for (std::size_t k = 1; 1.0 - mass > kPoissonTailTol && k <= k_max; ++k) {
    power = matmul(power, jump);
    weight *= rate / static_cast<double>(k);
    sum.add_scaled(power, weight);
    mass += weight;
  }

  sum *= 1.0 / mass;
  renormalize_rows(sum);
  return sum;
}

struct TrajectoryRng {
  std::uint64_t state;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  TrajectoryRng(std::uint64_t seed, std::uint64_t start, std::uint64_t trajectory) {
    state = mix(mix(mix(seed) ^ (start + 0x9e3779b97f4a7c15ull)) ^
                (trajectory + 0xbf58476d1ce4e5b9ull));
  }

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1], safe as a log argument.
  double u01() { return 1.0 - static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::size_t sample_jump(TrajectoryRng& rng, const Matrix& q, std::size_t state) {
  const double u = rng.u01();
  double cum = 0.0;
  std::size_t last = state;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    const double p = q(state, j);
    if (p <= 0.0) continue;
    cum += p;
    last = j;
    if (u <= cum) return j;
  }
  return last;  // round-off shortfall in the cumulative row
}

}  // namespace

Matrix transition_matrix(const IntensityMatrix& b, double t) {
  if (t < 0.0) {
    throw DomainError("transition_matrix: time must be >= 0, got " + std::to_string(t));
  }
  const double mu = uniformization_rate(b);
  if (t == 0.0 || mu == 0.0) return Matrix::identity(b.size());

  int squarings = 0;
  double tau = t;
  while (mu * tau > kMaxSeriesRate) {
    tau *= 0.5;
    ++squarings;
  }

  Matrix e = uniformized_series(b, tau, mu);
  for (int s = 0; s < squarings; ++s) {
    e = matmul(e, e);
    renormalize_rows(e);
  }
  return e;
}

HorizonEstimate adaptive_horizon_detail(const IntensityMatrix& b, double tol, double cap) {
  if (tol <= 0.0) throw DomainError("adaptive_horizon: tolerance must be > 0");

  Matrix e = transition_matrix(b, 1.0);
  double t = 1.0;
  std::vector<std::pair<double, double>> differences;  // (t, ‖exp(2tB) − exp(tB)‖max)

  double t_star = 0.0;
  for (;;) {
    Matrix doubled = matmul(e, e);
    renormalize_rows(doubled);
    const double diff = max_abs_diff(doubled, e);
    differences.emplace_back(t, diff);
    if (diff <= tol) {
      t_star = t;
      break;
    }
    if (2.0 * t > cap) {
      throw ConvergenceError("adaptive_horizon: no convergence up to t = " + std::to_string(t) +
                             " (cap " + std::to_string(cap) +
                             "); the spectral gap is near-degenerate");
    }
    t *= 2.0;
    e = std::move(doubled);
  }

  // The differences decay like e^{−gap·t}; consecutive pairs at t and 2t give
  // gap ≈ ln(d(t)/d(2t))/t. Pairs near the round-off floor or before the
  // asymptotic regime are ignored, and the smallest estimate is kept.
  double gap = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k + 1 < differences.size(); ++k) {
    const auto [tk, dk] = differences[k];
    const auto [tn, dn] = differences[k + 1];
    if (dk < 1e-12 || dk > 0.5 || dn < 1e-12 || dn >= dk) continue;
    const double estimate = std::log(dk / dn) / tk;
    if (!(estimate > 0.0)) continue;
    if (std::isnan(gap) || estimate < gap) gap = estimate;
  }
  return HorizonEstimate{t_star, gap};
}

double adaptive_horizon(const IntensityMatrix& b, double tol, double cap) {
  return adaptive_horizon_detail(b, tol, cap).t_star;
}

Matrix resolvent(const IntensityMatrix& b, double z) {
  if (!(z > 0.0)) {
    throw DomainError("resolvent: z must be > 0, got " + std::to_string(z));
  }
  const std::size_t n = b.size();
  Matrix shifted(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) shifted(i, j) = (i == j ? z : 0.0) - b.b(i, j);

  const LuFactorization factors = lu_factor(shifted);
  if (factors.singular) {
    throw SingularMatrixError("resolvent: zI - B is numerically singular at z = " +
                              std::to_string(z) + "; the input cannot be a valid intensity matrix");
  }
  return solve(factors, Matrix::identity(n) * z);
}

SimulationResult simulate(const IntensityMatrix& b, double horizon, std::size_t trajectories,
                          std::uint64_t seed) {
  if (horizon < 0.0) throw DomainError("simulate: horizon must be >= 0");
  if (trajectories == 0) throw DomainError("simulate: need at least one trajectory");

  const std::size_t n = b.size();
  const EmbeddedChain chain = embedded_chain(b);
  Matrix counts(n, n, 0.0);

  auto run_start = [&](std::size_t start) {
    for (std::size_t traj = 0; traj < trajectories; ++traj) {
      TrajectoryRng rng(seed, start, traj);
      std::size_t state = start;
      double remaining = horizon;
      while (!chain.zero_rate_mask[state]) {
        const double dwell = -std::log(rng.u01()) / chain.d[state];
        if (dwell >= remaining) break;
        remaining -= dwell;
        state = sample_jump(rng, chain.q, state);
      }
      counts(start, state) += 1.0;
    }
  };

  // Start states write disjoint rows, so fanning them out is race-free, and
  // the per-trajectory streams make the outcome schedule-independent.
  const std::size_t workers = std::min<std::size_t>(
      n, std::max<std::size_t>(1, std::thread::hardware_concurrency()));
  if (workers <= 1 || n == 1) {
    for (std::size_t start = 0; start < n; ++start) run_start(start);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t start = w; start < n; start += workers) run_start(start);
      });
    }
    for (auto& th : pool) th.join();
  }

  SimulationResult result{counts, counts, trajectories, horizon, seed};
  const double scale = 1.0 / static_cast<double>(trajectories);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) result.empirical(i, j) = counts(i, j) * scale;
  return result;
}

}  // namespace ctmc
