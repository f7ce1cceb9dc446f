#pragma once

#include <cstddef>
#include <vector>

#include "ctmc/chain.hpp"
#include "ctmc/matrix.hpp"

namespace ctmc {

/// Stationary distribution of one recurrence class, embedded into a
/// full-length row vector: strictly positive on the class, zero elsewhere,
/// entries summing to 1.
struct StationaryVector {
  std::size_t class_id;
  std::vector<double> p;
};

/// Entry probabilities from transient states into each recurrence class:
/// f[t][c] is the probability that the chain started in transient_states[t]
/// is eventually absorbed into class c. Empty when there are no transient
/// states.
struct AbsorptionTable {
  std::vector<std::size_t> transient_states;
  std::vector<std::vector<double>> f;

  bool empty() const { return transient_states.empty(); }
};

/// The limit of the transition matrix for large times, with the block
/// structure it was assembled from. Rows within a class are identical copies
/// of that class's stationary vector; transient rows are absorption-weighted
/// mixtures; transient columns are zero.
struct FinalLimit {
  Matrix p;
  ClassStructure structure;
  std::vector<StationaryVector> stationary;  // one per class, in class order
  AbsorptionTable absorption;
};

/// Left null vector of B_J normalized to sum 1 and embedded into a
/// full-length vector. Throws NumericalError when a coordinate comes out
/// non-positive (the theory guarantees positivity, so that signals a
/// conditioning failure or broken classification).
StationaryVector stationary_distribution(const IntensityMatrix& b, const ClassStructure& s,
                                         std::size_t class_id);

/// Absorption probabilities from each transient state into the given class,
/// ordered like s.transient. Solves B_T·f = −B_{T,J}·1 by LU (B_T is never
/// inverted explicitly). Entries in [−1e−12, 0) are clamped to 0; anything
/// more negative, or above 1 + 1e−12, raises NumericalError instead of being
/// silently repaired.
std::vector<double> absorption_vector(const IntensityMatrix& b, const ClassStructure& s,
                                      std::size_t class_id);

/// Assembles the full limit matrix: classify, one stationary vector per
/// class, one absorption solve per class when transient states exist, then
/// p_ij = f_{i,J}·p_jj for transient rows. Verifies the structural
/// invariants before returning.
FinalLimit final_limit(const IntensityMatrix& b);

/// Structural invariant check (stochasticity, zero transient block and
/// columns, idempotence, annihilation by B, identical class rows, absorption
/// row sums). Throws NumericalError naming the first violated invariant.
void verify_final_limit(const FinalLimit& limit, const IntensityMatrix& b);

}  // namespace ctmc
