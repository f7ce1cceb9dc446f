#pragma once

// Shared test support: a deterministic random-matrix corpus with planted
// class structure, plus the independent oracles the tests check against
// (boolean power-sum classification, naive matrix product, closed-form
// two-state exponentials). Everything here is test-only code and must stay
// independent of the implementation paths it is used to check.

#include <cstdint>
#include <vector>

#include "ctmc/chain.hpp"
#include "ctmc/matrix.hpp"

namespace testsupport {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

  std::size_t uniform_index(std::size_t count) { return next() % count; }

  bool chance(double p) { return uniform(0.0, 1.0) < p; }
};

/// Random right intensity matrix with 1–4 planted closed classes plus 0–10
/// transient states, rates uniform in [0.1, 10], state order shuffled.
ctmc::IntensityMatrix random_intensity(std::uint64_t seed);

/// Variant with the dimension capped (still >= 2): small chains for
/// simulation tests.
ctmc::IntensityMatrix random_intensity_capped(std::uint64_t seed, std::size_t max_states);

/// Random digraph adjacency without self-loops, edge probability `p`.
ctmc::BoolMatrix random_digraph(std::uint64_t seed, std::size_t n, double p);

/// Intensity matrix with rate 1 on every edge of the digraph.
ctmc::IntensityMatrix intensity_from_digraph(const ctmc::BoolMatrix& adj);

struct OracleClasses {
  std::vector<std::vector<std::size_t>> classes;  // ordered by smallest member
  std::vector<std::size_t> transient;             // ascending
};

/// Classification by the power-sum method: C = A + A² + … + A^{n-1} in exact
/// boolean arithmetic, i and j communicate iff c_ij and c_ji are set, and a
/// communicating class is recurrent iff no edge leaves it.
OracleClasses classify_by_power_sums(const ctmc::BoolMatrix& adj);

/// Plain triple-loop product, the reference for matmul.
ctmc::Matrix naive_matmul(const ctmc::Matrix& a, const ctmc::Matrix& b);

/// Closed form exp(t·[[-a, a], [b, -b]]) for a + b > 0.
ctmc::Matrix two_state_exponential(double a, double b, double t);

}  // namespace testsupport
