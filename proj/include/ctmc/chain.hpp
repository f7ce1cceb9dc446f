#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmc/matrix.hpp"

namespace ctmc {

/// A validated right intensity matrix: off-diagonal entries are >= 0 exactly
/// and every row sums to exactly 0 (the diagonal is re-projected during
/// validation). Treat as immutable once built.
struct IntensityMatrix {
  Matrix b;
  std::vector<std::string> labels;  // empty, or one unique name per state

  std::size_t size() const { return b.rows(); }
};

/// Checks that `raw` is square, its off-diagonals are >= -tol and its row
/// sums vanish within tol·n·‖raw‖max, then clamps round-off negatives to 0
/// and recomputes each diagonal entry as the negated off-diagonal row sum so
/// downstream identities hold exactly. Throws ValidationError / ShapeError.
IntensityMatrix validate(const Matrix& raw, double tol = 1e-9);

/// Jump-chain decomposition B = D·Q − D. Holding rates d_i = −b_ii, with the
/// convention d_i = 1 and q_ii = 1 for states with b_ii = 0 (absorbing).
struct EmbeddedChain {
  std::vector<double> d;
  Matrix q;
  std::vector<std::uint8_t> zero_rate_mask;  // 1 where b_ii == 0
};

EmbeddedChain embedded_chain(const IntensityMatrix& b);

/// Square boolean matrix used for reachability computations.
class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { cells_[i * n_ + j] = v ? 1 : 0; }

  bool operator==(const BoolMatrix& other) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> cells_;
};

/// Transitive closure of the strict (path length >= 1) reachability relation,
/// in boolean arithmetic. Matches the nonzero pattern of A + A² + … off the
/// diagonal; diagonal entries are true exactly when the index lies on a cycle.
BoolMatrix reachability_closure(const BoolMatrix& adjacency);

/// Adjacency of the off-diagonal positivity graph: edge i→j iff i≠j and
/// b_ij > 0.
BoolMatrix positive_offdiagonal_graph(const IntensityMatrix& b);

/// Partition of the index set into recurrence classes (closed communicating
/// classes, each B_J irreducible) and the transient remainder.
struct ClassStructure {
  static constexpr int kTransient = -1;

  std::vector<std::vector<std::size_t>> classes;  // ordered by smallest member
  std::vector<std::size_t> transient;             // ascending
  std::vector<int> class_of;                      // class index or kTransient

  std::size_t size() const { return class_of.size(); }
};

ClassStructure classify_states(const IntensityMatrix& b);

}  // namespace ctmc
