#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ctmc {

/// Dense row-major real matrix. This is the whole linear algebra kernel the
/// rest of the library runs on; matrices here are small and dense by
/// assumption. Instances are value types and never mutated by the free
/// functions below, so sharing across threads is safe.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;

  /// this += s * other (shapes must match).
  void add_scaled(const Matrix& other, double s);

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Standard product; throws ShapeError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

double max_abs(const Matrix& a);                          // ‖A‖max
double max_abs_diff(const Matrix& a, const Matrix& b);    // ‖A − B‖max
double inf_norm(const Matrix& a);                         // max absolute row sum
bool all_finite(const Matrix& a);

/// Submatrix by index sets (gather); states are never physically permuted
/// anywhere in the library, block operations always go through here.
Matrix gather(const Matrix& a, const std::vector<std::size_t>& row_ids,
              const std::vector<std::size_t>& col_ids);

/// PA = LU with partial pivoting, packed in one matrix: strictly lower part
/// holds the L multipliers (unit diagonal implicit), upper part holds U.
/// Row k of `packed` came from input row `perm[k]`.
struct LuFactorization {
  std::vector<std::size_t> perm;
  Matrix packed;
  bool singular = false;
  double rcond_estimate = 0.0;  // crude: min|u_kk| / max|u_kk|

  std::size_t size() const { return perm.size(); }
};

/// Factors a square matrix. Singularity is reported through the flag, not
/// thrown, so callers decide how to react. A pivot counts as singular when
/// its magnitude is <= pivot_tol times the magnitude of its original row.
LuFactorization lu_factor(const Matrix& a, double pivot_tol = 1e-12);

/// Solves A·X = rhs (rhs may have several columns). Throws
/// SingularMatrixError when the factorization is flagged singular.
Matrix solve(const LuFactorization& f, const Matrix& rhs);

Matrix inverse(const Matrix& a);

/// Nonzero row vector x with x·A ≈ 0, scaled so that Σx_j = 1. Callers must
/// guarantee nullity exactly 1. Solves the transposed system with one
/// equation replaced by the normalization constraint, trying replacement
/// positions in pivot-quality order (weakest diagonal first); a candidate is
/// accepted once ‖x·A‖∞ <= tol·‖A‖∞·‖x‖∞. Throws DegenerateNullSpaceError
/// when every replacement fails.
std::vector<double> left_null_vector(const Matrix& a, double tol = 1e-9);

}  // namespace ctmc
