#include "ctmc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctmc/errors.hpp"

namespace ctmc {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes differ, " + shape_str(a.rows(), a.cols()) +
                     " vs " + shape_str(b.rows(), b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be at least 1x1, got " + shape_str(rows, cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) {
    throw ShapeError("matrix literal must have at least one row and one column");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("ragged matrix literal: row with " + std::to_string(r.size()) +
                       " entries, expected " + std::to_string(cols_));
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void Matrix::add_scaled(const Matrix& other, double s) {
  require_same_shape(*this, other, "add_scaled");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * other.data_[k];
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + shape_str(a.rows(), a.cols()) +
                     " * " + shape_str(b.rows(), b.cols()));
  }
  Matrix c(a.rows(), b.cols(), 0.0);
  // i-k-j order keeps the inner loop contiguous in both b and c.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row_ptr(i);
    double* crow = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

double inf_norm(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double x) { return std::isfinite(x); });
}

Matrix gather(const Matrix& a, const std::vector<std::size_t>& row_ids,
              const std::vector<std::size_t>& col_ids) {
  if (row_ids.empty() || col_ids.empty()) {
    throw ShapeError("gather: index sets must be non-empty");
  }
  Matrix sub(row_ids.size(), col_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    for (std::size_t j = 0; j < col_ids.size(); ++j) sub(i, j) = a(row_ids[i], col_ids[j]);
  return sub;
}

LuFactorization lu_factor(const Matrix& a, double pivot_tol) {
  if (!a.square()) {
    throw ShapeError("lu_factor: matrix must be square, got " + shape_str(a.rows(), a.cols()));
  }
  const std::size_t n = a.rows();

  LuFactorization f{std::vector<std::size_t>(n), a, false, 0.0};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});

  std::vector<double> row_magnitude(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      row_magnitude[i] = std::max(row_magnitude[i], std::abs(a(i, j)));

  Matrix& lu = f.packed;
  double min_pivot = 0.0, max_pivot = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
      std::swap(f.perm[k], f.perm[p]);
    }

    const double pivot = lu(k, k);
    const double scale = row_magnitude[f.perm[k]];
    if (std::abs(pivot) <= pivot_tol * scale) f.singular = true;

    if (k == 0) {
      min_pivot = max_pivot = std::abs(pivot);
    } else {
      min_pivot = std::min(min_pivot, std::abs(pivot));
      max_pivot = std::max(max_pivot, std::abs(pivot));
    }

    if (pivot == 0.0) continue;  // nothing to eliminate, flag already set
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu(i, k) / pivot;
      lu(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
    }
  }

  f.rcond_estimate = (f.singular || max_pivot == 0.0) ? 0.0 : min_pivot / max_pivot;
  return f;
}

Matrix solve(const LuFactorization& f, const Matrix& rhs) {
  const std::size_t n = f.size();
  if (f.singular) {
    throw SingularMatrixError("solve: matrix is numerically singular (rcond ~ " +
                              std::to_string(f.rcond_estimate) + ")");
  }
  if (rhs.rows() != n) {
    throw ShapeError("solve: rhs has " + std::to_string(rhs.rows()) + " rows, expected " +
                     std::to_string(n));
  }

  const Matrix& lu = f.packed;
  Matrix x(n, rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    // forward substitution with the permuted rhs, L has unit diagonal
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x(j, c);
      x(i, c) = s;
    }
    // back substitution
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x(j, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  return x;
}

Matrix inverse(const Matrix& a) {
  return solve(lu_factor(a), Matrix::identity(a.rows()));
}

std::vector<double> left_null_vector(const Matrix& a, double tol) {
  if (!a.square()) {
    throw ShapeError("left_null_vector: matrix must be square, got " +
                     shape_str(a.rows(), a.cols()));
  }
  const std::size_t n = a.rows();
  const Matrix at = a.transposed();
  const double a_norm = inf_norm(a);

  // Weakest diagonal first: that equation is the most redundant one and the
  // best candidate to give up for the normalization constraint.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t r, std::size_t s) {
    return std::abs(a(r, r)) < std::abs(a(s, s));
  });

  for (std::size_t r : order) {
    Matrix system = at;
    for (std::size_t j = 0; j < n; ++j) system(r, j) = 1.0;  // Σ x_j = 1
    Matrix rhs(n, 1, 0.0);
    rhs(r, 0) = 1.0;

    LuFactorization f = lu_factor(system);
    if (f.singular) continue;
    Matrix xt = solve(f, rhs);

    double x_norm = 0.0, residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) x_norm = std::max(x_norm, std::abs(xt(j, 0)));
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += xt(i, 0) * a(i, j);
      residual = std::max(residual, std::abs(s));
    }
    if (residual <= tol * a_norm * x_norm) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = xt(j, 0);
      return x;
    }
  }
  throw DegenerateNullSpaceError(
      "left_null_vector: no column replacement yields a one-dimensional null space "
      "(nullity is not 1 or the system is too ill-conditioned)");
}

}  // namespace ctmc
