#include "ctmc/limit.hpp"

#include <cmath>
#include <string>

#include "ctmc/errors.hpp"

namespace ctmc {

namespace {

constexpr double kNegativeClampTol = 1e-12;  // for probabilities out of solves
constexpr double kAssemblyClampTol = 1e-14;  // for assembled limit entries

const std::vector<std::size_t>& class_members(const ClassStructure& s, std::size_t class_id) {
  if (class_id >= s.classes.size()) {
    throw DomainError("class id " + std::to_string(class_id) + " out of range, have " +
                      std::to_string(s.classes.size()) + " recurrence classes");
  }
  return s.classes[class_id];
}

}  // namespace

StationaryVector stationary_distribution(const IntensityMatrix& b, const ClassStructure& s,
                                         std::size_t class_id) {
  const auto& members = class_members(s, class_id);
  const Matrix b_class = gather(b.b, members, members);

  std::vector<double> x = left_null_vector(b_class);
  double lambda = 0.0;
  for (double v : x) lambda += v;
  if (lambda == 0.0 || !std::isfinite(lambda)) {
    throw NumericalError("stationary_distribution: null vector of class " +
                         std::to_string(class_id) + " has zero coordinate sum");
  }

  StationaryVector result{class_id, std::vector<double>(b.size(), 0.0)};
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double p = x[k] / lambda;
    if (!(p > 0.0)) {
      throw NumericalError("stationary_distribution: non-positive coordinate " +
                           std::to_string(p) + " at state " + std::to_string(members[k]) +
                           " of class " + std::to_string(class_id) +
                           " (conditioning failure, positivity is guaranteed)");
    }
    result.p[members[k]] = p;
  }
  return result;
}

std::vector<double> absorption_vector(const IntensityMatrix& b, const ClassStructure& s,
                                      std::size_t class_id) {
  const auto& members = class_members(s, class_id);
  if (s.transient.empty()) {
    throw DomainError("absorption_vector: chain has no transient states");
  }

  const Matrix b_transient = gather(b.b, s.transient, s.transient);
  Matrix rhs(s.transient.size(), 1, 0.0);
  for (std::size_t t = 0; t < s.transient.size(); ++t) {
    double into_class = 0.0;
    for (std::size_t j : members) into_class += b.b(s.transient[t], j);
    rhs(t, 0) = -into_class;
  }

  const LuFactorization factors = lu_factor(b_transient);
  if (factors.singular) {
    throw SingularMatrixError(
        "absorption_vector: transient submatrix B_T is numerically singular (rcond ~ " +
        std::to_string(factors.rcond_estimate) +
        "); the classification may be broken or the chain is extremely ill-conditioned");
  }
  const Matrix solution = solve(factors, rhs);

  std::vector<double> f(s.transient.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    double v = solution(t, 0);
    if (v < 0.0) {
      if (v < -kNegativeClampTol) {
        throw NumericalError("absorption_vector: probability " + std::to_string(v) +
                             " from state " + std::to_string(s.transient[t]) + " into class " +
                             std::to_string(class_id) + " is negative beyond round-off");
      }
      v = 0.0;
    }
    if (v > 1.0 + kNegativeClampTol) {
      throw NumericalError("absorption_vector: probability " + std::to_string(v) +
                           " from state " + std::to_string(s.transient[t]) + " into class " +
                           std::to_string(class_id) + " exceeds 1 beyond round-off");
    }
    f[t] = v;
  }
  return f;
}

FinalLimit final_limit(const IntensityMatrix& b) {
  const std::size_t n = b.size();
  FinalLimit result{Matrix(n, n, 0.0), classify_states(b), {}, {}};
  const ClassStructure& s = result.structure;

  for (std::size_t c = 0; c < s.classes.size(); ++c) {
    StationaryVector sv = stationary_distribution(b, s, c);
    for (std::size_t i : s.classes[c])
      for (std::size_t j = 0; j < n; ++j) result.p(i, j) = sv.p[j];
    result.stationary.push_back(std::move(sv));
  }

  if (!s.transient.empty()) {
    result.absorption.transient_states = s.transient;
    for (std::size_t c = 0; c < s.classes.size(); ++c) {
      std::vector<double> f = absorption_vector(b, s, c);
      for (std::size_t t = 0; t < s.transient.size(); ++t) {
        const std::size_t i = s.transient[t];
        for (std::size_t j : s.classes[c]) result.p(i, j) = f[t] * result.p(j, j);
      }
      for (std::size_t t = 0; t < s.transient.size(); ++t) {
        if (result.absorption.f.size() <= t) result.absorption.f.emplace_back();
        result.absorption.f[t].push_back(f[t]);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double& v = result.p(i, j);
      if (v < 0.0 && v >= -kAssemblyClampTol) v = 0.0;
    }

  verify_final_limit(result, b);
  return result;
}

void verify_final_limit(const FinalLimit& limit, const IntensityMatrix& b) {
  const std::size_t n = b.size();
  const Matrix& p = limit.p;
  const ClassStructure& s = limit.structure;
  const double b_scale = max_abs(b.b);

  auto fail = [](const std::string& what) { throw NumericalError("final limit invariant: " + what); };

  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (p(i, j) < 0.0) fail("negative entry p[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      row_sum += p(i, j);
    }
    if (std::abs(row_sum - 1.0) > 1e-12)
      fail("row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
  }

  for (std::size_t j : s.transient)
    for (std::size_t i = 0; i < n; ++i)
      if (p(i, j) != 0.0) fail("transient column " + std::to_string(j) + " not zero");

  for (const auto& members : s.classes) {
    for (std::size_t i : members) {
      for (std::size_t j = 0; j < n; ++j)
        if (p(i, j) != p(members.front(), j))
          fail("rows of class containing state " + std::to_string(members.front()) +
               " are not identical");
      for (std::size_t j : members)
        if (!(p(i, j) > 0.0)) fail("class block has a non-positive entry");
    }
  }

  if (max_abs_diff(matmul(p, p), p) > 1e-9) fail("P*P differs from P beyond 1e-9");
  if (max_abs(matmul(p, b.b)) > 1e-9 * b_scale) fail("P*B does not vanish");
  if (max_abs(matmul(b.b, p)) > 1e-9 * b_scale) fail("B*P does not vanish");

  for (std::size_t t = 0; t < limit.absorption.transient_states.size(); ++t) {
    double total = 0.0;
    for (double v : limit.absorption.f[t]) {
      if (v < 0.0 || v > 1.0 + kNegativeClampTol)
        fail("absorption probability " + std::to_string(v) + " outside [0, 1]");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
      fail("absorption probabilities from state " +
           std::to_string(limit.absorption.transient_states[t]) + " sum to " +
           std::to_string(total));
  }
}

}  // namespace ctmc
