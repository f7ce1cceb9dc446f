#include "ctmc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctmc/errors.hpp"

namespace ctmc {

IntensityMatrix validate(const Matrix& raw, double tol) {
  if (!raw.square()) {
    throw ShapeError("intensity matrix must be square, got " + std::to_string(raw.rows()) +
                     "x" + std::to_string(raw.cols()));
  }
  if (tol < 0.0) throw DomainError("validation tolerance must be >= 0");
  if (!all_finite(raw)) {
    throw ValidationError("intensity matrix contains non-finite entries");
  }

  const std::size_t n = raw.rows();
  const double scale = max_abs(raw);
  const double row_sum_bound = tol * static_cast<double>(n) * scale;

  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = raw(i, j);
      if (i != j && v < -tol) {
        throw ValidationError("negative off-diagonal rate b[" + std::to_string(i) + "][" +
                              std::to_string(j) + "] = " + std::to_string(v));
      }
      row_sum += v;
    }
    if (std::abs(row_sum) > row_sum_bound) {
      throw ValidationError("row " + std::to_string(i) + " sums to " + std::to_string(row_sum) +
                            ", expected 0 within " + std::to_string(row_sum_bound));
    }
  }

  // Clamp round-off negatives and re-project the diagonal so row sums vanish
  // exactly; original off-diagonal rates are preserved otherwise.
  IntensityMatrix result{raw, {}};
  for (std::size_t i = 0; i < n; ++i) {
    double off_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (result.b(i, j) < 0.0) result.b(i, j) = 0.0;
      off_sum += result.b(i, j);
    }
    result.b(i, i) = -off_sum;
  }
  return result;
}

EmbeddedChain embedded_chain(const IntensityMatrix& b) {
  const std::size_t n = b.size();
  EmbeddedChain chain{std::vector<double>(n), Matrix(n, n, 0.0), std::vector<std::uint8_t>(n, 0)};

  for (std::size_t i = 0; i < n; ++i) {
    const double bii = b.b(i, i);
    if (bii == 0.0) {
      chain.zero_rate_mask[i] = 1;
      chain.d[i] = 1.0;  // keeps D invertible
      chain.q(i, i) = 1.0;
    } else {
      chain.d[i] = -bii;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) chain.q(i, j) = b.b(i, j) / chain.d[i];
      }
    }
  }
  return chain;
}

BoolMatrix reachability_closure(const BoolMatrix& adjacency) {
  const std::size_t n = adjacency.size();
  BoolMatrix closure = adjacency;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (!closure(i, k)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (closure(k, j)) closure.set(i, j, true);
    }
  return closure;
}

BoolMatrix positive_offdiagonal_graph(const IntensityMatrix& b) {
  const std::size_t n = b.size();
  BoolMatrix adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && b.b(i, j) > 0.0) adj.set(i, j, true);
  return adj;
}

ClassStructure classify_states(const IntensityMatrix& b) {
  const std::size_t n = b.size();
  const BoolMatrix closure = reachability_closure(positive_offdiagonal_graph(b));

  // Communicating classes: i ~ j iff i == j or both closure directions hold.
  std::vector<int> component(n, -1);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) {
    if (component[i] >= 0) continue;
    const int id = static_cast<int>(components.size());
    components.push_back({i});
    component[i] = id;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (component[j] < 0 && closure(i, j) && closure(j, i)) {
        component[j] = id;
        components.back().push_back(j);
      }
    }
  }

  // A communicating class is a recurrence class iff it is closed.
  ClassStructure s;
  s.class_of.assign(n, ClassStructure::kTransient);
  for (const auto& members : components) {
    bool closed = true;
    for (std::size_t i : members) {
      for (std::size_t j = 0; j < n && closed; ++j) {
        if (b.b(i, j) > 0.0 && component[j] != component[members.front()]) closed = false;
      }
      if (!closed) break;
    }
    if (closed) {
      const int id = static_cast<int>(s.classes.size());
      for (std::size_t i : members) s.class_of[i] = id;
      s.classes.push_back(members);
    } else {
      s.transient.insert(s.transient.end(), members.begin(), members.end());
    }
  }
  std::sort(s.transient.begin(), s.transient.end());

  if (s.classes.empty()) {
    // Impossible for a finite valid intensity matrix: some sink component of
    // the condensation is always closed.
    throw NumericalError("classify_states: no recurrence class found");
  }
  return s;
}

}  // namespace ctmc
