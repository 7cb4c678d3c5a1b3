#pragma once

#include "difflab/core/errors.hpp"
#include "difflab/expr/expression.hpp"

#include <string>
#include <vector>

namespace difflab {

/// delta^k f(t_0..t_k) by the recursion
///   delta^0 f = f,
///   delta^k f(t_0..t_k) = k/(t_0 - t_k) * (delta^{k-1} f(t_0..t_{k-1}) - delta^{k-1} f(t_1..t_k)),
/// evaluated bottom-up in O(k^2). Works for any field-like scalar T (double, rationals).
template <class T, class F>
T delta_k(F&& f, const std::vector<T>& nodes) {
  const std::size_t n = nodes.size();
  if (n == 0) throw CoincidentNodes("delta_k needs at least one node");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (nodes[i] == nodes[j]) throw CoincidentNodes("nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  std::vector<T> level;
  level.reserve(n);
  for (const auto& t : nodes) level.push_back(f(t));
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i + k < n; ++i)
      level[i] = T(static_cast<long>(k)) / (nodes[i] - nodes[i + k]) * (level[i] - level[i + 1]);
  return level[0];
}

/// delta^k of a one-variable expression.
inline double delta_k(const Expression& f, const std::string& variable, const std::vector<double>& nodes) {
  return delta_k<double>([&](double t) { return evaluate(f, Env{{variable, t}}); }, nodes);
}

} // namespace difflab
