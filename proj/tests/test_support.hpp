#pragma once

// Test-side helpers. Norms and orders are recomputed here instead of going
// through field_norms so that the oracles stay independent of the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "shellcompat/grid.hpp"

namespace testsupport {

inline double interior_max(const shellcompat::ScalarField& f, int trim) {
  const auto& g = f.grid();
  double m = 0.0;
  for (int i = trim; i < g.n_alpha - trim; ++i)
    for (int j = trim; j < g.n_beta - trim; ++j) m = std::max(m, std::abs(f(i, j)));
  return m;
}

/// max |f - exact(alpha, beta)| over nodes at least `trim` away from the edge.
inline double interior_error(const shellcompat::ScalarField& f, const std::function<double(double, double)>& exact,
                             int trim) {
  const auto& g = f.grid();
  double m = 0.0;
  for (int i = trim; i < g.n_alpha - trim; ++i)
    for (int j = trim; j < g.n_beta - trim; ++j) m = std::max(m, std::abs(f(i, j) - exact(g.alpha(i), g.beta(j))));
  return m;
}

/// log2 ratios of successive values.
inline std::vector<double> orders(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t k = 1; k < v.size(); ++k) out.push_back(std::log2(v[k - 1] / v[k]));
  return out;
}

inline std::vector<double> sweep(const std::vector<int>& ns, const std::function<double(int)>& f) {
  std::vector<double> out;
  for (int n : ns) out.push_back(f(n));
  return out;
}

}  // namespace testsupport
