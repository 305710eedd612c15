#pragma once

/// Grid-refinement studies: residual norms on a sequence of grids, observed
/// orders log2(linf_coarse / linf_fine), and the pass rule.
///
/// A value counts as converged to zero when it is at or below the floor of
/// its grid, max(absolute floor, 10 eps scale / h^depth). The second term
/// is the rounding level of a quantity built from `depth` nested
/// difference quotients of data of magnitude `scale`. Pairs whose finer
/// value is at the floor carry no order information and are skipped. The
/// asymptotic order is read from the finest remaining pair.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shellcompat/grid.hpp"

namespace shellcompat {

struct OrderWindow {
  double min_order = 1.7;
  double max_order = 2.3;  // +inf for one-sided "order >= min" claims
  double abs_floor = 1e-12;
  double single_grid_tol = 1e-3;  // pass threshold when only one grid ran

  static OrderWindow at_least(double lo) {
    OrderWindow w;
    w.min_order = lo;
    w.max_order = std::numeric_limits<double>::infinity();
    return w;
  }
};

struct GridSample {
  int n = 0;          // nodes along alpha
  double h = 0.0;     // smaller spacing of the grid
  int trim = 0;
  FieldNorms norms;
  double floor = 0.0;
};

struct ResidualStudy {
  std::string name;
  std::string family;
  int depth = 1;       // nesting depth of difference quotients
  double scale = 1.0;  // magnitude of the data the residual is built from
  std::vector<GridSample> samples;
  std::vector<std::optional<double>> orders;  // one per successive pair
  std::optional<double> observed_order;
  OrderWindow window;
  bool pass = false;
  std::string verdict;
};

inline double rounding_floor(double abs_floor, double scale, double h, int depth) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::max(abs_floor, 10.0 * eps * scale / std::pow(h, depth));
}

/// Adds a grid sample; samples must arrive in increasing grid size.
inline void add_sample(ResidualStudy& st, const ScalarField& residual, int trim) {
  const Grid2D& g = residual.grid();
  GridSample s;
  s.n = g.n_alpha;
  s.h = std::min(g.h_alpha, g.h_beta);
  s.trim = trim;
  s.norms = field_norms(residual, trim);
  s.floor = rounding_floor(st.window.abs_floor, st.scale, s.h, st.depth);
  if (!st.samples.empty() && st.samples.back().n >= s.n) {
    throw std::invalid_argument("add_sample: grid sizes must be strictly increasing");
  }
  st.samples.push_back(s);
}

inline void evaluate(ResidualStudy& st) {
  const auto& s = st.samples;
  st.orders.assign(s.size() > 1 ? s.size() - 1 : 0, std::nullopt);
  st.observed_order.reset();
  if (s.empty()) {
    st.pass = false;
    st.verdict = "no samples";
    return;
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].norms.linf > s[k].floor && s[k - 1].norms.linf > 0.0) {
      st.orders[k - 1] = std::log2(s[k - 1].norms.linf / s[k].norms.linf);
      st.observed_order = st.orders[k - 1];
    }
  }
  const GridSample& fine = s.back();
  if (!std::isfinite(fine.norms.linf)) {
    st.pass = false;
    st.verdict = "non-finite residual";
  } else if (fine.norms.linf <= fine.floor) {
    st.pass = true;
    st.verdict = "at rounding floor";
  } else if (s.size() == 1) {
    st.pass = fine.norms.linf <= st.window.single_grid_tol;
    st.verdict = st.pass ? "below single-grid tolerance" : "above single-grid tolerance";
  } else if (!st.observed_order) {
    st.pass = false;
    st.verdict = "no usable grid pair";
  } else {
    const double o = *st.observed_order;
    st.pass = o >= st.window.min_order && o <= st.window.max_order;
    st.verdict = st.pass ? "order in window" : (o < 0.5 ? "stalled" : "order outside window");
  }
}

/// Runs `make(n)` for each grid size and evaluates the study.
inline ResidualStudy run_study(std::string name, std::string family, int depth, OrderWindow window,
                               const std::vector<int>& grids,
                               const std::function<ScalarField(int)>& make,
                               const std::function<int(int)>& trim_for, double scale = 1.0) {
  ResidualStudy st;
  st.name = std::move(name);
  st.family = std::move(family);
  st.depth = depth;
  st.scale = scale;
  st.window = window;
  for (int n : grids) add_sample(st, make(n), trim_for(n));
  evaluate(st);
  return st;
}

}  // namespace shellcompat
