#pragma once

/// Rectangular (alpha, beta) grids, scalar fields on them, second-order
/// finite-difference operators and trimmed field norms.
///
/// Fields are stored row-major with alpha as the outer index:
/// value(i, j) lives at i * n_beta + j.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shellcompat {

/// Raised when a computation is numerically unusable (ill-conditioned
/// solve, integrator drift, degenerate denominators).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Grid2D {
  int n_alpha = 3;
  int n_beta = 3;
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double h_alpha = 1.0;
  double h_beta = 1.0;

  Grid2D() = default;
  Grid2D(int na, int nb, double a0, double b0, double ha, double hb)
      : n_alpha(na), n_beta(nb), alpha0(a0), beta0(b0), h_alpha(ha), h_beta(hb) {
    validate();
  }

  /// Grid with `na` x `nb` nodes spanning [a0, a1] x [b0, b1] inclusive.
  static Grid2D spanning(int na, int nb, double a0, double a1, double b0, double b1) {
    if (na < 3 || nb < 3) {
      throw std::invalid_argument("Grid2D: need at least 3 nodes per direction");
    }
    if (!(a1 > a0) || !(b1 > b0)) {
      throw std::invalid_argument("Grid2D: empty parameter range");
    }
    return Grid2D(na, nb, a0, b0, (a1 - a0) / (na - 1), (b1 - b0) / (nb - 1));
  }

  void validate() const {
    if (n_alpha < 3 || n_beta < 3) {
      throw std::invalid_argument("Grid2D: need at least 3 nodes per direction");
    }
    if (!(h_alpha > 0.0) || !(h_beta > 0.0) || !std::isfinite(h_alpha) || !std::isfinite(h_beta)) {
      throw std::invalid_argument("Grid2D: spacings must be positive and finite");
    }
  }

  double alpha(int i) const { return alpha0 + i * h_alpha; }
  double beta(int j) const { return beta0 + j * h_beta; }
  std::size_t size() const { return static_cast<std::size_t>(n_alpha) * n_beta; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_beta + j; }

  bool operator==(const Grid2D&) const = default;
};

class ScalarField {
 public:
  ScalarField() = default;

  explicit ScalarField(const Grid2D& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}

  ScalarField(const Grid2D& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("ScalarField: value count does not match grid");
    }
  }

  template <class F>
  static ScalarField sample(const Grid2D& grid, F&& f) {
    ScalarField out(grid);
    for (int i = 0; i < grid.n_alpha; ++i) {
      for (int j = 0; j < grid.n_beta; ++j) {
        out(i, j) = f(grid.alpha(i), grid.beta(j));
      }
    }
    return out;
  }

  const Grid2D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  template <class F>
  ScalarField map(F&& f) const {
    ScalarField out(grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] = f(values_[k]);
    return out;
  }

  ScalarField& operator+=(const ScalarField& o) { return combine(o, std::plus<>{}); }
  ScalarField& operator-=(const ScalarField& o) { return combine(o, std::minus<>{}); }
  ScalarField& operator*=(const ScalarField& o) { return combine(o, std::multiplies<>{}); }
  ScalarField& operator/=(const ScalarField& o) { return combine(o, std::divides<>{}); }
  ScalarField& operator+=(double s) {
    for (double& v : values_) v += s;
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }

 private:
  template <class Op>
  ScalarField& combine(const ScalarField& o, Op op) {
    if (!(o.grid_ == grid_)) {
      throw std::invalid_argument("ScalarField: grid mismatch");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = op(values_[k], o.values_[k]);
    return *this;
  }

  Grid2D grid_;
  std::vector<double> values_;
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
inline ScalarField operator/(ScalarField a, const ScalarField& b) { return a /= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline ScalarField operator*(ScalarField a, double s) { return a *= s; }
inline ScalarField operator+(ScalarField a, double s) { return a += s; }
inline ScalarField operator+(double s, ScalarField a) { return a += s; }
inline ScalarField operator-(ScalarField a) { return a *= -1.0; }
inline ScalarField operator-(ScalarField a, double s) { return a += -s; }
inline ScalarField operator-(double s, ScalarField a) {
  a *= -1.0;
  return a += s;
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
  }
}

namespace detail {

// 3-point stencils: central inside, one-sided at the ends. All O(h^2).
inline void diff_line(const double* in, double* out, int n, std::ptrdiff_t stride, double h) {
  const double inv2h = 1.0 / (2.0 * h);
  auto at = [&](int k) { return in[k * stride]; };
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
  for (int k = 1; k < n - 1; ++k) {
    out[k * stride] = (at(k + 1) - at(k - 1)) * inv2h;
  }
  out[(n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
}

}  // namespace detail

inline ScalarField diff_alpha(const ScalarField& f) {
  const Grid2D& g = f.grid();
  if (g.n_alpha < 3) throw std::invalid_argument("diff_alpha: n_alpha < 3");
  ScalarField out(g);
  for (int j = 0; j < g.n_beta; ++j) {
    detail::diff_line(f.values().data() + j, out.values().data() + j, g.n_alpha, g.n_beta,
                      g.h_alpha);
  }
  return out;
}

inline ScalarField diff_beta(const ScalarField& f) {
  const Grid2D& g = f.grid();
  if (g.n_beta < 3) throw std::invalid_argument("diff_beta: n_beta < 3");
  ScalarField out(g);
  for (int i = 0; i < g.n_alpha; ++i) {
    const std::size_t row = g.index(i, 0);
    detail::diff_line(f.values().data() + row, out.values().data() + row, g.n_beta, 1, g.h_beta);
  }
  return out;
}

namespace detail {

// Compact second difference: 3-point inside, 4-point one-sided at the
// ends (exact on cubics, O(h^2)).
inline void diff2_line(const double* in, double* out, int n, std::ptrdiff_t stride, double h) {
  const double inv = 1.0 / (h * h);
  auto at = [&](int k) { return in[k * stride]; };
  if (n < 4) throw std::invalid_argument("second difference: need at least 4 nodes");
  out[0] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * inv;
  for (int k = 1; k < n - 1; ++k) {
    out[k * stride] = (at(k + 1) - 2.0 * at(k) + at(k - 1)) * inv;
  }
  out[(n - 1) * stride] = (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) * inv;
}

}  // namespace detail

inline ScalarField diff2_alpha(const ScalarField& f) {
  const Grid2D& g = f.grid();
  ScalarField out(g);
  for (int j = 0; j < g.n_beta; ++j) {
    detail::diff2_line(f.values().data() + j, out.values().data() + j, g.n_alpha, g.n_beta,
                       g.h_alpha);
  }
  return out;
}

inline ScalarField diff2_beta(const ScalarField& f) {
  const Grid2D& g = f.grid();
  ScalarField out(g);
  for (int i = 0; i < g.n_alpha; ++i) {
    const std::size_t row = g.index(i, 0);
    detail::diff2_line(f.values().data() + row, out.values().data() + row, g.n_beta, 1, g.h_beta);
  }
  return out;
}

struct FieldNorms {
  double linf = 0.0;
  double l2 = 0.0;
};

/// Max-abs and RMS over the points left after stripping `trim` boundary
/// rings. Sequential row-major reduction, so results are bitwise stable.
inline FieldNorms field_norms(const ScalarField& f, int trim) {
  const Grid2D& g = f.grid();
  if (trim < 0) throw std::invalid_argument("field_norms: negative trim");
  if (g.n_alpha - 2 * trim <= 0 || g.n_beta - 2 * trim <= 0) {
    throw std::invalid_argument("field_norms: trim leaves no points");
  }
  FieldNorms n;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (int i = trim; i < g.n_alpha - trim; ++i) {
    for (int j = trim; j < g.n_beta - trim; ++j) {
      const double v = f(i, j);
      n.linf = std::max(n.linf, std::abs(v));
      sum_sq += v * v;
      ++count;
    }
  }
  n.l2 = std::sqrt(sum_sq / static_cast<double>(count));
  return n;
}

inline void write_field_csv(std::ostream& os, const ScalarField& f) {
  const Grid2D& g = f.grid();
  os << "alpha,beta,value\n";
  os << std::setprecision(17);
  for (int i = 0; i < g.n_alpha; ++i) {
    for (int j = 0; j < g.n_beta; ++j) {
      os << g.alpha(i) << ',' << g.beta(j) << ',' << f(i, j) << '\n';
    }
  }
}

/// Reads the `alpha,beta,value` dump format back. The grid is recovered
/// from the coordinates, which must form a uniform row-major lattice.
inline ScalarField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("field csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "alpha,beta,value") throw std::invalid_argument("field csv: bad header '" + line + "'");

  std::vector<double> a, b, v;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    double x[3];
    char c1 = 0, c2 = 0;
    if (!(row >> x[0] >> c1 >> x[1] >> c2 >> x[2]) || c1 != ',' || c2 != ',') {
      throw std::invalid_argument("field csv: malformed row '" + line + "'");
    }
    a.push_back(x[0]);
    b.push_back(x[1]);
    v.push_back(x[2]);
  }
  if (v.size() < 9) throw std::invalid_argument("field csv: too few rows");

  int nb = 1;
  while (nb < static_cast<int>(a.size()) && a[nb] == a[0]) ++nb;
  if (v.size() % nb != 0) throw std::invalid_argument("field csv: ragged rows");
  const int na = static_cast<int>(v.size() / nb);
  const Grid2D g(na, nb, a[0], b[0], a[static_cast<std::size_t>(nb)] - a[0], b[1] - b[0]);
  const double tol_a = 1e-9 * std::max(1.0, std::abs(g.h_alpha) * na + std::abs(g.alpha0));
  const double tol_b = 1e-9 * std::max(1.0, std::abs(g.h_beta) * nb + std::abs(g.beta0));
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const std::size_t k = g.index(i, j);
      if (std::abs(a[k] - g.alpha(i)) > tol_a || std::abs(b[k] - g.beta(j)) > tol_b) {
        throw std::invalid_argument("field csv: coordinates are not a uniform row-major grid");
      }
    }
  }
  return ScalarField(g, std::move(v));
}

}  // namespace shellcompat
