#pragma once

/// Profile solutions u(alpha) of the elliptic sinh-Gordon equation that
/// depend on one variable only:
///
///   u'' = -2 H^2 sinh(2u),   (u')^2 + 2 H^2 cosh(2u) = C.
///
/// The first integral picks the starting slope at u = 0 and is monitored
/// along the RK4 march.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shellcompat/grid.hpp"

namespace shellcompat {

struct CmcProfile {
  double mean_curvature = 0.0;
  double first_integral = 0.0;
  std::vector<double> u;        // at the requested nodes
  std::vector<double> du;       // u' at the requested nodes
  double max_invariant_drift = 0.0;
  int steps_taken = 0;
};

inline double cmc_invariant(double u, double du, double mean_curvature) {
  return du * du + 2.0 * mean_curvature * mean_curvature * std::cosh(2.0 * u);
}

/// Integrates from u(alpha0) = 0, u'(alpha0) = +sqrt(C - 2H^2) and samples
/// at alpha0 + k * spacing, k = 0..count-1. The step is the largest
/// divisor of `spacing` not exceeding `max_step`, so every node is hit
/// exactly.
inline CmcProfile integrate_cmc_profile(double mean_curvature, double first_integral, double spacing,
                                        int count, double max_step = 1e-3,
                                        double drift_limit = 1e-8) {
  if (mean_curvature == 0.0) throw std::invalid_argument("cmc profile: mean curvature must be nonzero");
  const double h2 = 2.0 * mean_curvature * mean_curvature;
  if (!(first_integral > h2)) {
    throw std::invalid_argument("cmc profile: first integral C must exceed 2H^2");
  }
  if (!(spacing > 0.0) || count < 1 || !(max_step > 0.0)) {
    throw std::invalid_argument("cmc profile: bad sampling request");
  }

  CmcProfile out;
  out.mean_curvature = mean_curvature;
  out.first_integral = first_integral;
  out.u.reserve(count);
  out.du.reserve(count);

  const int sub = static_cast<int>(std::ceil(spacing / max_step - 1e-12));
  const double dt = spacing / sub;
  auto accel = [h2](double u) { return -h2 * std::sinh(2.0 * u); };

  double u = 0.0;
  double v = std::sqrt(first_integral - h2);
  out.u.push_back(u);
  out.du.push_back(v);
  for (int k = 1; k < count; ++k) {
    for (int s = 0; s < sub; ++s) {
      const double k1u = v, k1v = accel(u);
      const double k2u = v + 0.5 * dt * k1v, k2v = accel(u + 0.5 * dt * k1u);
      const double k3u = v + 0.5 * dt * k2v, k3v = accel(u + 0.5 * dt * k2u);
      const double k4u = v + dt * k3v, k4v = accel(u + dt * k3u);
      u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      ++out.steps_taken;
      const double drift = std::abs(cmc_invariant(u, v, mean_curvature) - first_integral);
      out.max_invariant_drift = std::max(out.max_invariant_drift, drift);
    }
    out.u.push_back(u);
    out.du.push_back(v);
  }
  if (out.max_invariant_drift > drift_limit) {
    throw NumericalError("cmc profile: first integral drifted beyond limit");
  }
  return out;
}

}  // namespace shellcompat
