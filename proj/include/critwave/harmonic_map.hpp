#pragma once

#include <limits>
#include <vector>

#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"

namespace critwave {

// The co-rotational ground state profile Q, computed by integrating
//   dQ/ds = g(Q),  s = log r,  Q(0) = c_star / 2
// with RK4 in both directions. Outside the tabulated s-range the profile is
// continued by its asymptotic forms
//   Q(s) ~ origin_coef * e^{k s}            (s -> -inf)
//   Q(s) ~ c_star - tail_coef * e^{-tail_rate (s - s_max)}   (s -> +inf).
//
// Value semantics; owns copies of everything it needs.
struct HarmonicMapProfile {
  int k = 1;
  double c_star = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double ds = 0.0;
  std::vector<double> q;   // Q at s_j = s_min + j ds
  std::vector<double> dq;  // dQ/ds = g(Q) at the same nodes

  double energy = 0.0;        // integral of (dQ/ds)^2 + g^2(Q) over ds
  double residual_max = 0.0;  // max |finite-difference dQ/ds - g(Q)|
  double origin_coef = 0.0;
  double tail_coef = 0.0;
  double tail_rate = 0.0;

  double value_at_log_radius(double s) const;
  double value_at_radius(double r) const;

  // Q(lambda r) restricted to a grid, in first-order form with zero velocity.
  FieldState sample_scaled(double lambda, const RadialGrid& grid) const;
};

// ds must be <= 0.1. Pass NaN for s_min/s_max to size the range from the
// asymptotic decay rates so the endpoints reach the 1e-6 closeness contract.
// Throws ConfigError when the endpoints fail to reach the asymptotic regime
// or the profile energy drifts from the geometry's threshold by > 1e-4.
HarmonicMapProfile solve_harmonic_map(
    const TargetGeometry& geometry, double ds = 1e-3,
    double s_min = std::numeric_limits<double>::quiet_NaN(),
    double s_max = std::numeric_limits<double>::quiet_NaN());

}  // namespace critwave
