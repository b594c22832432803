#include "critwave/harmonic_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "critwave/errors.hpp"
#include "critwave/util.hpp"

namespace critwave {

namespace {

constexpr double kEndpointTol = 1e-6;
constexpr double kEnergyTol = 1e-4;

double rk4_step(const TargetGeometry& geo, double q, double step) {
  double k1 = geo.g(q);
  double k2 = geo.g(q + 0.5 * step * k1);
  double k3 = geo.g(q + 0.5 * step * k2);
  double k4 = geo.g(q + step * k3);
  return q + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

HarmonicMapProfile solve_harmonic_map(const TargetGeometry& geometry,
                                      double ds, double s_min, double s_max) {
  if (!(ds > 0.0) || ds > 0.1) {
    throw ConfigError("harmonic map solver needs 0 < ds <= 0.1");
  }

  const double c_star = geometry.c_star();
  const double mu = std::abs(geometry.gprime(c_star));

  // Auto-sized range: 18 e-foldings of the relevant decay rate on each side,
  // never narrower than [-8, 8], capped to keep the table bounded.
  if (std::isnan(s_min)) {
    s_min = std::min(-8.0, -18.0 / geometry.k());
  }
  if (std::isnan(s_max)) {
    s_max = mu > 1e-6 ? std::max(8.0, std::min(100.0, 18.0 / mu)) : 100.0;
  }
  if (!(s_min <= -8.0) || !(s_max >= 8.0)) {
    throw ConfigError("harmonic map solver needs s_min <= -8 and s_max >= 8");
  }

  const int n_down = static_cast<int>(std::ceil(-s_min / ds - 1e-9));
  const int n_up = static_cast<int>(std::ceil(s_max / ds - 1e-9));
  s_min = -n_down * ds;
  s_max = n_up * ds;

  HarmonicMapProfile p;
  p.k = geometry.k();
  p.c_star = c_star;
  p.s_min = s_min;
  p.s_max = s_max;
  p.ds = ds;
  p.q.assign(n_down + n_up + 1, 0.0);

  const double q0 = 0.5 * c_star;
  p.q[n_down] = q0;
  const double lo_guard = -0.05 * c_star;
  const double hi_guard = 1.05 * c_star;

  double q = q0;
  for (int i = 1; i <= n_up; ++i) {
    q = rk4_step(geometry, q, ds);
    if (!std::isfinite(q) || q < lo_guard || q > hi_guard) {
      throw Error("harmonic map solver left [0, c_star]");
    }
    p.q[n_down + i] = q;
  }
  q = q0;
  for (int i = 1; i <= n_down; ++i) {
    q = rk4_step(geometry, q, -ds);
    if (!std::isfinite(q) || q < lo_guard || q > hi_guard) {
      throw Error("harmonic map solver left [0, c_star]");
    }
    p.q[n_down - i] = q;
  }

  for (std::size_t j = 0; j + 1 < p.q.size(); ++j) {
    if (!(p.q[j + 1] > p.q[j])) {
      throw Error("harmonic map profile is not strictly increasing; "
                  "reduce the s-range or refine ds");
    }
  }

  if (p.q.front() > kEndpointTol || c_star - p.q.back() > kEndpointTol) {
    throw ConfigError(
        "harmonic map endpoints did not reach the asymptotic regime; "
        "widen the s-range");
  }

  p.dq.resize(p.q.size());
  for (std::size_t j = 0; j < p.q.size(); ++j) p.dq[j] = geometry.g(p.q[j]);

  p.origin_coef = p.q.front() * std::exp(-p.k * s_min);
  p.tail_coef = c_star - p.q.back();
  p.tail_rate = mu;

  // Trapezoid in s; the integrand decays exponentially at both ends, so the
  // truncated rule is effectively spectrally accurate here.
  double e = 0.0;
  for (std::size_t j = 0; j < p.q.size(); ++j) {
    double gq = geometry.g(p.q[j]);
    double density = p.dq[j] * p.dq[j] + gq * gq;
    double w = (j == 0 || j + 1 == p.q.size()) ? 0.5 : 1.0;
    e += w * density;
  }
  p.energy = e * ds;

  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < p.q.size(); ++j) {
    double fd = (p.q[j - 2] - 8.0 * p.q[j - 1] + 8.0 * p.q[j + 1] -
                 p.q[j + 2]) /
                (12.0 * ds);
    worst = std::max(worst, std::abs(fd - p.dq[j]));
  }
  p.residual_max = worst;

  if (std::abs(p.energy - geometry.energy_threshold()) > kEnergyTol) {
    throw ConfigError(
        "harmonic map energy does not match the geometry threshold; "
        "refine ds or widen the s-range");
  }
  return p;
}

double HarmonicMapProfile::value_at_log_radius(double s) const {
  if (s < s_min) return q.front() * std::exp(k * (s - s_min));
  if (s > s_max) return c_star - tail_coef * std::exp(-tail_rate * (s - s_max));

  const int m = static_cast<int>(q.size()) - 1;
  double x = (s - s_min) / ds;
  int j0 = static_cast<int>(std::floor(x)) - 1;
  j0 = std::clamp(j0, 0, m - 3);
  double t = x - j0;  // in [0, 3] over the 4-point stencil

  // Cubic Lagrange on the uniform stencil {0, 1, 2, 3}.
  double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return w0 * q[j0] + w1 * q[j0 + 1] + w2 * q[j0 + 2] + w3 * q[j0 + 3];
}

double HarmonicMapProfile::value_at_radius(double r) const {
  if (!(r > 0.0)) return 0.0;
  return value_at_log_radius(std::log(r));
}

FieldState HarmonicMapProfile::sample_scaled(double lambda,
                                             const RadialGrid& grid) const {
  if (!(lambda > 0.0)) throw ConfigError("profile scale must be positive");
  FieldState state = FieldState::zero(grid, k);
  state.v[0] = origin_coef * ipow(lambda, k);
  for (int j = 1; j <= grid.n_cells; ++j) {
    double r = grid.r(j);
    state.v[j] = value_at_radius(lambda * r) / ipow(r, k);
  }
  return state;
}

}  // namespace critwave
