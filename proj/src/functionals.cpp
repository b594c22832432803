#include "critwave/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/util.hpp"

namespace critwave {

namespace {

// Trapezoid over the full grid of a node-sampled weighted integrand
// (densities here already carry the measure factor r).
double trapezoid(const std::vector<double>& w, double h) {
  if (w.size() < 2) return 0.0;
  double sum = 0.5 * (w.front() + w.back());
  for (std::size_t j = 1; j + 1 < w.size(); ++j) sum += w[j];
  return sum * h;
}

double interp(const std::vector<double>& w, double h, double x) {
  double s = x / h;
  auto j = static_cast<std::size_t>(std::max(0.0, std::floor(s)));
  if (j + 1 >= w.size()) return w.back();
  double t = s - static_cast<double>(j);
  return (1.0 - t) * w[j] + t * w[j + 1];
}

// Trapezoid restricted to [a, b], splitting the end cells linearly.
double trapezoid_window(const std::vector<double>& w, double h, double a,
                        double b) {
  double r_max = h * static_cast<double>(w.size() - 1);
  if (a < -1e-12 || b > r_max * (1.0 + 1e-12) + 1e-12 || !(a < b)) {
    throw DomainError("integration window outside [0, r_max]");
  }
  b = std::min(b, r_max);
  a = std::max(a, 0.0);

  auto ja = static_cast<long>(std::ceil(a / h - 1e-12));
  auto jb = static_cast<long>(std::floor(b / h + 1e-12));
  if (ja > jb) {
    return (b - a) * 0.5 * (interp(w, h, a) + interp(w, h, b));
  }
  double sum = 0.0;
  if (jb > ja) {
    sum = 0.5 * (w[ja] + w[jb]);
    for (long j = ja + 1; j < jb; ++j) sum += w[j];
    sum *= h;
  }
  double left = ja * h - a;
  if (left > 0.0) sum += left * 0.5 * (interp(w, h, a) + w[ja]);
  double right = b - jb * h;
  if (right > 0.0) sum += right * 0.5 * (w[jb] + interp(w, h, b));
  return sum;
}

std::vector<double> centered_vr(const FieldState& s) {
  const auto& v = s.v;
  std::vector<double> vr(v.size(), 0.0);
  // Regularity pins v_r(0) = 0; one-sided at the outer boundary.
  for (std::size_t j = 1; j + 1 < v.size(); ++j) {
    vr[j] = (v[j + 1] - v[j - 1]) / (2.0 * s.grid.h);
  }
  if (v.size() >= 2) vr.back() = (v.back() - v[v.size() - 2]) / s.grid.h;
  return vr;
}

std::vector<double> kinetic_weighted(const FieldState& s) {
  std::vector<double> w(s.v_t.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    double r = s.grid.r(static_cast<int>(j));
    w[j] = ipow(r, 2 * s.k + 1) * s.v_t[j] * s.v_t[j];
  }
  return w;
}

// (u_r^2 + q(u)/r^2) r with q = g^2 or q = d; the origin limit of the
// weighted integrand is 0 for every k >= 1.
template <class Q>
std::vector<double> potential_like_weighted(const FieldState& s,
                                            const std::vector<double>& ur,
                                            const Q& q) {
  std::vector<double> w(s.v.size(), 0.0);
  for (std::size_t j = 1; j < w.size(); ++j) {
    double r = s.grid.r(static_cast<int>(j));
    double u = ipow(r, s.k) * s.v[j];
    w[j] = (ur[j] * ur[j] + q(u) / (r * r)) * r;
  }
  w[0] = 0.0;
  return w;
}

std::vector<double> pair_norm_weighted(const FieldState& s,
                                       const std::vector<double>& ur) {
  std::vector<double> w(s.v.size(), 0.0);
  for (std::size_t j = 1; j < w.size(); ++j) {
    double r = s.grid.r(static_cast<int>(j));
    double u = ipow(r, s.k) * s.v[j];
    double ut = ipow(r, s.k) * s.v_t[j];
    w[j] = (ur[j] * ur[j] + u * u / (r * r) + ut * ut) * r;
  }
  return w;
}

std::vector<double> spatial_norm_weighted(const FieldState& s,
                                          const std::vector<double>& ur) {
  std::vector<double> w(s.v.size(), 0.0);
  for (std::size_t j = 1; j < w.size(); ++j) {
    double r = s.grid.r(static_cast<int>(j));
    double u = ipow(r, s.k) * s.v[j];
    w[j] = (ur[j] * ur[j] + u * u / (r * r)) * r;
  }
  return w;
}

}  // namespace

std::vector<double> radial_derivative_u(const FieldState& s) {
  std::vector<double> vr = centered_vr(s);
  std::vector<double> ur(vr.size());
  for (std::size_t j = 0; j < ur.size(); ++j) {
    double r = s.grid.r(static_cast<int>(j));
    ur[j] = ipow(r, s.k) * vr[j] + s.k * ipow(r, s.k - 1) * s.v[j];
  }
  return ur;
}

double kinetic_energy(const FieldState& state) {
  return trapezoid(kinetic_weighted(state), state.grid.h);
}

double kinetic_energy_window(const FieldState& state, double a, double b) {
  return trapezoid_window(kinetic_weighted(state), state.grid.h, a, b);
}

double potential_energy_window(const FieldState& state,
                               const TargetGeometry& geometry, double a,
                               double b) {
  std::vector<double> ur = radial_derivative_u(state);
  auto w = potential_like_weighted(state, ur, [&](double u) {
    double gu = geometry.g(u);
    return gu * gu;
  });
  return trapezoid_window(w, state.grid.h, a, b);
}

double f_functional(const FieldState& state, const TargetGeometry& geometry) {
  std::vector<double> ur = radial_derivative_u(state);
  auto w = potential_like_weighted(state, ur,
                                   [&](double u) { return geometry.d(u); });
  return trapezoid(w, state.grid.h);
}

double h_norm_sq_window(const FieldState& state, double a, double b) {
  std::vector<double> ur = radial_derivative_u(state);
  return trapezoid_window(pair_norm_weighted(state, ur), state.grid.h, a, b);
}

double h_norm_sq(const FieldState& state) {
  return h_norm_sq_window(state, 0.0, state.grid.r_max());
}

double h_norm_spatial_sq_window(const FieldState& state, double a, double b) {
  std::vector<double> ur = radial_derivative_u(state);
  return trapezoid_window(spatial_norm_weighted(state, ur), state.grid.h, a,
                          b);
}

EnergyReport energy_report(
    const FieldState& state, const TargetGeometry& geometry,
    const std::vector<std::pair<double, double>>& windows) {
  EnergyReport rep;
  std::vector<double> ur = radial_derivative_u(state);
  auto pot = potential_like_weighted(state, ur, [&](double u) {
    double gu = geometry.g(u);
    return gu * gu;
  });
  auto fw = potential_like_weighted(state, ur,
                                    [&](double u) { return geometry.d(u); });

  rep.e_kinetic = trapezoid(kinetic_weighted(state), state.grid.h);
  rep.e_potential = trapezoid(pot, state.grid.h);
  rep.e_total = rep.e_kinetic + rep.e_potential;
  rep.f_functional = trapezoid(fw, state.grid.h);
  rep.h_norm_sq = trapezoid(pair_norm_weighted(state, ur), state.grid.h);
  rep.sup_u = state.sup_u();
  for (auto [a, b] : windows) {
    rep.partials.push_back({a, b, trapezoid_window(pot, state.grid.h, a, b)});
  }
  return rep;
}

PointwiseBoundRecord check_pointwise_bound(const FieldState& state,
                                           const TargetGeometry& geometry,
                                           int max_points) {
  std::vector<double> ur = radial_derivative_u(state);
  auto pot = potential_like_weighted(state, ur, [&](double u) {
    double gu = geometry.g(u);
    return gu * gu;
  });

  // Trapezoid prefix so windows between nodes are exact prefix differences.
  std::vector<double> prefix(pot.size(), 0.0);
  for (std::size_t j = 0; j + 1 < pot.size(); ++j) {
    prefix[j + 1] = prefix[j] + 0.5 * state.grid.h * (pot[j] + pot[j + 1]);
  }

  int n = state.grid.n_cells;
  int stride = std::max(1, (n + max_points - 1) / max_points);
  std::vector<int> idx;
  for (int j = 0; j <= n; j += stride) idx.push_back(j);
  if (idx.back() != n) idx.push_back(n);

  std::vector<double> G_at(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double r = state.grid.r(idx[i]);
    double u = ipow(r, state.k) * state.v[idx[i]];
    G_at[i] = geometry.G(u);
  }

  PointwiseBoundRecord rec;
  bool first = true;
  // The relative gap is only meaningful on windows carrying a nonvanishing
  // share of the integral; tiny windows sit at the quadrature noise floor.
  const double gap_floor = 1e-3 * prefix.back();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      double lhs = std::abs(G_at[i] - G_at[j]);
      double rhs = 0.5 * (prefix[idx[j]] - prefix[idx[i]]);
      double viol = lhs - rhs;
      if (first || viol > rec.violation) {
        rec.violation = viol;
        rec.r_lo = state.grid.r(idx[i]);
        rec.r_hi = state.grid.r(idx[j]);
        rec.lhs = lhs;
        rec.rhs = rhs;
        first = false;
      }
      if (rhs >= gap_floor && gap_floor > 0.0) {
        rec.max_relative_equality_gap =
            std::max(rec.max_relative_equality_gap, std::abs(viol) / rhs);
      }
    }
  }
  return rec;
}

SupBoundResult sup_bound_check(const FieldState& state,
                               const TargetGeometry& geometry) {
  double sup = state.sup_u();
  double boundary = std::abs(ipow(state.grid.r_max(), state.k) *
                             state.v.back());
  if (boundary > 1e-6 * std::max(1.0, sup)) {
    throw ConfigError("sup bound needs trivial outer endpoint");
  }
  double e_pot =
      potential_energy_window(state, geometry, 0.0, state.grid.r_max());
  if (!(e_pot < 2.0 * geometry.energy_threshold())) {
    throw ConfigError("sup bound needs energy below twice the threshold");
  }
  return {sup, geometry.K(e_pot)};
}

bool membership_v(const FieldState& state, const TargetGeometry& geometry,
                  double delta) {
  if (!(delta > 0.0) || delta > geometry.energy_threshold()) {
    throw ConfigError("membership needs delta in (0, E(Q)]");
  }
  EnergyReport rep = energy_report(state, geometry);
  double boundary = std::abs(ipow(state.grid.r_max(), state.k) *
                             state.v.back());
  if (boundary > 1e-6 * std::max(1.0, rep.sup_u)) return false;
  return rep.e_total < geometry.energy_threshold() + delta;
}

NormEquivalenceResult norm_equivalence_check(const FieldState& state) {
  std::vector<double> vr = centered_vr(state);
  std::vector<double> ur = radial_derivative_u(state);

  std::vector<double> wa(vr.size(), 0.0);
  for (std::size_t j = 0; j < wa.size(); ++j) {
    double r = state.grid.r(static_cast<int>(j));
    wa[j] = vr[j] * vr[j] * ipow(r, 2 * state.k + 1);
  }
  double A = trapezoid(wa, state.grid.h);
  double B =
      trapezoid(spatial_norm_weighted(state, ur), state.grid.h);

  double k2 = static_cast<double>(state.k) * state.k;
  NormEquivalenceResult res;
  res.v_gradient = A;
  res.u_norm = B;
  res.margin_a = (k2 + 1.0) * B - A;
  res.margin_b = (2.0 + 1.0 / k2) * A - B;
  res.recorded_lower = B - A / 3.0;
  res.recorded_upper = (k2 + 1.0) * A - B;
  return res;
}

}  // namespace critwave
