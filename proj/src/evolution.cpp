#include "critwave/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/diagnostics.hpp"
#include "critwave/errors.hpp"
#include "critwave/util.hpp"

namespace critwave {

namespace {

constexpr double kValueGuard = 1e12;

double max_abs_centered_vr(const FieldState& s) {
  double best = 0.0;
  for (std::size_t j = 1; j + 1 < s.v.size(); ++j) {
    best = std::max(best,
                    std::abs((s.v[j + 1] - s.v[j - 1]) / (2.0 * s.grid.h)));
  }
  if (s.v.size() >= 2) {
    best = std::max(best, std::abs((s.v.back() - s.v[s.v.size() - 2]) /
                                   s.grid.h));
  }
  return best;
}

// Acceleration of the v-form equation on the radial stencil. The
// (2k+2)-dimensional Laplacian is discretized in flux form, which keeps the
// operator self-adjoint in the r^{2k+1} dr inner product; the centered
// transport form has complex spectrum for k = 2 and grows without bound.
// The origin node uses the regularity limit (also the flux-form cell); the
// outer node is pinned by the Dirichlet boundary (a = 0 there).
struct Stepper {
  const TargetGeometry* geometry = nullptr;  // nullptr: free flow
  int k = 1;
  double h = 0.0;
  double h_zero = 0.0;
  std::vector<double> c_left;   // r_{j-1/2}^{2k+1} / (r_j^{2k+1} h^2)
  std::vector<double> c_right;  // r_{j+1/2}^{2k+1} / (r_j^{2k+1} h^2)

  void accel(const std::vector<double>& v, std::vector<double>& a) const {
    const std::size_t n = v.size() - 1;
    const double inv_h2 = 1.0 / (h * h);
    const int dim = 2 * k + 2;

    a[0] = dim * 2.0 * (v[1] - v[0]) * inv_h2;
    if (geometry) a[0] -= h_zero * source_power(v[0]);

    if (geometry) {
      for (std::size_t j = 1; j < n; ++j) {
        double r = j * h;
        double lap = c_right[j] * (v[j + 1] - v[j]) -
                     c_left[j] * (v[j] - v[j - 1]);
        double u = ipow(r, k) * v[j];
        a[j] = lap - geometry->h(u) * source_power(v[j]);
      }
    } else {
      for (std::size_t j = 1; j < n; ++j) {
        a[j] = c_right[j] * (v[j + 1] - v[j]) -
               c_left[j] * (v[j] - v[j - 1]);
      }
    }
    a[n] = 0.0;
  }

  double source_power(double v) const { return k == 1 ? v * v * v : v * v; }

  // One velocity-Verlet step; a holds accel(v) on entry and accel(v_new)
  // on exit (reused across steps).
  void advance(std::vector<double>& v, std::vector<double>& vt,
               std::vector<double>& a, std::vector<double>& scratch,
               double dt, double boundary_value) const {
    const std::size_t n = v.size() - 1;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      v[j] += dt * vt[j] + 0.5 * dt * dt * a[j];
      worst = std::max(worst, std::abs(v[j]));
    }
    v[n] = boundary_value;
    if (!(worst <= kValueGuard)) {
      throw InstabilityError("field magnitude exceeded guard (NaN/overflow)");
    }
    accel(v, scratch);
    for (std::size_t j = 0; j < n; ++j) {
      vt[j] += 0.5 * dt * (a[j] + scratch[j]);
    }
    vt[n] = 0.0;
    a.swap(scratch);
  }
};

Stepper make_stepper(const FieldState& state, const TargetGeometry* geometry) {
  if (state.k != 1 && state.k != 2) {
    throw ConfigError("evolution supports k = 1 or k = 2 only");
  }
  Stepper st;
  st.geometry = geometry;
  st.k = state.k;
  st.h = state.grid.h;
  st.h_zero = geometry ? geometry->h_at_zero() : 0.0;
  const std::size_t n = state.v.size();
  const double inv_h2 = 1.0 / (st.h * st.h);
  st.c_left.assign(n, 0.0);
  st.c_right.assign(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    double dj = static_cast<double>(j);
    st.c_left[j] = ipow((dj - 0.5) / dj, 2 * st.k + 1) * inv_h2;
    st.c_right[j] = ipow((dj + 0.5) / dj, 2 * st.k + 1) * inv_h2;
  }
  return st;
}

FieldState single_step(const FieldState& state, const TargetGeometry* geometry,
                       double dt, BoundaryMode boundary) {
  state.validate();
  if (!(dt > 0.0) || dt > 0.5 * state.grid.h * (1.0 + 1e-12)) {
    throw ConfigError("step needs 0 < dt <= 0.5 h");
  }
  if (geometry && geometry->k() != state.k) {
    throw ConfigError("state and geometry disagree on k");
  }
  Stepper st = make_stepper(state, geometry);
  FieldState out = state;
  double boundary_value =
      boundary == BoundaryMode::dirichlet_zero ? 0.0 : state.v.back();
  std::vector<double> a(out.v.size()), scratch(out.v.size());
  st.accel(out.v, a);
  st.advance(out.v, out.v_t, a, scratch, dt, boundary_value);
  out.t += dt;
  return out;
}

}  // namespace

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::dirichlet_zero ? "dirichlet_zero"
                                              : "dirichlet_frozen";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::dispersed:
      return "dispersed";
    case Classification::stationary:
      return "stationary";
    case Classification::blowup_suspected:
      return "blowup-suspected";
    case Classification::undecided:
      return "undecided";
  }
  return "undecided";
}

BoundaryMode boundary_from_string(const std::string& name) {
  if (name == "dirichlet_zero") return BoundaryMode::dirichlet_zero;
  if (name == "dirichlet_frozen") return BoundaryMode::dirichlet_frozen;
  throw ConfigError("unknown boundary mode '" + name + "'");
}

void EvolutionConfig::validate() const {
  if (!(dt_factor > 0.0) || dt_factor > 0.5) {
    throw ConfigError("dt_factor must lie in (0, 0.5]");
  }
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
  if (!(blowup_energy_fraction > 0.0) || blowup_energy_fraction > 1.0) {
    throw ConfigError("blowup_energy_fraction must lie in (0, 1]");
  }
  if (!(blowup_gradient_threshold > 0.0)) {
    throw ConfigError("blowup_gradient_threshold must be positive");
  }
}

FieldState step(const FieldState& state, const TargetGeometry& geometry,
                double dt, BoundaryMode boundary) {
  return single_step(state, &geometry, dt, boundary);
}

FieldState linear_step(const FieldState& state, double dt,
                       BoundaryMode boundary) {
  return single_step(state, nullptr, dt, boundary);
}

RunRecord evolve(const FieldState& initial, const TargetGeometry& geometry,
                 const EvolutionConfig& config,
                 const DiagnosticsConfig& diagnostics,
                 const ClassificationThresholds& thresholds) {
  initial.validate();
  config.validate();
  if (geometry.k() != initial.k) {
    throw ConfigError("state and geometry disagree on k");
  }

  RunRecord rec;
  rec.geometry_tag = geometry.kind_name();
  rec.evolution = config;
  rec.diagnostics = diagnostics;
  rec.thresholds = thresholds;
  rec.dt = config.dt_factor * initial.grid.h;
  if (rec.diagnostics.virial_radius <= 0.0) {
    rec.diagnostics.virial_radius = 0.5 * initial.grid.r_max();
  }
  if (rec.diagnostics.field_stride < 1) rec.diagnostics.field_stride = 1;

  double conc_radius = config.blowup_concentration_radius > 0.0
                           ? config.blowup_concentration_radius
                           : 4.0 * initial.grid.h;

  const double dt = rec.dt;
  const long n_steps = std::max<long>(1, std::lround(config.t_max / dt));

  FieldState state = initial;
  Stepper st = make_stepper(state, &geometry);
  double boundary_value = config.boundary == BoundaryMode::dirichlet_zero
                              ? 0.0
                              : state.v.back();
  if (config.boundary == BoundaryMode::dirichlet_zero) {
    state.v.back() = 0.0;
  }
  state.v_t.back() = 0.0;

  double snorm_acc = 0.0;
  double last_row_t = state.t;

  auto record_row = [&](const FieldState& s) {
    EnergyReport rep = energy_report(s, geometry);
    SeriesRow row;
    row.t = s.t;
    row.e_total = rep.e_total;
    row.e_kinetic = rep.e_kinetic;
    row.sup_u = rep.sup_u;
    row.sup_vr = max_abs_centered_vr(s);

    for (double R : rec.diagnostics.tail_radii) {
      row.tails.push_back(tail_energy(s, R));
    }
    VirialSample vs = virial_sample(s, geometry, rec.diagnostics.virial_radius);
    row.virial1 = vs.v1;
    row.virial2 = vs.v2;
    row.virial_main1 = vs.main1;
    row.virial_main2 = vs.main2;
    row.virial_tail = vs.tail;

    snorm_acc += snorm_integrand(s) * (s.t - last_row_t);
    last_row_t = s.t;
    row.snorm_acc = snorm_acc;
    rec.series.push_back(std::move(row));

    // Blow-up heuristics; triggers end the run, classification stays
    // "suspected" (never proven).
    if (row.sup_vr > config.blowup_gradient_threshold) {
      rec.triggers.push_back("gradient threshold exceeded at t=" +
                             std::to_string(s.t));
    }
    double interior = potential_energy_window(s, geometry, 0.0, conc_radius) +
                      kinetic_energy_window(s, 0.0, conc_radius);
    if (rep.e_total > 0.0 &&
        interior > config.blowup_energy_fraction * rep.e_total) {
      rec.triggers.push_back("energy concentration at t=" +
                             std::to_string(s.t));
    }
  };

  rec.snapshots.push_back(state);
  record_row(state);
  rec.e_initial = rec.series.front().e_total;

  std::vector<double> a(state.v.size()), scratch(state.v.size());
  st.accel(state.v, a);

  for (long i = 1; i <= n_steps && rec.triggers.empty(); ++i) {
    st.advance(state.v, state.v_t, a, scratch, dt, boundary_value);
    state.t = initial.t + static_cast<double>(i) * dt;

    bool last = (i == n_steps);
    if (i % rec.diagnostics.field_stride == 0 || last) {
      rec.snapshots.push_back(state);
    }
    if (i % config.snapshot_stride == 0 || last) {
      record_row(state);
    }
  }
  if (!rec.triggers.empty() &&
      (rec.snapshots.empty() || rec.snapshots.back().t != state.t)) {
    rec.snapshots.push_back(state);
  }

  double worst_drift = 0.0;
  for (const SeriesRow& row : rec.series) {
    double denom = std::max(std::abs(rec.e_initial), 1e-300);
    worst_drift =
        std::max(worst_drift, std::abs(row.e_total - rec.e_initial) / denom);
  }
  rec.e_drift_rel = rec.e_initial == 0.0 ? 0.0 : worst_drift;

  rec.classification = classify(rec, geometry, thresholds);
  return rec;
}

Classification classify(const RunRecord& record,
                        const TargetGeometry& geometry,
                        const ClassificationThresholds& thresholds) {
  if (!record.triggers.empty()) return Classification::blowup_suspected;
  if (record.snapshots.empty() || record.series.empty()) {
    return Classification::undecided;
  }

  const FieldState& first = record.snapshots.front();
  double worst_diff = 0.0;
  for (const FieldState& snap : record.snapshots) {
    FieldState diff = snap;
    for (std::size_t j = 0; j < diff.v.size(); ++j) {
      diff.v[j] -= first.v[j];
      diff.v_t[j] -= first.v_t[j];
    }
    worst_diff = std::max(worst_diff, std::sqrt(h_norm_sq(diff)));
  }
  double e = std::max(record.e_initial, 0.0);
  if (worst_diff <= thresholds.stationary_factor * std::sqrt(e)) {
    return Classification::stationary;
  }

  const FieldState& last = record.snapshots.back();
  EnergyReport rep = energy_report(last, geometry);
  double interior =
      potential_energy_window(last, geometry, 0.0,
                              thresholds.interior_radius) +
      kinetic_energy_window(last, 0.0, thresholds.interior_radius);
  bool interior_empty =
      rep.e_total <= 0.0 ||
      interior <= thresholds.dispersal_energy_fraction * rep.e_total;
  bool snorm_flat =
      snorm_trailing_increment(record, thresholds.snorm_trailing_window) <=
      thresholds.snorm_increment_fraction;
  if (interior_empty && snorm_flat) return Classification::dispersed;
  return Classification::undecided;
}

std::vector<std::pair<double, double>> compare_to_linear(
    const RunRecord& record, double t_fit, double horizon) {
  if (record.snapshots.empty()) throw ConfigError("record has no snapshots");
  const double dt = record.dt;

  std::size_t start = record.snapshots.size();
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    if (std::abs(record.snapshots[i].t - t_fit) <= 0.5 * dt) {
      start = i;
      break;
    }
  }
  if (start == record.snapshots.size()) {
    throw ConfigError("no snapshot recorded at the fit time");
  }

  FieldState lin = record.snapshots[start];
  Stepper st = make_stepper(lin, nullptr);
  double boundary_value =
      record.evolution.boundary == BoundaryMode::dirichlet_zero
          ? 0.0
          : lin.v.back();
  std::vector<double> a(lin.v.size()), scratch(lin.v.size());
  st.accel(lin.v, a);

  std::vector<std::pair<double, double>> out;
  out.emplace_back(lin.t, 0.0);
  long steps_done = 0;
  for (std::size_t i = start + 1; i < record.snapshots.size(); ++i) {
    const FieldState& target = record.snapshots[i];
    if (target.t > t_fit + horizon + 0.5 * dt) break;
    long steps_needed =
        std::lround((target.t - record.snapshots[start].t) / dt);
    for (; steps_done < steps_needed; ++steps_done) {
      st.advance(lin.v, lin.v_t, a, scratch, dt, boundary_value);
    }
    FieldState diff = target;
    for (std::size_t j = 0; j < diff.v.size(); ++j) {
      diff.v[j] -= lin.v[j];
      diff.v_t[j] -= lin.v_t[j];
    }
    out.emplace_back(target.t, std::sqrt(h_norm_sq(diff)));
  }
  return out;
}

}  // namespace critwave
