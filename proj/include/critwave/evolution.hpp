#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "critwave/functionals.hpp"
#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"

namespace critwave {

enum class BoundaryMode { dirichlet_zero, dirichlet_frozen };
enum class Classification { dispersed, stationary, blowup_suspected, undecided };

std::string to_string(BoundaryMode mode);
std::string to_string(Classification c);
BoundaryMode boundary_from_string(const std::string& name);

struct EvolutionConfig {
  double dt_factor = 0.25;  // dt = dt_factor * h
  double t_max = 10.0;
  int snapshot_stride = 8;  // steps between recorded series rows
  double blowup_gradient_threshold = 1e6;
  double blowup_concentration_radius = 0.0;  // <= 0 means 4h
  double blowup_energy_fraction = 0.5;
  BoundaryMode boundary = BoundaryMode::dirichlet_zero;

  void validate() const;
};

// Diagnostic cadence and radii recorded alongside the series.
struct DiagnosticsConfig {
  std::vector<double> tail_radii;
  double virial_radius = 0.0;  // <= 0 means r_max / 2
  int field_stride = 1024;     // steps between stored field snapshots
};

struct ClassificationThresholds {
  double dispersal_energy_fraction = 0.05;
  double interior_radius = 1.0;
  double snorm_trailing_window = 0.10;
  double snorm_increment_fraction = 0.01;
  double stationary_factor = 1e-2;  // times sqrt(E)
};

struct SeriesRow {
  double t = 0.0;
  double e_total = 0.0;
  double e_kinetic = 0.0;
  double sup_u = 0.0;
  double sup_vr = 0.0;
  std::vector<double> tails;  // one per configured tail radius
  double virial1 = 0.0;
  double virial2 = 0.0;
  double virial_main1 = 0.0;
  double virial_main2 = 0.0;
  double virial_tail = 0.0;
  double snorm_acc = 0.0;
};

struct RunRecord {
  std::string geometry_tag;
  nlohmann::json config;  // scenario config snapshot when run via the CLI
  double dt = 0.0;
  EvolutionConfig evolution;
  DiagnosticsConfig diagnostics;
  ClassificationThresholds thresholds;
  std::vector<SeriesRow> series;
  std::vector<FieldState> snapshots;
  std::vector<std::string> triggers;
  Classification classification = Classification::undecided;
  double e_initial = 0.0;
  double e_drift_rel = 0.0;
};

// One velocity-Verlet step of the v-form equation (nonlinear source
// -h(r^k v) v^{1+2/k}); requires dt <= 0.5 h. The linear variant drops the
// source, evolving the free wave in dimension 2k+2.
FieldState step(const FieldState& state, const TargetGeometry& geometry,
                double dt, BoundaryMode boundary = BoundaryMode::dirichlet_zero);
FieldState linear_step(const FieldState& state, double dt,
                       BoundaryMode boundary = BoundaryMode::dirichlet_zero);

RunRecord evolve(const FieldState& initial, const TargetGeometry& geometry,
                 const EvolutionConfig& config,
                 const DiagnosticsConfig& diagnostics = {},
                 const ClassificationThresholds& thresholds = {});

Classification classify(const RunRecord& record,
                        const TargetGeometry& geometry,
                        const ClassificationThresholds& thresholds = {});

// Feeds the nonlinear snapshot at t_fit into the free flow and returns
// (t, ||nonlinear - linear||_{H x L^2}) at later snapshot times up to
// t_fit + horizon. Throws ConfigError when the snapshots are missing.
std::vector<std::pair<double, double>> compare_to_linear(
    const RunRecord& record, double t_fit, double horizon);

}  // namespace critwave
