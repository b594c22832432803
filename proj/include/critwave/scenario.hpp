#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "critwave/evolution.hpp"
#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"

namespace critwave {

struct InitialData {
  enum class Family { gaussian_bump, scaled_q, custom_csv };
  Family family = Family::gaussian_bump;
  // gaussian-bump: u = a (r/r0)^k exp(-((r-r0)/w)^2), hard-windowed at 4w.
  double a = 0.0;
  double r0 = 1.0;
  double w = 1.0;
  // scaled-q
  double lambda = 1.0;
  // custom-csv
  std::string path;
};

// One runnable experiment. from_json fills defaults; to_canonical_json
// resolves everything back out (sorted keys), which is what gets hashed for
// the run directory name and written as config.json.
struct ScenarioConfig {
  nlohmann::json geometry;  // geometry spec subobject
  InitialData data;
  RadialGrid grid;
  EvolutionConfig evolution;
  DiagnosticsConfig diagnostics;
  ClassificationThresholds thresholds;
  std::uint64_t seed = 0;

  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::json to_canonical_json() const;
  std::string hash12() const;
};

FieldState build_initial_state(const ScenarioConfig& config,
                               const TargetGeometry& geometry);

// Largest radius carrying a value above 1e-12 * max|v|; 0 for zero states.
double support_radius(const FieldState& state);

struct RunOutputs {
  std::filesystem::path dir;
  RunRecord record;
  bool reused = false;
};

// Validates, evolves, writes config.json + series.csv + snapshots/ +
// final.ckpt + summary.json under out_root/<hash12>. A directory whose
// summary.json already exists is reused untouched (idempotent reruns).
RunOutputs run_scenario(const ScenarioConfig& config,
                        const std::filesystem::path& out_root);

struct SweepEntry {
  double value = 0.0;
  std::string classification;
  double e_initial = 0.0;
  std::string dir;
  std::string error;  // empty on success
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepEntry> entries;
  nlohmann::json to_json() const;
};

// Independent runs over `values` applied at the dotted config path, executed
// on a worker pool and merged in input order (deterministic under any
// parallelism degree). Per-run failures land in the entry, not the sweep.
SweepResult run_sweep(const ScenarioConfig& base, const std::string& parameter,
                      const std::vector<double>& values, int parallelism,
                      const std::filesystem::path& out_root);

// C*, D*, E(Q), h(0) and a K(E) table at E in {1/4, 1/2, 3/4, 1} * E(Q);
// table entries outside a custom tabulation domain are null.
nlohmann::json report_thresholds(const TargetGeometry& geometry);

// Applies "--set path.to.key=value"; value is parsed as JSON when possible,
// else taken as a string. The path must already exist in the document.
void set_by_path(nlohmann::json& doc, const std::string& dotted,
                 const std::string& value);

std::uint64_t fnv1a64(const std::string& bytes);

// CRITWAVE_THREADS cap (0 = no cap set).
int env_thread_cap();

}  // namespace critwave
