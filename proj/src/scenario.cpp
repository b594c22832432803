#include "critwave/scenario.hpp"

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "critwave/errors.hpp"
#include "critwave/harmonic_map.hpp"
#include "critwave/io.hpp"
#include "critwave/util.hpp"

namespace critwave {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const char* context,
                         std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string(context) + ": unknown key \"" + it.key() +
                        "\"");
    }
  }
}

double need_number(const json& j, const char* key, const char* context) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string(context) + ": \"" + key +
                      "\" must be a number");
  }
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback,
                 const char* context) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ConfigError(std::string(context) + ": \"" + key +
                      "\" must be a number");
  }
  return j.at(key).get<double>();
}

std::int64_t integer_or(const json& j, const char* key, std::int64_t fallback,
                        const char* context) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ConfigError(std::string(context) + ": \"" + key +
                      "\" must be an integer");
  }
  return j.at(key).get<std::int64_t>();
}

std::string string_or(const json& j, const char* key,
                      const std::string& fallback, const char* context) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw ConfigError(std::string(context) + ": \"" + key +
                      "\" must be a string");
  }
  return j.at(key).get<std::string>();
}

InitialData parse_initial_data(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("initial_data must be an object");
  }
  InitialData data;
  const std::string family = string_or(j, "family", "", "initial_data");
  if (family == "gaussian-bump") {
    reject_unknown_keys(j, "initial_data", {"family", "a", "r0", "w"});
    data.family = InitialData::Family::gaussian_bump;
    data.a = need_number(j, "a", "initial_data");
    data.r0 = number_or(j, "r0", 1.0, "initial_data");
    data.w = number_or(j, "w", 1.0, "initial_data");
    if (!std::isfinite(data.a) || !(data.r0 > 0.0) || !(data.w > 0.0)) {
      throw ConfigError("initial_data: gaussian-bump needs finite a, r0 > 0, "
                        "w > 0");
    }
  } else if (family == "scaled-q") {
    reject_unknown_keys(j, "initial_data", {"family", "lambda"});
    data.family = InitialData::Family::scaled_q;
    data.lambda = number_or(j, "lambda", 1.0, "initial_data");
    if (!(data.lambda > 0.0) || !std::isfinite(data.lambda)) {
      throw ConfigError("initial_data: scaled-q needs lambda > 0");
    }
  } else if (family == "custom-csv") {
    reject_unknown_keys(j, "initial_data", {"family", "path"});
    data.family = InitialData::Family::custom_csv;
    data.path = string_or(j, "path", "", "initial_data");
    if (data.path.empty()) {
      throw ConfigError("initial_data: custom-csv needs a \"path\"");
    }
  } else {
    throw ConfigError("initial_data: family must be one of gaussian-bump, "
                      "scaled-q, custom-csv");
  }
  return data;
}

std::string family_name(InitialData::Family family) {
  switch (family) {
    case InitialData::Family::gaussian_bump: return "gaussian-bump";
    case InitialData::Family::scaled_q: return "scaled-q";
    case InitialData::Family::custom_csv: return "custom-csv";
  }
  return "?";
}

Classification classification_from_string(const std::string& name) {
  if (name == "dispersed") return Classification::dispersed;
  if (name == "stationary") return Classification::stationary;
  if (name == "blowup_suspected") return Classification::blowup_suspected;
  return Classification::undecided;
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%04zu.csv", index);
  return buf;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario config must be an object");
  reject_unknown_keys(j, "scenario",
                      {"geometry", "initial_data", "grid", "evolution",
                       "diagnostics", "classification", "seed"});
  if (!j.contains("geometry")) throw ConfigError("scenario: missing geometry");
  if (!j.contains("initial_data")) {
    throw ConfigError("scenario: missing initial_data");
  }
  if (!j.contains("grid")) throw ConfigError("scenario: missing grid");

  ScenarioConfig config;
  config.geometry = j.at("geometry");
  config.data = parse_initial_data(j.at("initial_data"));

  const json& grid = j.at("grid");
  if (!grid.is_object()) throw ConfigError("grid must be an object");
  reject_unknown_keys(grid, "grid", {"n_cells", "r_max"});
  const std::int64_t n_cells = integer_or(grid, "n_cells", 0, "grid");
  const double r_max = need_number(grid, "r_max", "grid");
  if (n_cells < 16 || !(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ConfigError("grid: need n_cells >= 16 and finite r_max > 0");
  }
  config.grid = RadialGrid::with_extent(static_cast<int>(n_cells), r_max);
  config.grid.validate();

  if (j.contains("evolution")) {
    const json& e = j.at("evolution");
    if (!e.is_object()) throw ConfigError("evolution must be an object");
    reject_unknown_keys(e, "evolution",
                        {"dt_factor", "t_max", "snapshot_stride", "boundary",
                         "blowup_gradient_threshold",
                         "blowup_concentration_radius",
                         "blowup_energy_fraction"});
    EvolutionConfig& ev = config.evolution;
    ev.dt_factor = number_or(e, "dt_factor", ev.dt_factor, "evolution");
    ev.t_max = number_or(e, "t_max", ev.t_max, "evolution");
    ev.snapshot_stride = static_cast<int>(
        integer_or(e, "snapshot_stride", ev.snapshot_stride, "evolution"));
    ev.boundary = boundary_from_string(
        string_or(e, "boundary", to_string(ev.boundary), "evolution"));
    ev.blowup_gradient_threshold =
        number_or(e, "blowup_gradient_threshold", ev.blowup_gradient_threshold,
                  "evolution");
    ev.blowup_concentration_radius =
        number_or(e, "blowup_concentration_radius",
                  ev.blowup_concentration_radius, "evolution");
    ev.blowup_energy_fraction = number_or(
        e, "blowup_energy_fraction", ev.blowup_energy_fraction, "evolution");
    ev.validate();
  }

  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    if (!d.is_object()) throw ConfigError("diagnostics must be an object");
    reject_unknown_keys(d, "diagnostics",
                        {"tail_radii", "virial_radius", "field_stride"});
    DiagnosticsConfig& dg = config.diagnostics;
    if (d.contains("tail_radii")) {
      if (!d.at("tail_radii").is_array()) {
        throw ConfigError("diagnostics: tail_radii must be an array");
      }
      dg.tail_radii.clear();
      for (const json& value : d.at("tail_radii")) {
        if (!value.is_number()) {
          throw ConfigError("diagnostics: tail_radii entries must be numbers");
        }
        dg.tail_radii.push_back(value.get<double>());
      }
    }
    dg.virial_radius =
        number_or(d, "virial_radius", dg.virial_radius, "diagnostics");
    dg.field_stride = static_cast<int>(
        integer_or(d, "field_stride", dg.field_stride, "diagnostics"));
    if (dg.field_stride < 1) {
      throw ConfigError("diagnostics: field_stride must be >= 1");
    }
  }

  if (j.contains("classification")) {
    const json& c = j.at("classification");
    if (!c.is_object()) throw ConfigError("classification must be an object");
    reject_unknown_keys(c, "classification",
                        {"dispersal_energy_fraction", "interior_radius",
                         "snorm_trailing_window", "snorm_increment_fraction",
                         "stationary_factor"});
    ClassificationThresholds& t = config.thresholds;
    t.dispersal_energy_fraction =
        number_or(c, "dispersal_energy_fraction", t.dispersal_energy_fraction,
                  "classification");
    t.interior_radius =
        number_or(c, "interior_radius", t.interior_radius, "classification");
    t.snorm_trailing_window = number_or(c, "snorm_trailing_window",
                                        t.snorm_trailing_window,
                                        "classification");
    t.snorm_increment_fraction =
        number_or(c, "snorm_increment_fraction", t.snorm_increment_fraction,
                  "classification");
    t.stationary_factor = number_or(c, "stationary_factor",
                                    t.stationary_factor, "classification");
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() &&
        !j.at("seed").is_number_integer()) {
      throw ConfigError("scenario: seed must be an integer");
    }
    config.seed = j.at("seed").get<std::uint64_t>();
  }
  return config;
}

json ScenarioConfig::to_canonical_json() const {
  json j;
  j["geometry"] = geometry;

  json id;
  id["family"] = family_name(data.family);
  switch (data.family) {
    case InitialData::Family::gaussian_bump:
      id["a"] = data.a;
      id["r0"] = data.r0;
      id["w"] = data.w;
      break;
    case InitialData::Family::scaled_q:
      id["lambda"] = data.lambda;
      break;
    case InitialData::Family::custom_csv:
      id["path"] = data.path;
      break;
  }
  j["initial_data"] = id;

  j["grid"] = {{"n_cells", grid.n_cells}, {"r_max", grid.r_max()}};
  j["evolution"] = {
      {"dt_factor", evolution.dt_factor},
      {"t_max", evolution.t_max},
      {"snapshot_stride", evolution.snapshot_stride},
      {"boundary", to_string(evolution.boundary)},
      {"blowup_gradient_threshold", evolution.blowup_gradient_threshold},
      {"blowup_concentration_radius", evolution.blowup_concentration_radius},
      {"blowup_energy_fraction", evolution.blowup_energy_fraction},
  };
  j["diagnostics"] = {
      {"tail_radii", diagnostics.tail_radii},
      {"virial_radius", diagnostics.virial_radius},
      {"field_stride", diagnostics.field_stride},
  };
  j["classification"] = {
      {"dispersal_energy_fraction", thresholds.dispersal_energy_fraction},
      {"interior_radius", thresholds.interior_radius},
      {"snorm_trailing_window", thresholds.snorm_trailing_window},
      {"snorm_increment_fraction", thresholds.snorm_increment_fraction},
      {"stationary_factor", thresholds.stationary_factor},
  };
  j["seed"] = seed;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string ScenarioConfig::hash12() const {
  const std::uint64_t hash = fnv1a64(to_canonical_json().dump());
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%012llx",
                static_cast<unsigned long long>(hash & 0xFFFFFFFFFFFFull));
  return buf;
}

FieldState build_initial_state(const ScenarioConfig& config,
                               const TargetGeometry& geometry) {
  const RadialGrid& grid = config.grid;
  const int k = geometry.k();
  switch (config.data.family) {
    case InitialData::Family::gaussian_bump: {
      FieldState state = FieldState::zero(grid, k);
      const double a = config.data.a;
      const double r0 = config.data.r0;
      const double w = config.data.w;
      const double peak = a / ipow(r0, k);
      for (int j = 0; j <= grid.n_cells; ++j) {
        const double dr = grid.r(j) - r0;
        if (std::abs(dr) > 4.0 * w) continue;
        state.v[j] = peak * std::exp(-(dr / w) * (dr / w));
      }
      state.validate();
      return state;
    }
    case InitialData::Family::scaled_q: {
      HarmonicMapProfile profile = solve_harmonic_map(geometry);
      FieldState state = profile.sample_scaled(config.data.lambda, grid);
      state.validate();
      return state;
    }
    case InitialData::Family::custom_csv: {
      FieldState state = read_snapshot_csv(config.data.path, k);
      if (!(state.grid == grid)) {
        throw ConfigError("initial_data: csv grid does not match the "
                          "configured grid");
      }
      state.t = 0.0;
      state.validate();
      return state;
    }
  }
  throw ConfigError("initial_data: unknown family");
}

double support_radius(const FieldState& state) {
  double peak = 0.0;
  for (double value : state.v) peak = std::max(peak, std::abs(value));
  if (peak == 0.0) return 0.0;
  const double floor = 1e-12 * peak;
  for (int j = state.grid.n_cells; j >= 0; --j) {
    if (std::abs(state.v[j]) > floor || std::abs(state.v_t[j]) > floor) {
      return state.grid.r(j);
    }
  }
  return 0.0;
}

RunOutputs run_scenario(const ScenarioConfig& config,
                        const std::filesystem::path& out_root) {
  TargetGeometry geometry = TargetGeometry::from_json(config.geometry);
  const json canonical = config.to_canonical_json();

  RunOutputs out;
  out.dir = out_root / config.hash12();
  if (std::filesystem::exists(out.dir / "summary.json")) {
    const json summary = load_json(out.dir / "summary.json");
    out.record.classification = classification_from_string(
        summary.value("classification", "undecided"));
    out.record.e_initial = summary.value("e_initial", 0.0);
    out.record.e_drift_rel = summary.value("e_drift_rel", 0.0);
    if (summary.contains("triggers")) {
      for (const json& t : summary.at("triggers")) {
        out.record.triggers.push_back(t.get<std::string>());
      }
    }
    out.record.config = canonical;
    out.reused = true;
    return out;
  }

  FieldState initial = build_initial_state(config, geometry);
  if (config.evolution.boundary == BoundaryMode::dirichlet_zero) {
    const double needed = support_radius(initial) + config.evolution.t_max +
                          2.0 * config.grid.h;
    if (config.grid.r_max() < needed) {
      throw ConfigError(
          "grid: r_max " + format_double(config.grid.r_max()) +
          " cannot contain the light cone (need >= " + format_double(needed) +
          "); enlarge the grid or use boundary dirichlet_frozen");
    }
  }

  std::filesystem::create_directories(out.dir / "snapshots");
  save_json(out.dir / "config.json", canonical);

  out.record = evolve(initial, geometry, config.evolution, config.diagnostics,
                      config.thresholds);
  out.record.config = canonical;

  write_series_csv(out.dir / "series.csv", out.record);
  for (std::size_t i = 0; i < out.record.snapshots.size(); ++i) {
    write_snapshot_csv(out.dir / "snapshots" / snapshot_name(i),
                       out.record.snapshots[i]);
  }
  write_checkpoint(out.dir / "final.ckpt", out.record.snapshots.back());

  json summary;
  summary["classification"] = to_string(out.record.classification);
  summary["e_initial"] = out.record.e_initial;
  summary["e_drift_rel"] = out.record.e_drift_rel;
  summary["triggers"] = out.record.triggers;
  save_json(out.dir / "summary.json", summary);
  return out;
}

json SweepResult::to_json() const {
  json j;
  j["parameter"] = parameter;
  j["entries"] = json::array();
  for (const SweepEntry& entry : entries) {
    json e;
    e["value"] = entry.value;
    e["classification"] = entry.classification;
    e["e_initial"] = entry.e_initial;
    e["dir"] = entry.dir;
    e["error"] = entry.error;
    j["entries"].push_back(e);
  }
  return j;
}

SweepResult run_sweep(const ScenarioConfig& base, const std::string& parameter,
                      const std::vector<double>& values, int parallelism,
                      const std::filesystem::path& out_root) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  const json base_json = base.to_canonical_json();

  // Build every config up front so path typos fail before any run starts.
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (double value : values) {
    json j = base_json;
    set_by_path(j, parameter, format_double(value));
    configs.push_back(ScenarioConfig::from_json(j));
  }

  SweepResult result;
  result.parameter = parameter;
  result.entries.resize(values.size());

  int workers = parallelism < 1 ? 1 : parallelism;
  const int cap = env_thread_cap();
  if (cap > 0) workers = std::min(workers, cap);
  workers = std::min<int>(workers, static_cast<int>(values.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      SweepEntry& entry = result.entries[i];
      entry.value = values[i];
      try {
        RunOutputs run = run_scenario(configs[i], out_root);
        entry.classification = to_string(run.record.classification);
        entry.e_initial = run.record.e_initial;
        entry.dir = run.dir.string();
      } catch (const std::exception& error) {
        entry.error = error.what();
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

json report_thresholds(const TargetGeometry& geometry) {
  json j;
  j["kind"] = geometry.kind_name();
  j["k"] = geometry.k();
  j["c_star"] = geometry.c_star();
  j["d_star"] = geometry.d_star();
  j["energy_threshold"] = geometry.energy_threshold();
  j["h_zero"] = geometry.h_at_zero();
  j["K_table"] = json::array();
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    const double energy = frac * geometry.energy_threshold();
    json row;
    row["energy"] = energy;
    try {
      row["K"] = geometry.K(energy);
    } catch (const DomainError&) {
      row["K"] = nullptr;
    }
    j["K_table"].push_back(row);
  }
  return j;
}

void set_by_path(json& doc, const std::string& dotted,
                 const std::string& value) {
  if (dotted.empty()) throw ConfigError("--set: empty key");
  json* node = &doc;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', begin);
    const std::string part = dotted.substr(
        begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (part.empty() || !node->is_object() || !node->contains(part)) {
      throw ConfigError("--set: no config entry at \"" + dotted + "\"");
    }
    node = &node->at(part);
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
  *node = parsed.is_discarded() ? json(value) : parsed;
}

int env_thread_cap() {
  const char* raw = std::getenv("CRITWAVE_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  errno = 0;
  char* end = nullptr;
  const long parsed = std::strtol(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0' || parsed < 0) return 0;
  return static_cast<int>(std::min<long>(parsed, 1024));
}

}  // namespace critwave
