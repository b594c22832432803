#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critwave/diagnostics.hpp"
#include "critwave/errors.hpp"
#include "critwave/evolution.hpp"
#include "critwave/functionals.hpp"
#include "critwave/geometry.hpp"
#include "critwave/harmonic_map.hpp"
#include "critwave/io.hpp"
#include "critwave/scenario.hpp"

namespace {

using critwave::ScenarioConfig;
using critwave::TargetGeometry;
using nlohmann::json;

struct CommonArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* sub, CommonArgs& args, bool out_required) {
  sub->add_option("--config", args.config, "JSON configuration file")
      ->required();
  sub->add_option("--set", args.sets,
                  "Override a config entry by dotted path, e.g. "
                  "--set grid.n_cells=8192");
  auto* out = sub->add_option("--out", args.out, "Output directory");
  if (out_required) out->required();
}

json load_config(const CommonArgs& args) {
  json cfg = critwave::load_json(args.config);
  for (const std::string& assignment : args.sets) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw critwave::ConfigError("--set expects key=value, got \"" +
                                  assignment + "\"");
    }
    critwave::set_by_path(cfg, assignment.substr(0, eq),
                          assignment.substr(eq + 1));
  }
  return cfg;
}

std::filesystem::path ensure_out(const std::string& out) {
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    std::size_t comma = csv.find(',', begin);
    if (comma == std::string::npos) comma = csv.size();
    const std::string token = csv.substr(begin, comma - begin);
    if (token.empty()) {
      throw critwave::ConfigError("--values: empty entry in \"" + csv + "\"");
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw critwave::ConfigError("--values: \"" + token +
                                  "\" is not a number");
    }
    begin = comma + 1;
  }
  return values;
}

int run_check_geometry(const CommonArgs& args) {
  const json cfg = load_config(args);
  TargetGeometry geometry =
      TargetGeometry::from_json(cfg, /*enforce_assumptions=*/false);
  const critwave::AssumptionReport report = geometry.check_assumptions();

  json doc;
  doc["geometry"] = geometry.to_json();
  doc["assumptions"] = report.to_json();
  std::cout << doc.dump(2) << "\n";
  if (!args.out.empty()) {
    critwave::save_json(ensure_out(args.out) / "geometry_report.json", doc);
  }
  if (!report.all_pass()) {
    throw critwave::GeometryError("assumption failure: " +
                                  report.worst.assumption);
  }
  return 0;
}

int run_harmonic_map(const CommonArgs& args, double ds) {
  const json cfg = load_config(args);
  TargetGeometry geometry = TargetGeometry::from_json(cfg);
  const critwave::HarmonicMapProfile profile =
      critwave::solve_harmonic_map(geometry, ds);

  json doc;
  doc["kind"] = geometry.kind_name();
  doc["k"] = geometry.k();
  doc["c_star"] = geometry.c_star();
  doc["s_min"] = profile.s_min;
  doc["s_max"] = profile.s_max;
  doc["ds"] = profile.ds;
  doc["energy"] = profile.energy;
  doc["energy_threshold"] = geometry.energy_threshold();
  doc["residual_max"] = profile.residual_max;
  doc["origin_coef"] = profile.origin_coef;
  doc["tail_coef"] = profile.tail_coef;
  doc["tail_rate"] = profile.tail_rate;
  std::cout << doc.dump(2) << "\n";
  if (!args.out.empty()) {
    const std::filesystem::path dir = ensure_out(args.out);
    critwave::write_profile_csv(dir / "profile.csv", profile);
    critwave::save_json(dir / "profile.json", doc);
  }
  return 0;
}

int run_thresholds(const CommonArgs& args) {
  const json cfg = load_config(args);
  TargetGeometry geometry = TargetGeometry::from_json(cfg);
  const json doc = critwave::report_thresholds(geometry);
  std::cout << doc.dump(2) << "\n";
  if (!args.out.empty()) {
    critwave::save_json(ensure_out(args.out) / "thresholds.json", doc);
  }
  return 0;
}

int run_evolve(const CommonArgs& args) {
  const ScenarioConfig config = ScenarioConfig::from_json(load_config(args));
  const critwave::RunOutputs run =
      critwave::run_scenario(config, ensure_out(args.out));
  std::cout << "run " << run.dir.string()
            << (run.reused ? " (reused)" : "") << "\n"
            << "classification " << to_string(run.record.classification)
            << "\n"
            << "e_initial " << critwave::format_double(run.record.e_initial)
            << "\n"
            << "e_drift_rel "
            << critwave::format_double(run.record.e_drift_rel) << "\n";
  for (const std::string& trigger : run.record.triggers) {
    std::cout << "trigger " << trigger << "\n";
  }
  return 0;
}

int run_sweep_cmd(const CommonArgs& args, const std::string& parameter,
                  const std::string& values_csv, int parallelism) {
  const ScenarioConfig base = ScenarioConfig::from_json(load_config(args));
  const std::vector<double> values = parse_value_list(values_csv);
  const std::filesystem::path dir = ensure_out(args.out);
  const critwave::SweepResult result =
      critwave::run_sweep(base, parameter, values, parallelism, dir);

  critwave::save_json(dir / "sweep.json", result.to_json());
  std::ofstream csv(dir / "sweep.csv", std::ios::binary);
  csv << "value,classification,e_initial,dir,error\n";
  for (const critwave::SweepEntry& entry : result.entries) {
    csv << critwave::format_double(entry.value) << ','
        << entry.classification << ','
        << critwave::format_double(entry.e_initial) << ',' << entry.dir << ','
        << entry.error << "\n";
  }
  csv.close();

  std::cout << parameter << " -> classification\n";
  for (const critwave::SweepEntry& entry : result.entries) {
    std::cout << critwave::format_double(entry.value) << " -> "
              << (entry.error.empty() ? entry.classification
                                      : "error: " + entry.error)
              << "\n";
  }
  return 0;
}

int run_lemma7_scan(const CommonArgs& args, double delta, int profiles,
                    std::uint64_t seed, int threads, int n_cells,
                    double r_max) {
  const json cfg = load_config(args);
  TargetGeometry geometry = TargetGeometry::from_json(cfg);
  if (delta <= 0.0) delta = 0.1 * geometry.energy_threshold();
  const critwave::RadialGrid grid =
      critwave::RadialGrid::with_extent(n_cells, r_max);
  const int cap = critwave::env_thread_cap();
  if (cap > 0) threads = threads == 0 ? cap : std::min(threads, cap);

  const critwave::CoercivityScan scan =
      critwave::coercivity_scan(geometry, delta, profiles, seed, grid,
                                threads);

  const std::filesystem::path dir = ensure_out(args.out);
  critwave::write_snapshot_csv(dir / "worst_low.csv", scan.worst_low);
  critwave::write_snapshot_csv(dir / "worst_high.csv", scan.worst_high);

  json doc;
  doc["c_emp"] = scan.c_emp;
  doc["delta"] = scan.delta;
  doc["n"] = scan.n_profiles;
  doc["seed"] = scan.seed;
  doc["min_ratio"] = scan.min_ratio;
  doc["max_ratio"] = scan.max_ratio;
  doc["all_positive"] = scan.all_positive;
  doc["resampled"] = scan.resampled;
  doc["worst_low"] = {{"ratio", scan.min_ratio}, {"csv", "worst_low.csv"}};
  doc["worst_high"] = {{"ratio", scan.max_ratio}, {"csv", "worst_high.csv"}};
  critwave::save_json(dir / "lemma7.json", doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int run_virial_report(const CommonArgs& args) {
  const ScenarioConfig config = ScenarioConfig::from_json(load_config(args));
  TargetGeometry geometry = TargetGeometry::from_json(config.geometry);
  const critwave::FieldState initial =
      critwave::build_initial_state(config, geometry);
  const critwave::RunRecord record =
      critwave::evolve(initial, geometry, config.evolution,
                       config.diagnostics, config.thresholds);
  const critwave::VirialResiduals res = critwave::virial_residuals(record);

  const std::filesystem::path dir = ensure_out(args.out);
  critwave::write_series_csv(dir / "series.csv", record);
  std::ofstream csv(dir / "virial.csv", std::ios::binary);
  csv << "t,res1,res2,bound\n";
  double worst1 = 0.0;
  double worst2 = 0.0;
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    csv << critwave::format_double(res.t[i]) << ','
        << critwave::format_double(res.res1[i]) << ','
        << critwave::format_double(res.res2[i]) << ','
        << critwave::format_double(res.bound[i]) << "\n";
    worst1 = std::max(worst1, res.res1[i]);
    worst2 = std::max(worst2, res.res2[i]);
  }
  csv.close();

  std::cout << "c_phi " << critwave::format_double(res.c_phi) << "\n"
            << "max |dv1/dt - main1| " << critwave::format_double(worst1)
            << "\n"
            << "max |dv2/dt - main2| " << critwave::format_double(worst2)
            << "\n"
            << "e_initial " << critwave::format_double(record.e_initial)
            << "\n"
            << "classification " << to_string(record.classification) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial critical wave map toolkit: equivariant profiles, "
               "energy thresholds, v-form evolution, and scattering "
               "diagnostics"};
  app.require_subcommand(1);

  CommonArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check-geometry", "Run the structural assumption checks on a geometry");
  add_common(check, check_args, /*out_required=*/false);

  CommonArgs hm_args;
  double hm_ds = 1e-3;
  CLI::App* hm = app.add_subcommand(
      "harmonic-map", "Integrate the equivariant harmonic map profile");
  add_common(hm, hm_args, /*out_required=*/false);
  hm->add_option("--ds", hm_ds, "Log-radius step (default 1e-3)");

  CommonArgs th_args;
  CLI::App* th = app.add_subcommand(
      "thresholds", "Report C*, D*, E(Q), h(0) and the K(E) table");
  add_common(th, th_args, /*out_required=*/false);

  CommonArgs ev_args;
  CLI::App* ev = app.add_subcommand(
      "evolve", "Run one scenario into a hash-named run directory");
  add_common(ev, ev_args, /*out_required=*/true);

  CommonArgs sw_args;
  std::string sw_param;
  std::string sw_values;
  int sw_parallel = 1;
  CLI::App* sw = app.add_subcommand(
      "sweep", "Run a scenario family over a list of parameter values");
  add_common(sw, sw_args, /*out_required=*/true);
  sw->add_option("--param", sw_param, "Dotted config path, e.g. "
                                      "initial_data.a")
      ->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required();
  sw->add_option("--parallel", sw_parallel, "Worker pool size (default 1)");

  CommonArgs l7_args;
  double l7_delta = 0.0;
  int l7_profiles = 200;
  std::uint64_t l7_seed = 1;
  int l7_threads = 0;
  int l7_cells = 2048;
  double l7_rmax = 32.0;
  CLI::App* l7 = app.add_subcommand(
      "lemma7-scan",
      "Randomized coercivity scan of F over the variational class");
  add_common(l7, l7_args, /*out_required=*/true);
  l7->add_option("--delta", l7_delta,
                 "Energy margin (default 0.1 * threshold)");
  l7->add_option("--profiles", l7_profiles, "Number of profiles");
  l7->add_option("--seed", l7_seed, "Base seed");
  l7->add_option("--threads", l7_threads, "Worker threads (0 = hardware)");
  l7->add_option("--n-cells", l7_cells, "Scan grid cells");
  l7->add_option("--r-max", l7_rmax, "Scan grid extent");

  CommonArgs vr_args;
  CLI::App* vr = app.add_subcommand(
      "virial-report", "Evolve a scenario and report virial residuals");
  add_common(vr, vr_args, /*out_required=*/true);

  try {
    app.parse(argc, argv);
    if (check->parsed()) return run_check_geometry(check_args);
    if (hm->parsed()) return run_harmonic_map(hm_args, hm_ds);
    if (th->parsed()) return run_thresholds(th_args);
    if (ev->parsed()) return run_evolve(ev_args);
    if (sw->parsed()) {
      return run_sweep_cmd(sw_args, sw_param, sw_values, sw_parallel);
    }
    if (l7->parsed()) {
      return run_lemma7_scan(l7_args, l7_delta, l7_profiles, l7_seed,
                             l7_threads, l7_cells, l7_rmax);
    }
    if (vr->parsed()) return run_virial_report(vr_args);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const critwave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const critwave::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const critwave::InstabilityError& e) {
    std::cerr << "instability: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
