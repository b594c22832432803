#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "critwave/diagnostics.hpp"
#include "critwave/errors.hpp"
#include "critwave/evolution.hpp"
#include "critwave/functionals.hpp"
#include "critwave/geometry.hpp"
#include "critwave/harmonic_map.hpp"
#include "critwave/io.hpp"
#include "critwave/scenario.hpp"

namespace py = pybind11;
using namespace critwave;
using nlohmann::json;

namespace {

json parse_json_str(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError("invalid JSON document");
  return j;
}

std::string run_scenario_json(const std::string& config_text,
                              const std::string& out_root) {
  const ScenarioConfig config =
      ScenarioConfig::from_json(parse_json_str(config_text));
  const RunOutputs run = run_scenario(config, out_root);
  json j;
  j["dir"] = run.dir.string();
  j["reused"] = run.reused;
  j["classification"] = to_string(run.record.classification);
  j["e_initial"] = run.record.e_initial;
  j["e_drift_rel"] = run.record.e_drift_rel;
  j["triggers"] = run.record.triggers;
  return j.dump();
}

std::string run_sweep_json(const std::string& config_text,
                           const std::string& parameter,
                           const std::vector<double>& values, int parallelism,
                           const std::string& out_root) {
  const ScenarioConfig base =
      ScenarioConfig::from_json(parse_json_str(config_text));
  return run_sweep(base, parameter, values, parallelism, out_root)
      .to_json()
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radial critical wave maps: profiles, thresholds, evolution, "
            "scattering diagnostics";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError",
                                        PyExc_RuntimeError);
  py::register_exception<InstabilityError>(m, "InstabilityError",
                                           PyExc_RuntimeError);

  py::class_<TargetGeometry>(m, "Geometry")
      .def_static(
          "from_json_str",
          [](const std::string& text, bool enforce) {
            return TargetGeometry::from_json(parse_json_str(text), enforce);
          },
          py::arg("text"), py::arg("enforce_assumptions") = true)
      .def_property_readonly("k", &TargetGeometry::k)
      .def_property_readonly("kind", &TargetGeometry::kind_name)
      .def("g", &TargetGeometry::g)
      .def("gprime", &TargetGeometry::gprime)
      .def("f", &TargetGeometry::f)
      .def("G", &TargetGeometry::G)
      .def("G_inverse", &TargetGeometry::G_inverse)
      .def("K", &TargetGeometry::K)
      .def("h", &TargetGeometry::h)
      .def_property_readonly("h_zero", &TargetGeometry::h_at_zero)
      .def_property_readonly("c_star", &TargetGeometry::c_star)
      .def_property_readonly("d_star", &TargetGeometry::d_star)
      .def_property_readonly("energy_threshold",
                             &TargetGeometry::energy_threshold)
      .def("check_assumptions_json",
           [](const TargetGeometry& g) {
             return g.check_assumptions().to_json().dump();
           })
      .def("to_json_str",
           [](const TargetGeometry& g) { return g.to_json().dump(); });

  py::class_<RadialGrid>(m, "Grid")
      .def(py::init([](int n_cells, double r_max) {
             RadialGrid grid = RadialGrid::with_extent(n_cells, r_max);
             grid.validate();
             return grid;
           }),
           py::arg("n_cells"), py::arg("r_max"))
      .def_readonly("n_cells", &RadialGrid::n_cells)
      .def_readonly("h", &RadialGrid::h)
      .def_property_readonly("r_max", &RadialGrid::r_max)
      .def("r", &RadialGrid::r);

  py::class_<FieldState>(m, "State")
      .def_static("zero", &FieldState::zero, py::arg("grid"), py::arg("k"))
      .def_readonly("grid", &FieldState::grid)
      .def_readonly("k", &FieldState::k)
      .def_readwrite("t", &FieldState::t)
      .def_property(
          "v", [](const FieldState& s) { return s.v; },
          [](FieldState& s, const std::vector<double>& values) {
            if (values.size() != s.v.size()) {
              throw ConfigError("v size does not match the grid");
            }
            s.v = values;
          })
      .def_property(
          "v_t", [](const FieldState& s) { return s.v_t; },
          [](FieldState& s, const std::vector<double>& values) {
            if (values.size() != s.v_t.size()) {
              throw ConfigError("v_t size does not match the grid");
            }
            s.v_t = values;
          })
      .def("u_values", &FieldState::u_values)
      .def("u_t_values", &FieldState::u_t_values)
      .def("sup_u", &FieldState::sup_u)
      .def("validate", &FieldState::validate);

  py::class_<HarmonicMapProfile>(m, "HarmonicMapProfile")
      .def_readonly("k", &HarmonicMapProfile::k)
      .def_readonly("c_star", &HarmonicMapProfile::c_star)
      .def_readonly("s_min", &HarmonicMapProfile::s_min)
      .def_readonly("s_max", &HarmonicMapProfile::s_max)
      .def_readonly("ds", &HarmonicMapProfile::ds)
      .def_readonly("q", &HarmonicMapProfile::q)
      .def_readonly("dq", &HarmonicMapProfile::dq)
      .def_readonly("energy", &HarmonicMapProfile::energy)
      .def_readonly("residual_max", &HarmonicMapProfile::residual_max)
      .def("value_at_radius", &HarmonicMapProfile::value_at_radius)
      .def("value_at_log_radius", &HarmonicMapProfile::value_at_log_radius)
      .def("sample_scaled", &HarmonicMapProfile::sample_scaled,
           py::arg("lambda_"), py::arg("grid"));

  m.def("solve_harmonic_map",
        [](const TargetGeometry& geometry, double ds) {
          return solve_harmonic_map(geometry, ds);
        },
        py::arg("geometry"), py::arg("ds") = 1e-3);

  py::class_<EnergyReport::Partial>(m, "EnergyPartial")
      .def_readonly("a", &EnergyReport::Partial::a)
      .def_readonly("b", &EnergyReport::Partial::b)
      .def_readonly("value", &EnergyReport::Partial::value);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("e_total", &EnergyReport::e_total)
      .def_readonly("e_kinetic", &EnergyReport::e_kinetic)
      .def_readonly("e_potential", &EnergyReport::e_potential)
      .def_readonly("f_functional", &EnergyReport::f_functional)
      .def_readonly("h_norm_sq", &EnergyReport::h_norm_sq)
      .def_readonly("sup_u", &EnergyReport::sup_u)
      .def_readonly("partials", &EnergyReport::partials);

  m.def("energy_report",
        [](const FieldState& state, const TargetGeometry& geometry,
           const std::vector<std::pair<double, double>>& windows) {
          return energy_report(state, geometry, windows);
        },
        py::arg("state"), py::arg("geometry"),
        py::arg("windows") = std::vector<std::pair<double, double>>{});
  m.def("h_norm_sq", &h_norm_sq);
  m.def("tail_energy", &tail_energy, py::arg("state"), py::arg("radius"));

  py::class_<PointwiseBoundRecord>(m, "PointwiseBoundRecord")
      .def_readonly("violation", &PointwiseBoundRecord::violation)
      .def_readonly("r_lo", &PointwiseBoundRecord::r_lo)
      .def_readonly("r_hi", &PointwiseBoundRecord::r_hi)
      .def_readonly("lhs", &PointwiseBoundRecord::lhs)
      .def_readonly("rhs", &PointwiseBoundRecord::rhs)
      .def_readonly("max_relative_equality_gap",
                    &PointwiseBoundRecord::max_relative_equality_gap);

  m.def("check_pointwise_bound", &check_pointwise_bound, py::arg("state"),
        py::arg("geometry"), py::arg("max_points") = 512);
  m.def("membership_v", &membership_v, py::arg("state"), py::arg("geometry"),
        py::arg("delta"));

  py::class_<NormEquivalenceResult>(m, "NormEquivalenceResult")
      .def_readonly("v_gradient", &NormEquivalenceResult::v_gradient)
      .def_readonly("u_norm", &NormEquivalenceResult::u_norm)
      .def_readonly("margin_a", &NormEquivalenceResult::margin_a)
      .def_readonly("margin_b", &NormEquivalenceResult::margin_b)
      .def_readonly("recorded_lower", &NormEquivalenceResult::recorded_lower)
      .def_readonly("recorded_upper", &NormEquivalenceResult::recorded_upper);
  m.def("norm_equivalence_check", &norm_equivalence_check);

  py::class_<EvolutionConfig>(m, "EvolutionConfig")
      .def(py::init<>())
      .def_readwrite("dt_factor", &EvolutionConfig::dt_factor)
      .def_readwrite("t_max", &EvolutionConfig::t_max)
      .def_readwrite("snapshot_stride", &EvolutionConfig::snapshot_stride)
      .def_readwrite("blowup_gradient_threshold",
                     &EvolutionConfig::blowup_gradient_threshold)
      .def_readwrite("blowup_concentration_radius",
                     &EvolutionConfig::blowup_concentration_radius)
      .def_readwrite("blowup_energy_fraction",
                     &EvolutionConfig::blowup_energy_fraction)
      .def_property(
          "boundary",
          [](const EvolutionConfig& c) { return to_string(c.boundary); },
          [](EvolutionConfig& c, const std::string& name) {
            c.boundary = boundary_from_string(name);
          });

  py::class_<DiagnosticsConfig>(m, "DiagnosticsConfig")
      .def(py::init<>())
      .def_readwrite("tail_radii", &DiagnosticsConfig::tail_radii)
      .def_readwrite("virial_radius", &DiagnosticsConfig::virial_radius)
      .def_readwrite("field_stride", &DiagnosticsConfig::field_stride);

  py::class_<ClassificationThresholds>(m, "ClassificationThresholds")
      .def(py::init<>())
      .def_readwrite("dispersal_energy_fraction",
                     &ClassificationThresholds::dispersal_energy_fraction)
      .def_readwrite("interior_radius",
                     &ClassificationThresholds::interior_radius)
      .def_readwrite("snorm_trailing_window",
                     &ClassificationThresholds::snorm_trailing_window)
      .def_readwrite("snorm_increment_fraction",
                     &ClassificationThresholds::snorm_increment_fraction)
      .def_readwrite("stationary_factor",
                     &ClassificationThresholds::stationary_factor);

  py::class_<SeriesRow>(m, "SeriesRow")
      .def_readonly("t", &SeriesRow::t)
      .def_readonly("e_total", &SeriesRow::e_total)
      .def_readonly("e_kinetic", &SeriesRow::e_kinetic)
      .def_readonly("sup_u", &SeriesRow::sup_u)
      .def_readonly("sup_vr", &SeriesRow::sup_vr)
      .def_readonly("tails", &SeriesRow::tails)
      .def_readonly("virial1", &SeriesRow::virial1)
      .def_readonly("virial2", &SeriesRow::virial2)
      .def_readonly("virial_main1", &SeriesRow::virial_main1)
      .def_readonly("virial_main2", &SeriesRow::virial_main2)
      .def_readonly("virial_tail", &SeriesRow::virial_tail)
      .def_readonly("snorm_acc", &SeriesRow::snorm_acc);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("geometry_tag", &RunRecord::geometry_tag)
      .def_readonly("dt", &RunRecord::dt)
      .def_readonly("series", &RunRecord::series)
      .def_readonly("snapshots", &RunRecord::snapshots)
      .def_readonly("triggers", &RunRecord::triggers)
      .def_property_readonly(
          "classification",
          [](const RunRecord& r) { return to_string(r.classification); })
      .def_readonly("e_initial", &RunRecord::e_initial)
      .def_readonly("e_drift_rel", &RunRecord::e_drift_rel);

  m.def("step",
        [](const FieldState& state, const TargetGeometry& geometry, double dt,
           const std::string& boundary) {
          return step(state, geometry, dt, boundary_from_string(boundary));
        },
        py::arg("state"), py::arg("geometry"), py::arg("dt"),
        py::arg("boundary") = "dirichlet_zero");
  m.def("linear_step",
        [](const FieldState& state, double dt, const std::string& boundary) {
          return linear_step(state, dt, boundary_from_string(boundary));
        },
        py::arg("state"), py::arg("dt"),
        py::arg("boundary") = "dirichlet_zero");

  m.def("evolve",
        [](const FieldState& initial, const TargetGeometry& geometry,
           const EvolutionConfig& config, const DiagnosticsConfig& diag,
           const ClassificationThresholds& thresholds) {
          return evolve(initial, geometry, config, diag, thresholds);
        },
        py::arg("initial"), py::arg("geometry"),
        py::arg("config") = EvolutionConfig{},
        py::arg("diagnostics") = DiagnosticsConfig{},
        py::arg("thresholds") = ClassificationThresholds{},
        py::call_guard<py::gil_scoped_release>());

  m.def("compare_to_linear", &compare_to_linear, py::arg("record"),
        py::arg("t_fit"), py::arg("horizon"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<VirialResiduals>(m, "VirialResiduals")
      .def_readonly("t", &VirialResiduals::t)
      .def_readonly("res1", &VirialResiduals::res1)
      .def_readonly("res2", &VirialResiduals::res2)
      .def_readonly("bound", &VirialResiduals::bound)
      .def_readonly("c_phi", &VirialResiduals::c_phi);
  m.def("virial_residuals", &virial_residuals);
  m.def("snorm_series", &snorm_series);
  m.def("snorm_trailing_increment", &snorm_trailing_increment,
        py::arg("record"), py::arg("window") = 0.10);

  py::class_<CoercivityScan>(m, "CoercivityScan")
      .def_readonly("c_emp", &CoercivityScan::c_emp)
      .def_readonly("delta", &CoercivityScan::delta)
      .def_readonly("n_profiles", &CoercivityScan::n_profiles)
      .def_readonly("seed", &CoercivityScan::seed)
      .def_readonly("min_ratio", &CoercivityScan::min_ratio)
      .def_readonly("max_ratio", &CoercivityScan::max_ratio)
      .def_readonly("all_positive", &CoercivityScan::all_positive)
      .def_readonly("resampled", &CoercivityScan::resampled)
      .def_readonly("worst_low", &CoercivityScan::worst_low)
      .def_readonly("worst_high", &CoercivityScan::worst_high);
  m.def("coercivity_scan", &coercivity_scan, py::arg("geometry"),
        py::arg("delta"), py::arg("n_profiles"), py::arg("seed"),
        py::arg("grid"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  m.def("thresholds_json", [](const TargetGeometry& geometry) {
    return report_thresholds(geometry).dump();
  });
  m.def("run_scenario_json", &run_scenario_json, py::arg("config_text"),
        py::arg("out_root"), py::call_guard<py::gil_scoped_release>());
  m.def("run_sweep_json", &run_sweep_json, py::arg("config_text"),
        py::arg("parameter"), py::arg("values"), py::arg("parallelism"),
        py::arg("out_root"), py::call_guard<py::gil_scoped_release>());

  m.def("write_snapshot_csv", &write_snapshot_csv, py::arg("path"),
        py::arg("state"));
  m.def("read_snapshot_csv", &read_snapshot_csv, py::arg("path"),
        py::arg("k"));
  m.def("format_double", &format_double);
}
