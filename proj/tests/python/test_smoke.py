"""End-to-end smoke tests for the python bindings.

Deep numerics live in the C++ suite; these only check that the module
surface works, that JSON glue round-trips, and that errors map onto the
expected python exception types.
"""

import json
import math

import pytest

import critwave


def test_builtin_geometry_constants():
    sphere = critwave.geometry("sphere")
    assert sphere.k == 1
    assert sphere.kind == "sphere"
    assert sphere.c_star == pytest.approx(math.pi, abs=1e-10)
    assert sphere.d_star == pytest.approx(math.pi / 2, abs=1e-8)
    assert sphere.energy_threshold == pytest.approx(4.0, abs=1e-9)
    assert sphere.h_zero == pytest.approx(-2.0 / 3.0, abs=1e-6)
    assert sphere.g(math.pi / 2) == pytest.approx(1.0, abs=1e-12)
    assert sphere.G(math.pi) == pytest.approx(2.0, rel=1e-12)
    assert sphere.K(2.0) == pytest.approx(math.pi / 2, rel=1e-9)

    ym = critwave.geometry("yang-mills-shifted")
    assert ym.k == 2
    assert ym.c_star == pytest.approx(2.0, abs=1e-12)
    assert ym.d_star == pytest.approx(1.0, abs=1e-12)
    assert ym.energy_threshold == pytest.approx(8.0 / 3.0, abs=1e-9)
    assert ym.h(1.5) == pytest.approx(-3.0, rel=1e-12)


def test_thresholds_dict():
    report = critwave.thresholds(critwave.geometry("sphere"))
    assert report["kind"] == "sphere"
    assert report["k"] == 1
    assert report["c_star"] == pytest.approx(math.pi, abs=1e-10)
    table = report["K_table"]
    assert len(table) == 4
    assert table[0]["energy"] == pytest.approx(1.0)
    assert table[0]["K"] == pytest.approx(math.pi / 3, rel=1e-9)
    assert table[1]["K"] == pytest.approx(math.pi / 2, rel=1e-9)
    assert table[3]["K"] == pytest.approx(math.pi, rel=1e-5)


def test_custom_geometry_and_assumptions():
    spec = {"kind": "custom", "k": 1, "g": "sin(rho)", "gp": "cos(rho)",
            "gpp": "-sin(rho)"}
    geom = critwave.geometry(spec)
    assert geom.c_star == pytest.approx(math.pi, abs=1e-8)
    report = critwave.check_assumptions(geom)
    assert report["a1"] and report["a2"] and report["a3"]

    # g'(0) = 2 != k breaks the origin normalisation.
    bad = {"kind": "custom", "k": 1, "g": "sin(2*rho)", "gp": "2*cos(2*rho)",
           "gpp": "-4*sin(2*rho)"}
    with pytest.raises(critwave.GeometryError):
        critwave.geometry(bad)
    lax = critwave.geometry(bad, enforce_assumptions=False)
    assert not critwave.check_assumptions(lax)["a2"]


def test_exception_mapping():
    with pytest.raises(ValueError):
        critwave.geometry({"kind": "no-such-geometry"})
    with pytest.raises(critwave.ConfigError):
        critwave.Grid(8, 16.0)
    assert issubclass(critwave.ConfigError, ValueError)
    assert issubclass(critwave.Error, RuntimeError)
    assert issubclass(critwave.GeometryError, RuntimeError)


def test_harmonic_map_profile():
    sphere = critwave.geometry("sphere")
    profile = critwave.solve_harmonic_map(sphere)
    assert profile.k == 1
    assert profile.energy == pytest.approx(4.0, abs=1e-6)
    assert profile.residual_max <= 1e-8
    # Q(r) = 2 arctan(r) for the sphere.
    assert profile.value_at_radius(1.0) == pytest.approx(math.pi / 2,
                                                         abs=1e-9)
    assert profile.value_at_radius(1e6) == pytest.approx(math.pi, abs=1e-5)

    grid = critwave.Grid(256, 16.0)
    state = profile.sample_scaled(1.0, grid)
    assert state.k == 1
    u = state.u_values()
    assert u[0] == 0.0
    assert max(u) <= profile.c_star + 1e-12


def test_state_and_energy():
    grid = critwave.Grid(512, 16.0)
    assert grid.n_cells == 512
    assert grid.h == pytest.approx(16.0 / 512)
    assert grid.r(3) == pytest.approx(3 * grid.h)

    sphere = critwave.geometry("sphere")
    state = critwave.State.zero(grid, sphere.k)
    assert state.t == 0.0
    v = [0.05 * math.exp(-((grid.r(j) - 2.0) ** 2)) for j in
         range(grid.n_cells + 1)]
    v[0] = 0.0
    state.v = v
    state.validate()
    report = critwave.energy_report(state, sphere)
    assert report.e_kinetic == 0.0
    assert 0.0 < report.e_total < 1.0
    assert report.h_norm_sq > 0.0
    assert critwave.tail_energy(state, 8.0) < report.h_norm_sq

    bound = critwave.check_pointwise_bound(state, sphere)
    assert not bound.violation
    assert critwave.membership_v(state, sphere, 0.5)
    eq = critwave.norm_equivalence_check(state)
    assert eq.margin_a >= 0.0 and eq.margin_b >= 0.0

    with pytest.raises(critwave.ConfigError):
        state.v = [0.0, 1.0]


def test_small_evolution():
    sphere = critwave.geometry("sphere")
    grid = critwave.Grid(256, 12.0)
    state = critwave.State.zero(grid, 1)
    v = [0.1 * math.exp(-((grid.r(j) - 2.0) ** 2)) for j in
         range(grid.n_cells + 1)]
    v[0] = 0.0
    state.v = v

    cfg = critwave.EvolutionConfig()
    cfg.t_max = 1.0
    cfg.snapshot_stride = 16
    cfg.boundary = "dirichlet_frozen"
    diag = critwave.DiagnosticsConfig()
    diag.field_stride = 64
    record = critwave.evolve(state, sphere, cfg, diag)
    assert record.classification in ("stationary", "dispersed", "undecided",
                                     "blowup_suspected")
    assert record.triggers == []
    # Coarse smoke grid: the discrete energy functional carries an O(h^2)
    # shape-dependent bias, so only a loose drift bound is meaningful here.
    assert record.e_drift_rel < 1e-2
    assert record.series[0].t == 0.0
    assert record.series[-1].t == pytest.approx(1.0, abs=record.dt)
    assert len(record.snapshots) >= 2

    res = critwave.virial_residuals(record)
    assert len(res.t) == len(record.series) - 2
    snorm = [value for _, value in critwave.snorm_series(record)]
    assert all(b >= a - 1e-12 for a, b in zip(snorm, snorm[1:]))


def test_run_scenario_dict_glue(tmp_path):
    config = {
        "geometry": {"kind": "sphere"},
        "initial_data": {"family": "gaussian-bump", "a": 0.2, "r0": 2.0,
                         "w": 0.5},
        "grid": {"n_cells": 256, "r_max": 12.0},
        "evolution": {"t_max": 1.0, "snapshot_stride": 16,
                      "boundary": "dirichlet_frozen"},
    }
    first = critwave.run_scenario(config, tmp_path)
    assert set(first) >= {"dir", "reused", "classification", "e_initial",
                          "e_drift_rel", "triggers"}
    assert not first["reused"]
    assert first["e_initial"] > 0.0

    run_dir = tmp_path / first["dir"]
    assert (run_dir / "summary.json").is_file()
    assert (run_dir / "series.csv").is_file()
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["classification"] == first["classification"]

    again = critwave.run_scenario(config, tmp_path)
    assert again["reused"]
    assert again["dir"] == first["dir"]

    bad = dict(config, unexpected=1)
    with pytest.raises(ValueError):
        critwave.run_scenario(bad, tmp_path)


def test_run_sweep_dict_glue(tmp_path):
    config = {
        "geometry": {"kind": "sphere"},
        "initial_data": {"family": "gaussian-bump", "a": 0.2, "r0": 2.0,
                         "w": 0.5},
        "grid": {"n_cells": 256, "r_max": 12.0},
        "evolution": {"t_max": 0.5, "snapshot_stride": 16,
                      "boundary": "dirichlet_frozen"},
    }
    sweep = critwave.run_sweep(config, "initial_data.a", [0.1, 0.2], 2,
                               tmp_path)
    entries = sweep["entries"]
    assert [e["value"] for e in entries] == [0.1, 0.2]
    assert all(e["error"] == "" for e in entries)
    assert entries[0]["dir"] != entries[1]["dir"]


def test_format_double_round_trip():
    for x in (math.pi, 1.0 / 3.0, 2.0, -0.125, 6.02e23):
        assert float(critwave.format_double(x)) == x
