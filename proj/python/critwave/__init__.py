"""Radial critical wave maps: equivariant profiles, energy thresholds,
v-form evolution, and scattering diagnostics.

Thin convenience layer over the compiled core; JSON-typed entry points
accept and return plain python objects.
"""

import json as _json

from ._core import (  # noqa: F401
    ClassificationThresholds,
    CoercivityScan,
    ConfigError,
    DiagnosticsConfig,
    EnergyReport,
    Error,
    EvolutionConfig,
    Geometry,
    GeometryError,
    Grid,
    HarmonicMapProfile,
    InstabilityError,
    NormEquivalenceResult,
    PointwiseBoundRecord,
    RunRecord,
    SeriesRow,
    State,
    VirialResiduals,
    check_pointwise_bound,
    coercivity_scan,
    compare_to_linear,
    energy_report,
    evolve,
    format_double,
    h_norm_sq,
    linear_step,
    membership_v,
    norm_equivalence_check,
    read_snapshot_csv,
    run_scenario_json,
    run_sweep_json,
    snorm_series,
    snorm_trailing_increment,
    solve_harmonic_map,
    step,
    tail_energy,
    thresholds_json,
    virial_residuals,
    write_snapshot_csv,
)

__version__ = "0.1.0"


def geometry(spec, enforce_assumptions=True):
    """Build a Geometry from a dict spec, e.g. {"kind": "sphere"}."""
    if isinstance(spec, str):
        spec = {"kind": spec}
    return Geometry.from_json_str(_json.dumps(spec), enforce_assumptions)


def thresholds(geom):
    """C*, D*, E(Q), h(0) and the K(E) table as a dict."""
    return _json.loads(thresholds_json(geom))


def check_assumptions(geom):
    return _json.loads(geom.check_assumptions_json())


def run_scenario(config, out_root):
    """Run (or reuse) one scenario; returns the summary as a dict."""
    return _json.loads(run_scenario_json(_json.dumps(config), str(out_root)))


def run_sweep(config, parameter, values, parallelism, out_root):
    """Sweep a dotted config path over values; returns entries as a dict."""
    return _json.loads(
        run_sweep_json(
            _json.dumps(config), parameter, list(values), parallelism,
            str(out_root)
        )
    )
