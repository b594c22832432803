#include <doctest.h>

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/evolution.hpp"
#include "critwave/functionals.hpp"
#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"
#include "critwave/harmonic_map.hpp"

using critwave::BoundaryMode;
using critwave::Classification;
using critwave::ConfigError;
using critwave::EvolutionConfig;
using critwave::FieldState;
using critwave::RadialGrid;
using critwave::RunRecord;
using critwave::TargetGeometry;

namespace {

TargetGeometry sphere() { return TargetGeometry::from_json({{"kind", "sphere"}}); }

FieldState bump(const RadialGrid& grid, int k, double a, double r0, double w) {
  FieldState state = FieldState::zero(grid, k);
  for (int j = 1; j <= grid.n_cells; ++j) {
    double r = grid.r(j);
    if (std::abs(r - r0) > 4.0 * w) continue;
    double u = a * std::pow(r / r0, k) * std::exp(-(r - r0) * (r - r0) / (w * w));
    state.v[j] = u / std::pow(r, k);
  }
  return state;
}

double sup_diff(const FieldState& a, const FieldState& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.v.size(); ++j) {
    worst = std::max(worst, std::abs(a.v[j] - b.v[j]));
  }
  return worst;
}

}  // namespace

TEST_CASE("evolution: step preconditions") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(64, 16.0);
  FieldState state = FieldState::zero(grid, 1);
  CHECK_THROWS_AS(critwave::step(state, geo, 0.6 * grid.h), ConfigError);

  FieldState wrong_k = FieldState::zero(grid, 2);
  CHECK_THROWS_AS(critwave::step(wrong_k, geo, 0.1 * grid.h), ConfigError);
}

TEST_CASE("evolution: time symmetry of the integrator") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(1024, 20.0);
  FieldState initial = bump(grid, 1, 0.5, 3.0, 1.0);

  double dt = 0.25 * grid.h;
  FieldState state = initial;
  for (int i = 0; i < 400; ++i) state = critwave::step(state, geo, dt);
  for (double& w : state.v_t) w = -w;
  for (int i = 0; i < 400; ++i) state = critwave::step(state, geo, dt);

  CHECK(sup_diff(state, initial) <= 1e-9);
}

TEST_CASE("evolution: second order convergence under grid refinement") {
  TargetGeometry geo = sphere();
  double t_end = 1.0;
  auto solve = [&](int n) {
    RadialGrid grid = RadialGrid::with_extent(n, 16.0);
    FieldState state = bump(grid, 1, 0.5, 3.0, 1.0);
    double dt = 0.25 * grid.h;
    int steps = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < steps; ++i) state = critwave::step(state, geo, dt);
    return state;
  };

  FieldState coarse = solve(512);
  FieldState mid = solve(1024);
  FieldState fine = solve(2048);

  // compare on the coarse nodes; ratio ~ 4 at second order
  double e_coarse = 0.0;
  double e_mid = 0.0;
  for (int j = 0; j <= 512; ++j) {
    e_coarse = std::max(e_coarse, std::abs(coarse.v[j] - fine.v[4 * j]));
    e_mid = std::max(e_mid, std::abs(mid.v[2 * j] - fine.v[4 * j]));
  }
  double ratio = e_coarse / e_mid;
  CHECK(ratio > 2.8);
  CHECK(ratio < 5.5);
}

TEST_CASE("evolution: boundary modes") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(256, 8.0);

  FieldState state = FieldState::zero(grid, 1);
  for (int j = 0; j <= grid.n_cells; ++j) {
    state.v[j] = 0.3 * std::exp(-grid.r(j));
  }
  double held = state.v.back();

  FieldState frozen = state;
  FieldState zeroed = state;
  for (int i = 0; i < 50; ++i) {
    frozen = critwave::step(frozen, geo, 0.25 * grid.h,
                            BoundaryMode::dirichlet_frozen);
    zeroed = critwave::step(zeroed, geo, 0.25 * grid.h,
                            BoundaryMode::dirichlet_zero);
  }
  CHECK(frozen.v.back() == held);
  CHECK(zeroed.v.back() == 0.0);
  CHECK(frozen.v_t.back() == 0.0);
}

TEST_CASE("evolution: zero data stays stationary") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(256, 16.0);
  EvolutionConfig config;
  config.t_max = 1.0;
  RunRecord rec = critwave::evolve(FieldState::zero(grid, 1), geo, config);
  CHECK(rec.classification == Classification::stationary);
  CHECK(rec.e_initial == 0.0);
  CHECK(rec.e_drift_rel == 0.0);
  CHECK(rec.triggers.empty());
}

TEST_CASE("evolution: energy conservation on a short run") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(2048, 20.0);
  EvolutionConfig config;
  config.t_max = 5.0;
  RunRecord rec = critwave::evolve(bump(grid, 1, 0.5, 3.0, 1.0), geo, config);
  CHECK(rec.e_drift_rel <= 1e-4);
  CHECK(rec.e_initial == doctest::Approx(1.1687514933256503).epsilon(2e-4));
}

TEST_CASE("evolution: series cadence and monotone bookkeeping") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(512, 16.0);
  EvolutionConfig config;
  config.t_max = 2.0;
  config.snapshot_stride = 16;
  critwave::DiagnosticsConfig diag;
  diag.field_stride = 64;
  RunRecord rec = critwave::evolve(bump(grid, 1, 0.4, 3.0, 1.0), geo, config,
                                   diag);

  REQUIRE(rec.series.size() >= 3);
  for (std::size_t i = 1; i < rec.series.size(); ++i) {
    CHECK(rec.series[i].t > rec.series[i - 1].t);
    CHECK(rec.series[i].snorm_acc >= rec.series[i - 1].snorm_acc);
  }
  REQUIRE(rec.snapshots.size() >= 2);
  CHECK(rec.snapshots.front().t == 0.0);
  CHECK(rec.snapshots.back().t ==
        doctest::Approx(2.0).epsilon(1e-12));

  int steps = static_cast<int>(std::lround(2.0 / rec.dt));
  std::size_t expected = static_cast<std::size_t>(steps / 64) + 1 +
                         (steps % 64 != 0 ? 1 : 0);
  CHECK(rec.snapshots.size() == expected);
}

TEST_CASE("evolution: gradient trigger flags a suspected blowup") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(512, 16.0);
  EvolutionConfig config;
  config.t_max = 2.0;
  config.blowup_gradient_threshold = 1e-4;  // absurdly low on purpose
  RunRecord rec = critwave::evolve(bump(grid, 1, 0.5, 3.0, 1.0), geo, config);
  CHECK(rec.classification == Classification::blowup_suspected);
  REQUIRE_FALSE(rec.triggers.empty());
  CHECK(rec.snapshots.back().t < 2.0);  // exited early
}

TEST_CASE("evolution: harmonic map data is classified stationary") {
  TargetGeometry geo = sphere();
  critwave::HarmonicMapProfile p = critwave::solve_harmonic_map(geo);
  RadialGrid grid = RadialGrid::with_extent(1024, 30.0);
  FieldState q0 = p.sample_scaled(1.0, grid);

  EvolutionConfig config;
  config.t_max = 1.0;
  config.boundary = BoundaryMode::dirichlet_frozen;
  RunRecord rec = critwave::evolve(q0, geo, config);
  CHECK(rec.classification == Classification::stationary);
  CHECK(rec.e_drift_rel <= 1e-5);
}

TEST_CASE("evolution: linear and nonlinear flows differ at cubic order") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(1024, 24.0);
  double dt = 0.25 * grid.h;
  int steps = 200;

  auto diff_at = [&](double a) {
    FieldState nl = bump(grid, 1, a, 3.0, 1.0);
    FieldState lin = nl;
    for (int i = 0; i < steps; ++i) {
      nl = critwave::step(nl, geo, dt);
      lin = critwave::linear_step(lin, dt);
    }
    FieldState d = nl;
    for (std::size_t j = 0; j < d.v.size(); ++j) {
      d.v[j] -= lin.v[j];
      d.v_t[j] -= lin.v_t[j];
    }
    return std::sqrt(critwave::h_norm_sq(d));
  };

  double d1 = diff_at(1e-2);
  double d2 = diff_at(5e-3);
  double scaled = (d1 / std::pow(1e-2, 3)) / (d2 / std::pow(5e-3, 3));
  CHECK(scaled > 0.5);
  CHECK(scaled < 2.0);
}

TEST_CASE("evolution: comparing against the free flow needs a snapshot") {
  TargetGeometry geo = sphere();
  RadialGrid grid = RadialGrid::with_extent(256, 16.0);
  EvolutionConfig config;
  config.t_max = 1.0;
  critwave::DiagnosticsConfig diag;
  diag.field_stride = 128;
  RunRecord rec = critwave::evolve(bump(grid, 1, 0.3, 3.0, 1.0), geo, config,
                                   diag);
  CHECK_THROWS_AS(critwave::compare_to_linear(rec, 0.37, 1.0), ConfigError);
}

TEST_CASE("evolution: config validation") {
  EvolutionConfig config;
  config.dt_factor = 0.7;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.t_max = -1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.snapshot_stride = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  CHECK_THROWS_AS(critwave::boundary_from_string("reflecting"), ConfigError);
}
