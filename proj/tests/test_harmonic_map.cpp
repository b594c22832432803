#include <doctest.h>

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"
#include "critwave/harmonic_map.hpp"

using critwave::ConfigError;
using critwave::HarmonicMapProfile;
using critwave::RadialGrid;
using critwave::TargetGeometry;
using critwave::solve_harmonic_map;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("harmonic map: sphere profile matches 2 arctan r") {
  TargetGeometry geo = TargetGeometry::from_json({{"kind", "sphere"}});
  HarmonicMapProfile p = solve_harmonic_map(geo);

  CHECK(p.k == 1);
  CHECK(p.c_star == doctest::Approx(kPi).epsilon(1e-15));
  // normalization Q(1) = C*/2
  CHECK(p.value_at_log_radius(0.0) == doctest::Approx(kPi / 2).epsilon(1e-12));

  double worst = 0.0;
  for (int i = 0; i <= 800; ++i) {
    double r = std::pow(10.0, -4.0 + 8.0 * i / 800.0);
    worst = std::max(worst, std::abs(p.value_at_radius(r) - 2.0 * std::atan(r)));
  }
  CHECK(worst <= 1e-8);

  CHECK(p.value_at_radius(2.0) ==
        doctest::Approx(2.214297435588181).epsilon(1e-12));
  CHECK(p.energy == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(p.residual_max <= 1e-9);
  CHECK(p.origin_coef == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p.tail_rate == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("harmonic map: yang-mills profile matches 2r^2/(1+r^2)") {
  TargetGeometry geo =
      TargetGeometry::from_json({{"kind", "yang-mills-shifted"}});
  HarmonicMapProfile p = solve_harmonic_map(geo);

  CHECK(p.k == 2);
  double worst = 0.0;
  for (int i = 0; i <= 800; ++i) {
    double r = std::pow(10.0, -4.0 + 8.0 * i / 800.0);
    double exact = 2.0 * r * r / (1.0 + r * r);
    worst = std::max(worst, std::abs(p.value_at_radius(r) - exact));
  }
  CHECK(worst <= 1e-8);
  CHECK(p.energy == doctest::Approx(8.0 / 3.0).epsilon(1e-5));
  CHECK(p.tail_rate == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("harmonic map: profile is strictly increasing within (0, C*)") {
  TargetGeometry geo = TargetGeometry::from_json({{"kind", "sphere"}});
  HarmonicMapProfile p = solve_harmonic_map(geo);
  CHECK(p.q.front() > 0.0);
  CHECK(p.q.back() < p.c_star);
  for (std::size_t j = 1; j < p.q.size(); ++j) CHECK(p.q[j] > p.q[j - 1]);
  // endpoint closeness contract
  CHECK(p.q.front() <= 1e-6);
  CHECK(p.c_star - p.q.back() <= 1e-6);
}

TEST_CASE("harmonic map: scaled sampling in first-order form") {
  TargetGeometry geo = TargetGeometry::from_json({{"kind", "sphere"}});
  HarmonicMapProfile p = solve_harmonic_map(geo);
  RadialGrid grid = RadialGrid::with_extent(1024, 20.0);

  critwave::FieldState state = p.sample_scaled(1.0, grid);
  CHECK(state.k == 1);
  CHECK(state.t == 0.0);
  // v(0) carries the removable limit Q(r)/r -> origin_coef
  CHECK(state.v[0] == doctest::Approx(2.0).epsilon(1e-6));
  for (int j = 1; j <= grid.n_cells; j += 97) {
    double r = grid.r(j);
    CHECK(state.v[j] * r ==
          doctest::Approx(2.0 * std::atan(r)).epsilon(1e-8));
    CHECK(state.v_t[j] == 0.0);
  }

  critwave::FieldState half = p.sample_scaled(0.5, grid);
  CHECK(half.v[17] * grid.r(17) ==
        doctest::Approx(2.0 * std::atan(0.5 * grid.r(17))).epsilon(1e-8));
}

TEST_CASE("harmonic map: step size is validated") {
  TargetGeometry geo = TargetGeometry::from_json({{"kind", "sphere"}});
  CHECK_THROWS_AS(solve_harmonic_map(geo, 0.5), ConfigError);
  CHECK_THROWS_AS(solve_harmonic_map(geo, -1e-3), ConfigError);
}

TEST_CASE("harmonic map: explicit s-range must reach the asymptotic regime") {
  TargetGeometry geo = TargetGeometry::from_json({{"kind", "sphere"}});
  CHECK_THROWS_AS(solve_harmonic_map(geo, 1e-3, -3.0, 3.0), ConfigError);
}
