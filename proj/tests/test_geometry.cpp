#include <doctest.h>

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/geometry.hpp"

using critwave::ConfigError;
using critwave::DomainError;
using critwave::GeometryError;
using critwave::TargetGeometry;
using nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

TargetGeometry sphere() { return TargetGeometry::from_json({{"kind", "sphere"}}); }
TargetGeometry ym() {
  return TargetGeometry::from_json({{"kind", "yang-mills-shifted"}});
}

TargetGeometry custom_sphere() {
  return TargetGeometry::from_json({{"kind", "custom"},
                                    {"k", 1},
                                    {"g", "sin(rho)"},
                                    {"gp", "cos(rho)"},
                                    {"gpp", "-sin(rho)"}});
}

TargetGeometry custom_ym() {
  return TargetGeometry::from_json({{"kind", "custom"},
                                    {"k", 2},
                                    {"g", "rho*(2-rho)"},
                                    {"gp", "2 - 2*rho"},
                                    {"gpp", "-2"}});
}

}  // namespace

TEST_CASE("geometry: sphere constants and closed forms") {
  TargetGeometry geo = sphere();
  CHECK(geo.k() == 1);
  CHECK(geo.kind_name() == "sphere");
  CHECK(geo.c_star() == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(geo.d_star() == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(geo.energy_threshold() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(geo.h_at_zero() == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));

  CHECK(geo.g(0.8) == doctest::Approx(std::sin(0.8)).epsilon(1e-15));
  CHECK(geo.gprime(0.8) == doctest::Approx(std::cos(0.8)).epsilon(1e-15));
  CHECK(geo.f(0.8) == doctest::Approx(0.49978680152075258).epsilon(1e-14));

  CHECK(geo.G(1.0) == doctest::Approx(0.45969769413186028).epsilon(1e-14));
  CHECK(geo.G(kPi) == doctest::Approx(2.0).epsilon(1e-14));
  // beyond the first zero the accumulated |g| keeps growing
  CHECK(geo.G(4.5) == doctest::Approx(2.7892042005692203).epsilon(1e-14));
  // odd continuation
  CHECK(geo.G(-1.3) == doctest::Approx(-0.73250117137541259).epsilon(1e-14));

  CHECK(geo.G_inverse(0.7) == doctest::Approx(1.2661036727794991).epsilon(1e-10));
  CHECK(geo.K(0.0) == 0.0);
  CHECK(geo.K(1.0) == doctest::Approx(kPi / 3).epsilon(1e-10));
  CHECK(geo.K(2.0) == doctest::Approx(kPi / 2).epsilon(1e-10));

  CHECK(geo.h(1.0) == doctest::Approx(-0.54535128658715915).epsilon(1e-12));
}

TEST_CASE("geometry: yang-mills-shifted constants and closed forms") {
  TargetGeometry geo = ym();
  CHECK(geo.k() == 2);
  CHECK(geo.c_star() == 2.0);
  CHECK(geo.d_star() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(geo.energy_threshold() == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(geo.h_at_zero() == doctest::Approx(-6.0).epsilon(1e-12));

  CHECK(geo.G(1.5) == doctest::Approx(1.125).epsilon(1e-14));
  CHECK(geo.G(2.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(geo.G(3.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  // g(-rho) = -rho(2+rho): not odd, and G reflects that
  CHECK(geo.G(-1.0) == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));

  // closed form h(rho) = 2(rho - 3)
  CHECK(geo.h(1.0) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(geo.h(0.5) == doctest::Approx(-5.0).epsilon(1e-12));

  CHECK(geo.G_inverse(geo.G(1.3)) == doctest::Approx(1.3).epsilon(1e-10));
  CHECK(geo.K(4.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("geometry: builtins pass their own assumption checks") {
  CHECK(sphere().check_assumptions().all_pass());
  CHECK(ym().check_assumptions().all_pass());
}

TEST_CASE("geometry: custom sphere reproduces the builtin") {
  TargetGeometry geo = custom_sphere();
  TargetGeometry ref = sphere();

  CHECK(std::abs(geo.c_star() - kPi) <= 1e-10);
  CHECK(std::abs(geo.d_star() - kPi / 2) <= 1e-8);
  CHECK(std::abs(geo.energy_threshold() - 4.0) <= 1e-8);
  CHECK(std::abs(geo.h_at_zero() + 2.0 / 3.0) <= 1e-9);

  for (double rho : {0.3, 1.0, 2.5, -1.3, 3.9}) {
    CHECK(geo.G(rho) == doctest::Approx(ref.G(rho)).epsilon(1e-9));
  }
  CHECK(geo.G_inverse(geo.G(2.5)) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(geo.check_assumptions().all_pass());
}

TEST_CASE("geometry: custom yang-mills reproduces the builtin") {
  TargetGeometry geo = custom_ym();
  CHECK(std::abs(geo.c_star() - 2.0) <= 1e-10);
  CHECK(std::abs(geo.d_star() - 1.0) <= 1e-8);
  CHECK(std::abs(geo.energy_threshold() - 8.0 / 3.0) <= 1e-8);
  CHECK(std::abs(geo.h_at_zero() + 6.0) <= 1e-9);
  CHECK(geo.G(1.5) == doctest::Approx(1.125).epsilon(1e-9));
  CHECK(geo.check_assumptions().all_pass());
}

TEST_CASE("geometry: f stays consistent with g gprime") {
  for (TargetGeometry geo : {sphere(), ym(), custom_sphere()}) {
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      double rho = -geo.c_star() + 2.0 * geo.c_star() * i / 1000.0;
      worst = std::max(worst,
                       std::abs(geo.f(rho) - geo.g(rho) * geo.gprime(rho)));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("geometry: h matches the raw quotient away from zero") {
  TargetGeometry geo = custom_sphere();
  for (double rho = 2e-3; rho < geo.c_star(); rho += 0.05) {
    double raw = (geo.f(rho) - rho) / (rho * rho * rho);
    CHECK(geo.h(rho) == doctest::Approx(raw).epsilon(1e-6));
  }
  // and is continuous through the blend region
  double lo = geo.h(0.9999e-3);
  double hi = geo.h(1.0001e-3);
  CHECK(std::abs(hi - lo) <= 1e-6);
  CHECK(std::abs(geo.h(5e-4) + 2.0 / 3.0) <= 1e-5);
}

TEST_CASE("geometry: d grows at most quadratically near zero") {
  for (TargetGeometry geo : {sphere(), ym()}) {
    double sup_gp = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      double rho = -geo.c_star() + 2.0 * geo.c_star() * i / 1000.0;
      sup_gp = std::max(sup_gp, std::abs(geo.gprime(rho)));
    }
    for (int i = 1; i <= 1000; ++i) {
      double rho = geo.c_star() * i / 1000.0;
      double d = rho * geo.f(rho);
      CHECK(std::abs(d) <= sup_gp * sup_gp * rho * rho * (1 + 1e-12));
    }
  }
}

TEST_CASE("geometry: domain errors outside the tabulated range") {
  TargetGeometry geo = custom_sphere();
  CHECK_THROWS_AS(geo.G(geo.domain_max() + 0.5), DomainError);
  CHECK_THROWS_AS(geo.G(geo.domain_min() - 0.5), DomainError);
  // K(E) = G^{-1}(E/2); far past the table range there is no preimage
  CHECK_THROWS_AS(geo.K(8.0), DomainError);
}

TEST_CASE("geometry: wrong stated k fails the origin check") {
  json spec = {{"kind", "custom"},
               {"k", 1},
               {"g", "sin(2*rho)"},
               {"gp", "2*cos(2*rho)"},
               {"gpp", "-4*sin(2*rho)"}};
  CHECK_THROWS_AS(TargetGeometry::from_json(spec), GeometryError);

  TargetGeometry geo = TargetGeometry::from_json(spec, false);
  critwave::AssumptionReport rep = geo.check_assumptions();
  CHECK_FALSE(rep.a2);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("geometry: asymmetric derivative fails the comparison check") {
  // g' (rho) - g'(-rho) = 0.08 rho^3 > 0: the reflected slope is smaller
  json spec = {{"kind", "custom"},
               {"k", 1},
               {"g", "sin(rho) - 0.01*rho^3*(4-rho)"},
               {"gp", "cos(rho) - 0.12*rho^2 + 0.04*rho^3"},
               {"gpp", "-sin(rho) - 0.24*rho + 0.12*rho^2"}};
  TargetGeometry geo = TargetGeometry::from_json(spec, false);
  critwave::AssumptionReport rep = geo.check_assumptions();
  CHECK(rep.a1);
  CHECK(rep.a2);
  CHECK_FALSE(rep.a3);
  CHECK_THROWS_AS(TargetGeometry::from_json(spec), GeometryError);
}

TEST_CASE("geometry: g without a positive zero is rejected") {
  json spec = {{"kind", "custom"},
               {"k", 1},
               {"g", "rho"},
               {"gp", "1"},
               {"gpp", "0"}};
  CHECK_THROWS_AS(TargetGeometry::from_json(spec, false), GeometryError);
}

TEST_CASE("geometry: inconsistent supplied derivative is rejected") {
  json spec = {{"kind", "custom"},
               {"k", 1},
               {"g", "sin(rho)"},
               {"gp", "cos(rho) + 0.01"},
               {"gpp", "-sin(rho)"}};
  CHECK_THROWS_AS(TargetGeometry::from_json(spec, false), GeometryError);
}

TEST_CASE("geometry: config validation") {
  CHECK_THROWS_AS(TargetGeometry::from_json({{"kind", "torus"}}), ConfigError);
  CHECK_THROWS_AS(TargetGeometry::from_json(json::object()), ConfigError);
  CHECK_THROWS_AS(TargetGeometry::from_json({{"kind", "custom"},
                                             {"k", 1},
                                             {"g", "sin(rho)"},
                                             {"gp", "cos(rho)"}}),
                  ConfigError);  // gpp missing
  CHECK_THROWS_AS(TargetGeometry::from_json({{"kind", "custom"},
                                             {"k", 3},
                                             {"g", "sin(rho)"},
                                             {"gp", "cos(rho)"},
                                             {"gpp", "-sin(rho)"}}),
                  ConfigError);  // only k = 1, 2 supported
}

TEST_CASE("geometry: report serialization shape") {
  json rep = sphere().check_assumptions().to_json();
  CHECK(rep.contains("a1"));
  CHECK(rep.contains("a2"));
  CHECK(rep.contains("a3"));
  CHECK(rep.contains("worst"));
  CHECK(rep["worst"].contains("assumption"));
  CHECK(rep["worst"].contains("rho"));
  CHECK(rep["worst"].contains("violation"));
}
