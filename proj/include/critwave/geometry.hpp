#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "critwave/expression.hpp"

namespace critwave {

enum class GeometryKind { sphere, yang_mills_shifted, custom };

// Expression sources for a custom target: g and its first two derivatives.
struct CustomSources {
  std::string g;
  std::string gp;
  std::string gpp;
};

// Result of sampling the structural assumptions on the target function.
//   a1: g has a smallest positive zero c_star and g > 0 on (0, c_star)
//   a2: g(0) = 0, g'(0) = k (and g''(0) = 0 when k = 1)
//   a3: g'(-rho) >= g'(rho) on [0, c_star] and g' >= 0 on [0, d_star]
struct AssumptionReport {
  bool a1 = false;
  bool a2 = false;
  bool a3 = false;
  struct Worst {
    std::string assumption;  // "a1" | "a2" | "a3", or "" if all pass cleanly
    double rho = 0.0;
    double violation = 0.0;  // signed margin; positive means violated
  } worst;
  int sample_count = 0;

  bool all_pass() const { return a1 && a2 && a3; }
  nlohmann::json to_json() const;
};

// A radial target geometry: the function g defining the semilinearity,
// its antiderivative-of-|g| G, the derived scales c_star / d_star, and the
// conjugated nonlinearity coefficient h used by the first-order form.
//
// Built-ins use closed forms throughout; custom targets evaluate compiled
// expressions and tabulate G once at construction (Chebyshev nodes + monotone
// cubic interpolation, adaptive Simpson between nodes).
//
// Immutable after construction; safe to share across threads.
class TargetGeometry {
 public:
  static TargetGeometry make_builtin(GeometryKind kind);
  static TargetGeometry parse_custom(const CustomSources& sources, int k,
                                     bool enforce_assumptions = true);
  // JSON spec: {"kind":"sphere"} | {"kind":"yang-mills-shifted"} |
  //            {"kind":"custom","k":1,"g":"...","gp":"...","gpp":"..."}
  static TargetGeometry from_json(const nlohmann::json& spec,
                                  bool enforce_assumptions = true);

  GeometryKind kind() const { return kind_; }
  const std::string& kind_name() const { return kind_name_; }
  int k() const { return k_; }
  const std::optional<CustomSources>& sources() const { return sources_; }
  nlohmann::json to_json() const;

  double g(double rho) const;
  double gprime(double rho) const;
  double gsecond(double rho) const;
  double f(double rho) const;  // g * g'
  double d(double rho) const;  // rho * f(rho)

  // Oriented integral of |g| from 0; increasing, odd-signed around 0.
  double G(double rho) const;
  // Monotone inverse of G on [G(domain_min), G(domain_max)].
  double G_inverse(double y) const;

  double c_star() const { return c_star_; }
  double d_star() const { return d_star_; }
  double energy_threshold() const { return energy_threshold_; }  // 2 G(c_star)

  // Sup-norm bound for fields of potential energy `energy`: G^{-1}(energy/2).
  double K(double energy) const { return G_inverse(0.5 * energy); }

  // Conjugated nonlinearity coefficient,
  //   h(rho) = (f(rho) - k^2 rho) / rho^(1 + 2/k),
  // continued through rho = 0 by its Taylor value with a short linear blend.
  double h(double rho) const;
  double h_at_zero() const { return h_zero_; }

  // Valid evaluation range for G / G_inverse (finite for custom targets).
  double domain_min() const { return domain_min_; }
  double domain_max() const { return domain_max_; }

  AssumptionReport check_assumptions(int sample_count = 2000) const;

 private:
  TargetGeometry() = default;

  void finish_construction(bool enforce_assumptions);
  double integrate_abs_g(double a, double b) const;
  double tabulated_G(double rho) const;

  GeometryKind kind_ = GeometryKind::sphere;
  std::string kind_name_;
  int k_ = 1;
  std::optional<CustomSources> sources_;
  std::optional<Expression> gx_, gpx_, gppx_;

  double c_star_ = 0.0;
  double d_star_ = 0.0;
  double energy_threshold_ = 0.0;
  double h_zero_ = 0.0;
  double domain_min_ = 0.0;
  double domain_max_ = 0.0;

  // G prefix table for custom targets (Chebyshev-Lobatto abscissae with
  // 0 and +-c_star snapped onto nodes). Queries integrate |g| from the
  // nearest node, so table accuracy is set by the quadrature tolerance.
  std::vector<double> tab_rho_, tab_G_;
};

}  // namespace critwave
