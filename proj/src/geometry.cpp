#include "critwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "critwave/errors.hpp"

namespace critwave {

namespace {

constexpr double kPi = std::numbers::pi;

// Blend half-width around rho = 0 for the conjugated coefficient h.
constexpr double kHBlendWidth = 1e-3;

// Root-scan parameters for locating c_star on a custom target.
constexpr double kRootScanStep = 1e-2;
constexpr double kRootScanMax = 50.0;

// G prefix table resolution (Chebyshev-Lobatto node count).
constexpr int kTableNodes = 20001;

double sphere_G(double rho) {
  double a = std::abs(rho);
  double m = std::floor(a / kPi);
  double r = a - m * kPi;
  double v = 2.0 * m + 1.0 - std::cos(r);
  return rho < 0 ? -v : v;
}

double ym_G(double rho) {
  if (rho < 0) return rho * rho * rho / 3.0 - rho * rho;
  if (rho <= 2.0) return rho * rho - rho * rho * rho / 3.0;
  return 8.0 / 3.0 + rho * rho * rho / 3.0 - rho * rho;
}

template <class F>
double simpson_split(const F& f, double a, double m, double b, double fa,
                     double fm, double fb, double whole, double tol,
                     int depth) {
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_split(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_split(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a);
  double fm = f(m);
  double fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double tol = std::max(1e-14, 1e-10 * (1.0 + std::abs(whole)));
  return simpson_split(f, a, m, b, fa, fm, fb, whole, tol, 40);
}

void require_finite(double v, const char* what, double rho) {
  if (!std::isfinite(v)) {
    throw ConfigError(std::string("expression for ") + what +
                      " returned a non-finite value at rho = " +
                      std::to_string(rho));
  }
}

}  // namespace

double TargetGeometry::g(double rho) const {
  switch (kind_) {
    case GeometryKind::sphere:
      return std::sin(rho);
    case GeometryKind::yang_mills_shifted:
      return rho * (2.0 - rho);
    case GeometryKind::custom:
      return (*gx_)(rho);
  }
  return 0.0;
}

double TargetGeometry::gprime(double rho) const {
  switch (kind_) {
    case GeometryKind::sphere:
      return std::cos(rho);
    case GeometryKind::yang_mills_shifted:
      return 2.0 - 2.0 * rho;
    case GeometryKind::custom:
      return (*gpx_)(rho);
  }
  return 0.0;
}

double TargetGeometry::gsecond(double rho) const {
  switch (kind_) {
    case GeometryKind::sphere:
      return -std::sin(rho);
    case GeometryKind::yang_mills_shifted:
      return -2.0;
    case GeometryKind::custom:
      return (*gppx_)(rho);
  }
  return 0.0;
}

double TargetGeometry::f(double rho) const { return g(rho) * gprime(rho); }

double TargetGeometry::d(double rho) const { return rho * f(rho); }

double TargetGeometry::integrate_abs_g(double a, double b) const {
  return adaptive_simpson([this](double x) { return std::abs(g(x)); }, a, b);
}

double TargetGeometry::tabulated_G(double rho) const {
  if (rho < domain_min_ || rho > domain_max_) {
    throw DomainError("G queried at rho = " + std::to_string(rho) +
                      " outside tabulated range [" +
                      std::to_string(domain_min_) + ", " +
                      std::to_string(domain_max_) + "]");
  }
  auto it = std::upper_bound(tab_rho_.begin(), tab_rho_.end(), rho);
  std::size_t j = (it == tab_rho_.begin()) ? 0 : (it - tab_rho_.begin() - 1);
  if (rho == tab_rho_[j]) return tab_G_[j];
  return tab_G_[j] + integrate_abs_g(tab_rho_[j], rho);
}

double TargetGeometry::G(double rho) const {
  switch (kind_) {
    case GeometryKind::sphere:
      return sphere_G(rho);
    case GeometryKind::yang_mills_shifted:
      return ym_G(rho);
    case GeometryKind::custom:
      return tabulated_G(rho);
  }
  return 0.0;
}

double TargetGeometry::G_inverse(double y) const {
  if (y == 0.0) return 0.0;  // G(0) = 0 exactly for every geometry
  double lo;
  double hi;
  if (kind_ == GeometryKind::custom) {
    if (y < tab_G_.front() || y > tab_G_.back()) {
      throw DomainError("G_inverse queried at y = " + std::to_string(y) +
                        " outside tabulated range [" +
                        std::to_string(tab_G_.front()) + ", " +
                        std::to_string(tab_G_.back()) + "]");
    }
    auto it = std::upper_bound(tab_G_.begin(), tab_G_.end(), y);
    std::size_t j = (it == tab_G_.begin()) ? 0 : (it - tab_G_.begin() - 1);
    if (j + 1 >= tab_rho_.size()) return tab_rho_.back();
    lo = tab_rho_[j];
    hi = tab_rho_[j + 1];
  } else if (y >= 0.0) {
    lo = 0.0;
    hi = 1.0;
    while (G(hi) < y) {
      hi *= 2.0;
      if (hi > 1e100) throw DomainError("G_inverse bracket overflow");
    }
  } else {
    hi = 0.0;
    lo = -1.0;
    while (G(lo) > y) {
      lo *= 2.0;
      if (lo < -1e100) throw DomainError("G_inverse bracket overflow");
    }
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (G(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double TargetGeometry::h(double rho) const {
  auto quotient = [this](double x) {
    double num = f(x) - static_cast<double>(k_) * k_ * x;
    double den = (k_ == 1) ? x * x * x : x * x;
    return num / den;
  };

  double a = std::abs(rho);
  if (a >= kHBlendWidth) return quotient(rho);
  if (a == 0.0) return h_zero_;
  double edge = quotient(rho < 0 ? -kHBlendWidth : kHBlendWidth);
  double t = a / kHBlendWidth;
  return (1.0 - t) * h_zero_ + t * edge;
}

TargetGeometry TargetGeometry::make_builtin(GeometryKind kind) {
  TargetGeometry geo;
  geo.kind_ = kind;
  switch (kind) {
    case GeometryKind::sphere:
      geo.kind_name_ = "sphere";
      geo.k_ = 1;
      geo.c_star_ = kPi;
      geo.d_star_ = 0.5 * kPi;
      geo.energy_threshold_ = 4.0;
      geo.h_zero_ = -2.0 / 3.0;
      break;
    case GeometryKind::yang_mills_shifted:
      geo.kind_name_ = "yang-mills-shifted";
      geo.k_ = 2;
      geo.c_star_ = 2.0;
      geo.d_star_ = 1.0;
      geo.energy_threshold_ = 8.0 / 3.0;
      geo.h_zero_ = -6.0;
      break;
    case GeometryKind::custom:
      throw ConfigError("make_builtin: custom targets need parse_custom");
  }
  geo.domain_min_ = -std::numeric_limits<double>::infinity();
  geo.domain_max_ = std::numeric_limits<double>::infinity();
  return geo;
}

TargetGeometry TargetGeometry::parse_custom(const CustomSources& sources,
                                            int k, bool enforce_assumptions) {
  if (k != 1 && k != 2) {
    throw ConfigError("custom geometry: k must be 1 or 2");
  }
  TargetGeometry geo;
  geo.kind_ = GeometryKind::custom;
  geo.kind_name_ = "custom";
  geo.k_ = k;
  geo.sources_ = sources;
  geo.gx_ = Expression::parse(sources.g);
  geo.gpx_ = Expression::parse(sources.gp);
  geo.gppx_ = Expression::parse(sources.gpp);
  geo.finish_construction(enforce_assumptions);
  return geo;
}

void TargetGeometry::finish_construction(bool enforce_assumptions) {
  // Locate c_star: first sign change of g on a fixed scan, then bisect.
  double prev = 0.0;
  double root = -1.0;
  for (double rho = kRootScanStep; rho <= kRootScanMax; rho += kRootScanStep) {
    double val = g(rho);
    require_finite(val, "g", rho);
    if (val <= 0.0) {
      double lo = prev;  // g(lo) > 0
      double hi = rho;   // g(hi) <= 0
      for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-13) break;
      }
      root = 0.5 * (lo + hi);
      break;
    }
    prev = rho;
  }
  if (root <= 0.0) {
    throw GeometryError(
        "assumption failure: g has no positive zero in (0, " +
        std::to_string(kRootScanMax) + "]");
  }
  c_star_ = root;

  // Derivative strings must be consistent with g before anything trusts them.
  domain_min_ = -(c_star_ + 1.0);
  domain_max_ = c_star_ + 1.0;
  const double fd = 1e-5;
  for (int i = 0; i <= 200; ++i) {
    double x = domain_min_ + (domain_max_ - domain_min_) * i / 200.0;
    double dg = (g(x + fd) - g(x - fd)) / (2.0 * fd);
    double dgp = (gprime(x + fd) - gprime(x - fd)) / (2.0 * fd);
    double gp = gprime(x);
    double gpp = gsecond(x);
    require_finite(dg, "g", x);
    require_finite(dgp, "gp", x);
    require_finite(gp, "gp", x);
    require_finite(gpp, "gpp", x);
    if (std::abs(dg - gp) > 1e-6 * std::max(1.0, std::abs(gp))) {
      throw GeometryError(
          "custom geometry: gp is inconsistent with g near rho = " +
          std::to_string(x));
    }
    if (std::abs(dgp - gpp) > 1e-6 * std::max(1.0, std::abs(gpp))) {
      throw GeometryError(
          "custom geometry: gpp is inconsistent with gp near rho = " +
          std::to_string(x));
    }
  }

  // Prefix table of G on Chebyshev-Lobatto nodes; snap 0 and +-c_star onto
  // nodes so the corresponding table values are exact anchors.
  tab_rho_.resize(kTableNodes);
  double mid = 0.5 * (domain_min_ + domain_max_);
  double half = 0.5 * (domain_max_ - domain_min_);
  for (int i = 0; i < kTableNodes; ++i) {
    double theta = kPi * i / (kTableNodes - 1);
    tab_rho_[i] = mid - half * std::cos(theta);
  }
  tab_rho_.front() = domain_min_;
  tab_rho_.back() = domain_max_;
  for (double anchor : {0.0, c_star_, -c_star_}) {
    auto it = std::min_element(tab_rho_.begin(), tab_rho_.end(),
                               [anchor](double a, double b) {
                                 return std::abs(a - anchor) <
                                        std::abs(b - anchor);
                               });
    *it = anchor;
  }

  std::size_t zero_idx =
      std::find(tab_rho_.begin(), tab_rho_.end(), 0.0) - tab_rho_.begin();
  tab_G_.assign(kTableNodes, 0.0);
  for (std::size_t i = zero_idx; i + 1 < tab_rho_.size(); ++i) {
    tab_G_[i + 1] = tab_G_[i] + integrate_abs_g(tab_rho_[i], tab_rho_[i + 1]);
  }
  for (std::size_t i = zero_idx; i > 0; --i) {
    tab_G_[i - 1] = tab_G_[i] - integrate_abs_g(tab_rho_[i - 1], tab_rho_[i]);
  }
  for (std::size_t i = 0; i + 1 < tab_G_.size(); ++i) {
    if (!(tab_G_[i + 1] >= tab_G_[i]) || !std::isfinite(tab_G_[i])) {
      throw GeometryError("G tabulation is not monotone; g is not integrable "
                          "or oscillates below scan resolution");
    }
  }

  energy_threshold_ = 2.0 * G(c_star_);

  // d_star solves G(d) = G(c_star)/2 on [0, c_star].
  {
    double target = 0.5 * G(c_star_);
    double lo = 0.0;
    double hi = c_star_;
    for (int i = 0; i < 200; ++i) {
      double m = 0.5 * (lo + hi);
      if (m == lo || m == hi) break;
      if (G(m) < target) {
        lo = m;
      } else {
        hi = m;
      }
    }
    d_star_ = 0.5 * (lo + hi);
  }

  // Taylor value of h at 0. For k = 1 this needs g''' (fourth-order centered
  // stencil on gpp); for k = 2 it is 3 g''(0); higher k vanish.
  if (k_ == 1) {
    const double d = 1e-4;
    double g3 = (-gsecond(2.0 * d) + 8.0 * gsecond(d) - 8.0 * gsecond(-d) +
                 gsecond(-2.0 * d)) /
                (12.0 * d);
    h_zero_ = 2.0 / 3.0 * g3;
  } else if (k_ == 2) {
    h_zero_ = 3.0 * gsecond(0.0);
  } else {
    h_zero_ = 0.0;
  }

  if (enforce_assumptions) {
    AssumptionReport report = check_assumptions();
    if (!report.all_pass()) {
      throw GeometryError("assumption failure: " + report.worst.assumption +
                          " violated by " +
                          std::to_string(report.worst.violation) +
                          " at rho = " + std::to_string(report.worst.rho));
    }
  }
}

AssumptionReport TargetGeometry::check_assumptions(int sample_count) const {
  AssumptionReport rep;
  rep.sample_count = sample_count;
  rep.a1 = rep.a2 = rep.a3 = true;

  bool have_worst = false;
  auto track = [&](const char* which, double rho, double margin, bool* pass,
                   bool strict) {
    bool ok = strict ? (margin < 0.0) : (margin <= 0.0);
    if (!ok) *pass = false;
    if (!have_worst || margin > rep.worst.violation) {
      rep.worst = {which, rho, margin};
      have_worst = true;
    }
  };

  // a1: g > 0 strictly inside (0, c_star), and c_star is a genuine zero.
  for (int i = 1; i <= sample_count; ++i) {
    double rho = c_star_ * i / (sample_count + 1);
    track("a1", rho, -g(rho), &rep.a1, /*strict=*/true);
  }
  track("a1", c_star_, std::abs(g(c_star_)) - 1e-9, &rep.a1, false);

  // a2: behaviour at the origin.
  track("a2", 0.0, std::abs(g(0.0)) - 1e-10, &rep.a2, false);
  track("a2", 0.0, std::abs(gprime(0.0) - k_) - 1e-10, &rep.a2, false);
  if (k_ == 1) {
    track("a2", 0.0, std::abs(gsecond(0.0)) - 1e-10, &rep.a2, false);
  }

  // a3: g'(-rho) >= g'(rho) on [0, c_star]; g' >= 0 on [0, d_star].
  for (int i = 0; i <= sample_count; ++i) {
    double rho = c_star_ * i / sample_count;
    track("a3", rho, gprime(rho) - gprime(-rho) - 1e-9, &rep.a3, false);
  }
  for (int i = 0; i <= sample_count; ++i) {
    double rho = d_star_ * i / sample_count;
    track("a3", rho, -gprime(rho) - 1e-9, &rep.a3, false);
  }
  return rep;
}

nlohmann::json AssumptionReport::to_json() const {
  return nlohmann::json{
      {"a1", a1},
      {"a2", a2},
      {"a3", a3},
      {"worst",
       {{"assumption", worst.assumption},
        {"rho", worst.rho},
        {"violation", worst.violation}}},
  };
}

TargetGeometry TargetGeometry::from_json(const nlohmann::json& spec,
                                         bool enforce_assumptions) {
  if (!spec.is_object() || !spec.contains("kind") ||
      !spec["kind"].is_string()) {
    throw ConfigError("geometry spec must be an object with a string 'kind'");
  }
  std::string kind = spec["kind"].get<std::string>();
  if (kind == "sphere") return make_builtin(GeometryKind::sphere);
  if (kind == "yang-mills-shifted") {
    return make_builtin(GeometryKind::yang_mills_shifted);
  }
  if (kind == "custom") {
    for (const char* key : {"g", "gp", "gpp"}) {
      if (!spec.contains(key) || !spec[key].is_string()) {
        throw ConfigError(std::string("custom geometry needs string '") + key +
                          "'");
      }
    }
    if (!spec.contains("k") || !spec["k"].is_number_integer()) {
      throw ConfigError("custom geometry needs integer 'k'");
    }
    CustomSources src{spec["g"].get<std::string>(),
                      spec["gp"].get<std::string>(),
                      spec["gpp"].get<std::string>()};
    return parse_custom(src, spec["k"].get<int>(), enforce_assumptions);
  }
  throw ConfigError("unknown geometry kind '" + kind + "'");
}

nlohmann::json TargetGeometry::to_json() const {
  if (kind_ == GeometryKind::custom) {
    return nlohmann::json{{"kind", "custom"},
                          {"k", k_},
                          {"g", sources_->g},
                          {"gp", sources_->gp},
                          {"gpp", sources_->gpp}};
  }
  return nlohmann::json{{"kind", kind_name_}};
}

}  // namespace critwave
