#pragma once

#include <utility>
#include <vector>

#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"

namespace critwave {

// Full-state report. Window partials are potential-only energies E_a^b,
// matching the localized quantity used by the pointwise bound.
struct EnergyReport {
  double e_total = 0.0;
  double e_kinetic = 0.0;    // int u_t^2 r dr
  double e_potential = 0.0;  // int (u_r^2 + g^2(u)/r^2) r dr
  double f_functional = 0.0;
  double h_norm_sq = 0.0;  // pair norm: int (u_r^2 + u^2/r^2 + u_t^2) r dr
  double sup_u = 0.0;
  struct Partial {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
  };
  std::vector<Partial> partials;
};

EnergyReport energy_report(
    const FieldState& state, const TargetGeometry& geometry,
    const std::vector<std::pair<double, double>>& windows = {});

// Potential-only energy over a window [a, b] (trapezoid with end cells
// split at a and b by linear interpolation of the weighted integrand).
double potential_energy_window(const FieldState& state,
                               const TargetGeometry& geometry, double a,
                               double b);

double kinetic_energy(const FieldState& state);
double kinetic_energy_window(const FieldState& state, double a, double b);
double f_functional(const FieldState& state, const TargetGeometry& geometry);

// Pair norm squared: int (u_r^2 + u^2/r^2 + u_t^2) r dr over [a, b].
// Geometry-free; this is also the tail integrand.
double h_norm_sq_window(const FieldState& state, double a, double b);
double h_norm_sq(const FieldState& state);

// Spatial-only norm squared int (u_r^2 + u^2/r^2) r dr over [a, b].
double h_norm_spatial_sq_window(const FieldState& state, double a, double b);

// u_r on the nodes via r^k v_r + k r^{k-1} v with centered v_r.
std::vector<double> radial_derivative_u(const FieldState& state);

// Worst violation of |G(u(r)) - G(u(r'))| <= (1/2) E_r^{r'}(u) over a
// decimated pair grid. violation <= 0 (up to quadrature noise) means the
// bound holds; equality_gap is the largest |lhs - rhs|/rhs over scanned pairs
// with rhs above a small floor, used for the equality-case probe on extremal
// profiles.
struct PointwiseBoundRecord {
  double violation = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double max_relative_equality_gap = 0.0;  // max |lhs-rhs|/rhs over pairs
};
PointwiseBoundRecord check_pointwise_bound(const FieldState& state,
                                           const TargetGeometry& geometry,
                                           int max_points = 512);

// (sup|u|, K(E_potential)); throws ConfigError when the state fails the
// trivial-endpoint precondition or sits at/above twice the threshold energy.
struct SupBoundResult {
  double sup_u = 0.0;
  double k_of_energy = 0.0;
};
SupBoundResult sup_bound_check(const FieldState& state,
                               const TargetGeometry& geometry);

// Energy below threshold + delta and trivial discrete endpoints.
bool membership_v(const FieldState& state, const TargetGeometry& geometry,
                  double delta);

// Norm equivalence between the conjugated gradient A = int v_r^2 r^{2k+1} dr
// and B = int (u_r^2 + u^2/r^2) r dr, with the two guaranteed inequality
// margins (nonnegative up to quadrature noise) and the recorded-only
// textbook-constant margins which are not asserted anywhere.
struct NormEquivalenceResult {
  double v_gradient = 0.0;  // A
  double u_norm = 0.0;      // B
  double margin_a = 0.0;    // (k^2+1) B - A
  double margin_b = 0.0;    // (2 + 1/k^2) A - B
  double recorded_lower = 0.0;  // B - A/3
  double recorded_upper = 0.0;  // (k^2+1) A - B
};
NormEquivalenceResult norm_equivalence_check(const FieldState& state);

}  // namespace critwave
