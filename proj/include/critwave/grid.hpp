#pragma once

#include <vector>

namespace critwave {

// Uniform radial grid on [0, r_max] with n_cells + 1 nodes at r_j = j h.
struct RadialGrid {
  int n_cells = 0;
  double h = 0.0;

  static RadialGrid with_extent(int n_cells, double r_max);

  int size() const { return n_cells + 1; }
  double r(int j) const { return j * h; }
  double r_max() const { return n_cells * h; }
  bool operator==(const RadialGrid&) const = default;

  void validate() const;  // throws ConfigError
};

// A field pair (v, v_t) on a radial grid in first-order form. The physical
// field is u = r^k v; storing v keeps the origin regular for every k.
struct FieldState {
  RadialGrid grid;
  int k = 1;
  double t = 0.0;
  std::vector<double> v;
  std::vector<double> v_t;

  static FieldState zero(const RadialGrid& grid, int k);

  std::vector<double> u_values() const;    // r^k v
  std::vector<double> u_t_values() const;  // r^k v_t

  double sup_u() const;       // max_j |u_j|
  double max_abs_v() const;   // max_j |v_j|

  void validate() const;  // sizes match grid, values finite
};

}  // namespace critwave
