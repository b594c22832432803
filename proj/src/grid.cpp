#include "critwave/grid.hpp"

#include <cmath>

#include "critwave/util.hpp"
#include "critwave/errors.hpp"

namespace critwave {

RadialGrid RadialGrid::with_extent(int n_cells, double r_max) {
  RadialGrid g;
  g.n_cells = n_cells;
  g.h = r_max / n_cells;
  g.validate();
  return g;
}

void RadialGrid::validate() const {
  if (n_cells < 16) throw ConfigError("grid needs at least 16 cells");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ConfigError("grid spacing must be positive and finite");
  }
}

FieldState FieldState::zero(const RadialGrid& grid, int k) {
  grid.validate();
  FieldState s;
  s.grid = grid;
  s.k = k;
  s.v.assign(grid.size(), 0.0);
  s.v_t.assign(grid.size(), 0.0);
  return s;
}

std::vector<double> FieldState::u_values() const {
  std::vector<double> u(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    u[j] = ipow(grid.r(static_cast<int>(j)), k) * v[j];
  }
  u[0] = 0.0;
  return u;
}

std::vector<double> FieldState::u_t_values() const {
  std::vector<double> ut(v_t.size());
  for (std::size_t j = 0; j < v_t.size(); ++j) {
    ut[j] = ipow(grid.r(static_cast<int>(j)), k) * v_t[j];
  }
  ut[0] = 0.0;
  return ut;
}

double FieldState::sup_u() const {
  double best = 0.0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    double u = ipow(grid.r(static_cast<int>(j)), k) * v[j];
    best = std::max(best, std::abs(u));
  }
  return best;
}

double FieldState::max_abs_v() const {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

void FieldState::validate() const {
  grid.validate();
  if (k < 1) throw ConfigError("field state needs k >= 1");
  if (static_cast<int>(v.size()) != grid.size() ||
      static_cast<int>(v_t.size()) != grid.size()) {
    throw ConfigError("field arrays do not match the grid");
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j]) || !std::isfinite(v_t[j])) {
      throw ConfigError("field contains non-finite values");
    }
  }
}

}  // namespace critwave
