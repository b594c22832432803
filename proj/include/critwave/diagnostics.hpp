#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "critwave/evolution.hpp"
#include "critwave/functionals.hpp"
#include "critwave/geometry.hpp"
#include "critwave/grid.hpp"

namespace critwave {

// C^2 plateau cutoff: 1 on [0, R], 0 beyond 2R, quintic-smoothstep ramp in
// between. The closed-form derivative bounds feed the virial residual budget.
struct CutoffBump {
  double R = 1.0;

  double value(double r) const;
  double deriv(double r) const;
  double second(double r) const;

  static double sup_deriv();   // 15 / (8 R), reported for R = 1 scale: 15/8
  static double sup_second();  // 10 / sqrt(3) at R = 1 scale
};

// Exterior pair-norm energy beyond R (geometry-free).
double tail_energy(const FieldState& state, double R);

struct VirialSample {
  double t = 0.0;
  double v1 = 0.0;     // int u_t u_r r^2 phi_R dr
  double v2 = 0.0;     // int u u_t r phi_R dr
  double main1 = 0.0;  // -int u_t^2 r dr (full domain)
  double main2 = 0.0;  // int (u_t^2 - u_r^2 - u f(u)/r^2) r phi_R dr
  double tail = 0.0;   // tail_energy(state, R)
};
VirialSample virial_sample(const FieldState& state,
                           const TargetGeometry& geometry, double R);

// Centered time differences of the recorded v1, v2 against main1, main2,
// plus the a-priori bound series c_phi * tail.
struct VirialResiduals {
  std::vector<double> t;
  std::vector<double> res1;   // |d v1/dt - main1|
  std::vector<double> res2;   // |d v2/dt - main2|
  std::vector<double> bound;  // c_phi * tail
  double c_phi = 0.0;
};
VirialResiduals virial_residuals(const RunRecord& record);

double virial_bound_constant();  // 10 (1 + 2 sup|phi'| + 4 sup|phi''|)

// Instantaneous integrand int |v|^{2+3/k} r^{2k+1} dr and the cumulative
// series (t, accumulated) re-read from the record.
double snorm_integrand(const FieldState& state);
std::vector<std::pair<double, double>> snorm_series(const RunRecord& record);
// Accumulation over the trailing `window` fraction of the run, relative to
// the total; small values indicate the space-time norm has saturated.
double snorm_trailing_increment(const RunRecord& record, double window);

// Randomized coercivity scan: seeded multi-bump profiles rescaled into the
// variational class, ratio F/E recorded, worst profiles kept.
struct CoercivityScan {
  double c_emp = 0.0;
  double delta = 0.0;
  int n_profiles = 0;
  std::uint64_t seed = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool all_positive = false;
  int resampled = 0;  // degenerate draws replaced
  FieldState worst_low;   // attains min F/E
  FieldState worst_high;  // attains max F/E
};
CoercivityScan coercivity_scan(const TargetGeometry& geometry, double delta,
                               int n_profiles, std::uint64_t seed,
                               const RadialGrid& grid, int threads = 0);

}  // namespace critwave
