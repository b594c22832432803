#include "critwave/diagnostics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "critwave/errors.hpp"
#include "critwave/util.hpp"

namespace critwave {

namespace {

double quintic_smoothstep(double y) {
  return ((6.0 * y - 15.0) * y + 10.0) * y * y * y;
}

double quintic_smoothstep_d1(double y) {
  double t = y * (y - 1.0);
  return 30.0 * t * t;
}

double quintic_smoothstep_d2(double y) {
  return 60.0 * y * (2.0 * y - 1.0) * (y - 1.0);
}

double trapezoid(const std::vector<double>& w, double h) {
  if (w.size() < 2) return 0.0;
  double sum = 0.5 * (w.front() + w.back());
  for (std::size_t j = 1; j + 1 < w.size(); ++j) sum += w[j];
  return sum * h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform doubles built from the top 53 bits of mt19937_64 output, so the
// draw sequence is identical on every platform.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }
};

}  // namespace

double CutoffBump::value(double r) const {
  double x = r / R;
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  return 1.0 - quintic_smoothstep(x - 1.0);
}

double CutoffBump::deriv(double r) const {
  double x = r / R;
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return -quintic_smoothstep_d1(x - 1.0) / R;
}

double CutoffBump::second(double r) const {
  double x = r / R;
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return -quintic_smoothstep_d2(x - 1.0) / (R * R);
}

double CutoffBump::sup_deriv() { return 15.0 / 8.0; }

double CutoffBump::sup_second() { return 10.0 / std::sqrt(3.0); }

double virial_bound_constant() {
  return 10.0 * (1.0 + 2.0 * CutoffBump::sup_deriv() +
                 4.0 * CutoffBump::sup_second());
}

double tail_energy(const FieldState& state, double R) {
  if (!(R >= 0.0) || R >= state.grid.r_max()) {
    throw DomainError("tail radius must lie in [0, r_max)");
  }
  return h_norm_sq_window(state, R, state.grid.r_max());
}

VirialSample virial_sample(const FieldState& state,
                           const TargetGeometry& geometry, double R) {
  if (!(R > 0.0) || R > 0.5 * state.grid.r_max()) {
    throw DomainError("virial radius must lie in (0, r_max/2]");
  }
  const CutoffBump phi{R};
  const double h = state.grid.h;
  const int k = state.k;
  std::vector<double> ur = radial_derivative_u(state);

  std::vector<double> w1(state.v.size(), 0.0);
  std::vector<double> w2(state.v.size(), 0.0);
  std::vector<double> wm1(state.v.size(), 0.0);
  std::vector<double> wm2(state.v.size(), 0.0);
  for (std::size_t j = 1; j < state.v.size(); ++j) {
    double r = state.grid.r(static_cast<int>(j));
    double u = ipow(r, k) * state.v[j];
    double ut = ipow(r, k) * state.v_t[j];
    double p = phi.value(r);
    w1[j] = ut * ur[j] * r * r * p;
    w2[j] = u * ut * r * p;
    wm1[j] = -ut * ut * r;
    wm2[j] = (ut * ut - ur[j] * ur[j] - u * geometry.f(u) / (r * r)) * r * p;
  }

  VirialSample out;
  out.t = state.t;
  out.v1 = trapezoid(w1, h);
  out.v2 = trapezoid(w2, h);
  out.main1 = trapezoid(wm1, h);
  out.main2 = trapezoid(wm2, h);
  out.tail = tail_energy(state, R);
  return out;
}

VirialResiduals virial_residuals(const RunRecord& record) {
  VirialResiduals out;
  out.c_phi = virial_bound_constant();
  const auto& rows = record.series;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    double span = rows[i + 1].t - rows[i - 1].t;
    if (!(span > 0.0)) continue;
    double d1 = (rows[i + 1].virial1 - rows[i - 1].virial1) / span;
    double d2 = (rows[i + 1].virial2 - rows[i - 1].virial2) / span;
    out.t.push_back(rows[i].t);
    out.res1.push_back(std::abs(d1 - rows[i].virial_main1));
    out.res2.push_back(std::abs(d2 - rows[i].virial_main2));
    out.bound.push_back(out.c_phi * rows[i].virial_tail);
  }
  return out;
}

double snorm_integrand(const FieldState& state) {
  const int k = state.k;
  std::vector<double> w(state.v.size(), 0.0);
  for (std::size_t j = 1; j < state.v.size(); ++j) {
    double r = state.grid.r(static_cast<int>(j));
    double av = std::abs(state.v[j]);
    double p = (k == 1) ? av * av * av * av * av
                        : std::pow(av, 2.0 + 3.0 / k);
    w[j] = p * ipow(r, 2 * k + 1);
  }
  return trapezoid(w, state.grid.h);
}

std::vector<std::pair<double, double>> snorm_series(const RunRecord& record) {
  std::vector<std::pair<double, double>> out;
  out.reserve(record.series.size());
  for (const SeriesRow& row : record.series) {
    out.emplace_back(row.t, row.snorm_acc);
  }
  return out;
}

double snorm_trailing_increment(const RunRecord& record, double window) {
  const auto& rows = record.series;
  if (rows.size() < 2) return 0.0;
  double t0 = rows.front().t;
  double t1 = rows.back().t;
  double cutoff = t1 - window * (t1 - t0);
  double acc_at_cutoff = rows.front().snorm_acc;
  for (const SeriesRow& row : rows) {
    if (row.t <= cutoff) acc_at_cutoff = row.snorm_acc;
  }
  double total = rows.back().snorm_acc;
  if (!(total > 0.0)) return 0.0;
  return (total - acc_at_cutoff) / total;
}

namespace {

struct ProfileResult {
  double ratio = 0.0;
  double f_value = 0.0;
  double energy = 0.0;
  int resampled = 0;
  FieldState state;
};

ProfileResult scan_one_profile(const TargetGeometry& geometry, double delta,
                               std::uint64_t seed, int index,
                               const RadialGrid& grid) {
  Rng rng(splitmix64(seed ^ (0x9E3779B97F4A7C15ULL *
                             static_cast<std::uint64_t>(index + 1))));
  const double cap = geometry.energy_threshold() + delta;

  ProfileResult res;
  for (int attempt = 0; attempt < 100; ++attempt) {
    int n_bumps = rng.uniform_int(1, 3);
    std::vector<double> amp(n_bumps), width(n_bumps), center(n_bumps);
    for (int m = 0; m < n_bumps; ++m) {
      amp[m] = rng.uniform(-1.0, 1.0);
      width[m] = rng.uniform(0.25, 4.0);
      center[m] = rng.uniform(0.5, 8.0);
    }
    double target = rng.uniform(0.02, 0.98) * cap;

    FieldState state = FieldState::zero(grid, geometry.k());
    std::vector<double> base(grid.size(), 0.0);
    for (int j = 0; j <= grid.n_cells; ++j) {
      double r = grid.r(j);
      double v = 0.0;
      for (int m = 0; m < n_bumps; ++m) {
        v += amp[m] * std::exp(-width[m] * (r - center[m]) * (r - center[m]));
      }
      base[j] = v;
    }

    auto energy_at = [&](double alpha) {
      for (int j = 0; j <= grid.n_cells; ++j) state.v[j] = alpha * base[j];
      return potential_energy_window(state, geometry, 0.0, grid.r_max());
    };

    double hi = 1.0;
    bool bracket = false;
    for (int it = 0; it < 80; ++it) {
      if (energy_at(hi) >= target) {
        bracket = true;
        break;
      }
      hi *= 2.0;
    }
    if (!bracket || !(target > 0.0)) {
      ++res.resampled;
      continue;
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if (energy_at(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double alpha = 0.5 * (lo + hi);
    double energy = energy_at(alpha);
    if (!std::isfinite(energy) || !(energy > 0.0) || !(energy < cap) ||
        !membership_v(state, geometry, delta)) {
      ++res.resampled;
      continue;
    }
    res.energy = energy;
    res.f_value = f_functional(state, geometry);
    res.ratio = res.f_value / energy;
    res.state = state;
    return res;
  }
  throw ConfigError("coercivity scan: random profile rescaling kept failing");
}

}  // namespace

CoercivityScan coercivity_scan(const TargetGeometry& geometry, double delta,
                               int n_profiles, std::uint64_t seed,
                               const RadialGrid& grid, int threads) {
  if (!(delta > 0.0) || delta > 0.5 * geometry.energy_threshold()) {
    throw ConfigError("coercivity scan needs delta in (0, E(Q)/2]");
  }
  if (n_profiles < 100) {
    throw ConfigError("coercivity scan needs at least 100 profiles");
  }
  grid.validate();

  std::vector<ProfileResult> results(n_profiles);
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_profiles));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_profiles; i = next.fetch_add(1)) {
      try {
        results[i] = scan_one_profile(geometry, delta, seed, i, grid);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  CoercivityScan scan;
  scan.delta = delta;
  scan.n_profiles = n_profiles;
  scan.seed = seed;
  scan.all_positive = true;
  bool first = true;
  for (int i = 0; i < n_profiles; ++i) {
    const ProfileResult& res = results[i];
    scan.resampled += res.resampled;
    if (!(res.f_value > 0.0)) scan.all_positive = false;
    if (first || res.ratio < scan.min_ratio) {
      scan.min_ratio = res.ratio;
      scan.worst_low = res.state;
    }
    if (first || res.ratio > scan.max_ratio) {
      scan.max_ratio = res.ratio;
      scan.worst_high = res.state;
    }
    first = false;
  }
  scan.c_emp = std::min(scan.min_ratio,
                        scan.max_ratio > 0.0 ? 1.0 / scan.max_ratio : 0.0);
  return scan;
}

}  // namespace critwave
