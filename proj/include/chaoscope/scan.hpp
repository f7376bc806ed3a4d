#pragma once

// Parameter sweeps with deterministic, index-ordered output: CSV rows for the
// quadratic and Henon families and a plain-text PPM bifurcation raster.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chaoscope/cycles.hpp"
#include "chaoscope/entropy.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/maps.hpp"
#include "chaoscope/parallel.hpp"

namespace chaoscope {

enum class Family { Quadratic, Henon };

inline constexpr std::size_t min_scan_budget = 1000;
inline constexpr unsigned default_scan_lap_depth = 16;

struct ScanConfig {
  Family family = Family::Quadratic;
  double lo = 1.4;
  double hi = 2.0;
  std::size_t grid = 1000;
  double b = 0.3;  // Henon only
  std::size_t budget = 20'000;
  unsigned lap_depth = default_scan_lap_depth;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const {
    if (grid < 2) throw error("scan grid needs at least 2 points");
    if (budget < min_scan_budget) throw error("scan budget must be at least " + std::to_string(min_scan_budget));
    if (!(lo <= hi)) throw error("scan interval needs lo <= hi");
    if (family == Family::Quadratic && !(lo > 0.0 && hi <= 2.0))
      throw error("quadratic scans need the interval inside (0, 2]");
    if (lap_depth < 2 || lap_depth > lap_n_max) throw error("lap depth must be in [2, 22]");
  }

  double parameter(std::size_t i) const { return grid_point(lo, hi, i, grid); }
};

struct ScanRow {
  double a = 0.0;
  double b = 0.0;
  double exp_estimate = 0.0;
  ExponentClass cls = ExponentClass::Inconclusive;
  std::optional<std::size_t> cycle_period;
  double entropy = 0.0;
};

inline ScanRow scan_point(const ScanConfig& cfg, std::size_t i) {
  ScanRow r;
  r.a = cfg.parameter(i);
  if (cfg.family == Family::Henon) {
    r.b = cfg.b;
    auto t = lyapunov_henon({r.a, cfg.b}, {0.0, 0.0}, {0.0, 1.0}, cfg.budget);
    r.exp_estimate = t.estimate;
    r.cls = classify_trace(t, default_exponent_threshold);
    return r;
  }
  QuadraticParams p{r.a};
  auto t = lyapunov_quadratic(p, cfg.budget);
  r.exp_estimate = t.estimate;
  r.cls = classify_trace(t, default_exponent_threshold);
  auto c = find_cycle_by_convergence(p, default_max_period, std::min(cfg.budget, default_cycle_budget));
  if (c.status == CycleStatus::Found && c.cycle->attracting()) r.cycle_period = c.cycle->period;
  r.entropy = entropy_lap(p, cfg.lap_depth).value;
  return r;
}

inline std::vector<ScanRow> run_scan(const ScanConfig& cfg) {
  cfg.validate();
  return parallel_map(cfg.grid, cfg.threads, [&](std::size_t i) { return scan_point(cfg, i); });
}

// Quadratic: `a,exp_estimate,class,cycle_period,entropy_lap` (cycle_period is
// empty when no attracting cycle was found). Henon: `a,b,exp_estimate,class`.
// Floats are written with 17 significant digits.
inline std::string scan_csv(Family family, const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  if (family == Family::Henon) {
    os << "a,b,exp_estimate,class\n";
    for (const auto& r : rows) os << r.a << ',' << r.b << ',' << r.exp_estimate << ',' << to_string(r.cls) << '\n';
    return os.str();
  }
  os << "a,exp_estimate,class,cycle_period,entropy_lap\n";
  for (const auto& r : rows) {
    os << r.a << ',' << r.exp_estimate << ',' << to_string(r.cls) << ',';
    if (r.cycle_period) os << *r.cycle_period;
    os << ',' << r.entropy << '\n';
  }
  return os.str();
}

inline std::vector<ExponentClass> scan_classes(const std::vector<ScanRow>& rows) {
  std::vector<ExponentClass> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.cls);
  return out;
}

struct RasterConfig {
  std::size_t height = 400;
  std::size_t burn_in = 1000;
  std::size_t plotted = 1000;
  double y_lo = -1.5;  // plotted range of the x coordinate
  double y_hi = 1.5;
};

// One column per grid parameter. Each column starts from a point drawn from
// [-0.5, 0.5] by a generator seeded with (seed, column), so columns do not
// depend on scheduling. Visited pixels are black on white.
inline std::string bifurcation_ppm(const ScanConfig& cfg, const RasterConfig& rc = {}) {
  cfg.validate();
  if (rc.height < 2) throw error("raster height must be at least 2");
  auto columns = parallel_map(cfg.grid, cfg.threads, [&](std::size_t i) {
    std::vector<unsigned char> hit(rc.height, 0);
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    double x0 = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    double a = cfg.parameter(i);
    auto mark = [&](double x) {
      if (!(x >= rc.y_lo && x <= rc.y_hi)) return;
      double t = (rc.y_hi - x) / (rc.y_hi - rc.y_lo) * static_cast<double>(rc.height - 1);
      hit[static_cast<std::size_t>(std::lround(t))] = 1;
    };
    if (cfg.family == Family::Henon) {
      HenonMap f{{a, cfg.b}};
      Point2 z{x0, 0.0};
      for (std::size_t k = 0; k < rc.burn_in + rc.plotted; ++k) {
        if (!(norm(z) <= default_escape_radius)) break;
        if (k >= rc.burn_in) mark(z.x);
        z = f(z);
      }
    } else {
      QuadraticMap f{{a}};
      double x = x0;
      for (std::size_t k = 0; k < rc.burn_in + rc.plotted; ++k) {
        if (!(std::abs(x) <= default_escape_radius)) break;
        if (k >= rc.burn_in) mark(x);
        x = f(x);
      }
    }
    return hit;
  });
  std::ostringstream os;
  os << "P3\n" << cfg.grid << ' ' << rc.height << "\n255\n";
  for (std::size_t row = 0; row < rc.height; ++row) {
    for (std::size_t col = 0; col < cfg.grid; ++col) os << (columns[col][row] ? "0 0 0\n" : "255 255 255\n");
  }
  return os.str();
}

}  // namespace chaoscope
