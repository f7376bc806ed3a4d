#pragma once

// Numerical evidence about absolutely continuous invariant measures of Q_a:
// histograms of the critical orbit, Birkhoff averages, and a classification
// that mirrors the attracting-cycle / stochastic dichotomy. Everything here is
// evidence at finite precision, never a membership decision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chaoscope/cycles.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/maps.hpp"

namespace chaoscope {

inline constexpr std::size_t default_burn_in = 10'000;
inline constexpr std::size_t default_bins = 100;
inline constexpr double default_support_threshold = 0.5;

struct DensityHistogram {
  std::size_t bins = 0;
  double lo = 0.0;  // support [lo, hi]
  double hi = 0.0;
  std::vector<double> mass;
  std::size_t sample_count = 0;
  bool hit_critical = false;  // orbit landed exactly on 0: finite-support measure
  bool restarted = false;     // sampled from 1 - restart_offset instead of 1

  double bin_width() const { return (hi - lo) / static_cast<double>(bins); }
  double bin_lo(std::size_t i) const { return lo + bin_width() * static_cast<double>(i); }
  double bin_hi(std::size_t i) const { return i + 1 == bins ? hi : lo + bin_width() * static_cast<double>(i + 1); }

  std::size_t bin_of(double x) const {
    double t = (x - lo) / (hi - lo) * static_cast<double>(bins);
    if (!(t > 0.0)) return 0;
    return std::min(bins - 1, static_cast<std::size_t>(t));
  }
};

// Invariant interval [1 - a, 1] clipped to [-1, 1].
inline std::pair<double, double> density_support(QuadraticParams p) { return {std::max(1.0 - p.a, -1.0), 1.0}; }

inline constexpr double restart_offset = 0x1p-30;

namespace detail {

// Start of the sampled orbit, after burn_in steps from the critical value 1.
// If the orbit has become exactly periodic on a repelling cycle (a=2 sends
// 1 -> -1, a repelling fixed point), it carries no information about the
// invariant density, so the burn-in is redone from 1 - restart_offset.
struct SampleStart {
  double x = 1.0;
  bool restarted = false;
};

inline bool on_repelling_cycle(QuadraticParams p, double x) {
  double y = x;
  double mult = 1.0;
  for (std::size_t k = 1; k <= default_max_period; ++k) {
    mult *= quad_derivative(p, y);
    y = quad_apply(p, y);
    if (y == x) return std::abs(mult) > 1.0;
  }
  return false;
}

inline SampleStart sample_start(QuadraticParams p, std::size_t burn_in) {
  SampleStart s;
  for (int attempt = 0; attempt < 2; ++attempt) {
    double x = attempt == 0 ? 1.0 : 1.0 - restart_offset;
    for (std::size_t i = 0; i < burn_in; ++i) {
      if (!(std::abs(x) <= default_escape_radius)) throw escape_error("orbit escaped during burn-in");
      x = quad_apply(p, x);
    }
    if (!(std::abs(x) <= default_escape_radius)) throw escape_error("orbit escaped during burn-in");
    s.x = x;
    s.restarted = attempt == 1;
    if (!on_repelling_cycle(p, x)) break;
  }
  return s;
}

}  // namespace detail

// Histogram of the critical-value orbit after burn_in steps (see
// detail::sample_start for the one exception).
inline DensityHistogram estimate_density(QuadraticParams p, std::size_t iterations, std::size_t burn_in = default_burn_in,
                                         std::size_t bins = default_bins) {
  if (iterations == 0) throw error("estimate_density needs iterations >= 1");
  if (bins == 0) throw error("estimate_density needs bins >= 1");
  auto [lo, hi] = density_support(p);
  if (!(lo < hi)) throw error("estimate_density needs a > 0");
  DensityHistogram h;
  h.bins = bins;
  h.lo = lo;
  h.hi = hi;
  h.sample_count = iterations;
  std::vector<std::size_t> counts(bins, 0);

  auto start = detail::sample_start(p, burn_in);
  h.restarted = start.restarted;
  double x = start.x;
  for (std::size_t i = 0; i < iterations; ++i) {
    if (!(std::abs(x) <= default_escape_radius)) throw escape_error("orbit escaped at step " + std::to_string(i));
    if (x == 0.0) h.hit_critical = true;
    ++counts[h.bin_of(x)];
    x = quad_apply(p, x);
  }
  h.mass.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.mass[i] = static_cast<double>(counts[i]) / static_cast<double>(iterations);
  return h;
}

enum class Observable { Identity, Square };

// Time average of the observable along the same orbit estimate_density uses.
inline double birkhoff_average(QuadraticParams p, Observable obs, std::size_t iterations,
                               std::size_t burn_in = default_burn_in) {
  if (iterations == 0) throw error("birkhoff_average needs iterations >= 1");
  double x = detail::sample_start(p, burn_in).x;
  double sum = 0.0;
  for (std::size_t i = 0; i < iterations; ++i) {
    if (!(std::abs(x) <= default_escape_radius)) throw escape_error("orbit escaped at step " + std::to_string(i));
    sum += obs == Observable::Identity ? x : x * x;
    x = quad_apply(p, x);
  }
  return sum / static_cast<double>(iterations);
}

// Fraction of bins carrying at least a tenth of the uniform per-bin mass.
inline double effective_support(const DensityHistogram& h) {
  const double floor = 0.1 / static_cast<double>(h.bins);
  std::size_t hit = 0;
  for (double m : h.mass)
    if (m >= floor) ++hit;
  return static_cast<double>(hit) / static_cast<double>(h.bins);
}

namespace detail {

// Length of { x in [u, v] : Q_a(x) in [ylo, yhi] } for an interval [u, v]
// on one side of the critical point.
inline double preimage_length(QuadraticParams p, double u, double v, double ylo, double yhi) {
  // On x >= 0, Q_a(x) in [ylo, yhi] iff x in [sqrt((1 - yhi) / a), sqrt((1 - ylo) / a)].
  auto root = [&](double y) { return std::sqrt(std::max(0.0, (1.0 - y) / p.a)); };
  double lo = root(yhi), hi = root(ylo);
  if (v <= 0.0) {
    double t = -u;
    u = -v;
    v = t;
  }
  return std::max(0.0, std::min(v, hi) - std::max(u, lo));
}

}  // namespace detail

// Transfer of the histogram through Q_a with mass spread uniformly inside each
// bin: bin i sends to bin j the fraction of its width that Q_a maps into bin j.
inline DensityHistogram push_forward(const DensityHistogram& h, QuadraticParams p) {
  DensityHistogram out = h;
  std::fill(out.mass.begin(), out.mass.end(), 0.0);
  for (std::size_t i = 0; i < h.bins; ++i) {
    if (h.mass[i] == 0.0) continue;
    const double l = h.bin_lo(i), r = h.bin_hi(i), w = r - l;
    std::vector<std::pair<double, double>> sides;
    if (l < 0.0 && r > 0.0) {
      sides = {{l, 0.0}, {0.0, r}};
    } else {
      sides = {{l, r}};
    }
    for (auto [u, v] : sides) {
      double y0 = quad_apply(p, u), y1 = quad_apply(p, v);
      std::size_t first = out.bin_of(std::min(y0, y1)), last = out.bin_of(std::max(y0, y1));
      double assigned = 0.0;
      for (std::size_t j = first; j <= last; ++j) {
        double ylo = j == 0 ? -HUGE_VAL : out.bin_lo(j);
        double yhi = j + 1 == out.bins ? HUGE_VAL : out.bin_hi(j);
        double share = j == last ? (v - u) - assigned : detail::preimage_length(p, u, v, ylo, yhi);
        share = std::max(0.0, share);
        assigned += share;
        out.mass[j] += h.mass[i] * share / w;
      }
    }
  }
  return out;
}

inline double l1_distance(const std::vector<double>& u, const std::vector<double>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(u.size(), v.size()); ++i) d += std::abs(u[i] - v[i]);
  return d;
}

// `bin_lo,bin_hi,mass` with a header row, 17 significant digits.
inline std::string histogram_csv(const DensityHistogram& h) {
  std::ostringstream os;
  os.precision(17);
  os << "bin_lo,bin_hi,mass\n";
  for (std::size_t i = 0; i < h.bins; ++i) os << h.bin_lo(i) << ',' << h.bin_hi(i) << ',' << h.mass[i] << '\n';
  return os.str();
}

enum class SrbEvidence { PeriodicAttractor, StochasticLike, Escaped, Undetermined };

inline std::string_view to_string(SrbEvidence e) {
  switch (e) {
    case SrbEvidence::PeriodicAttractor: return "periodic_attractor";
    case SrbEvidence::StochasticLike: return "stochastic_like";
    case SrbEvidence::Escaped: return "escaped";
    case SrbEvidence::Undetermined: return "undetermined";
  }
  return "unknown";
}

struct SrbReport {
  SrbEvidence evidence = SrbEvidence::Undetermined;
  ExponentClass exponent = ExponentClass::Inconclusive;
  std::optional<CycleRecord> cycle;
  double support_fraction = 0.0;
};

// PeriodicAttractor when an attracting cycle is certified; StochasticLike when
// the exponent is Positive and the histogram's effective support covers more
// than support_threshold of the invariant interval; otherwise Undetermined.
// A certified attracting cycle always wins, so the two classes never overlap.
inline SrbReport classify_srb_evidence(QuadraticParams p, std::size_t budget = default_exponent_budget,
                                       double support_threshold = default_support_threshold) {
  SrbReport r;
  auto search = find_cycle_by_convergence(p, default_max_period, std::min(budget, default_cycle_budget));
  if (search.status == CycleStatus::Escaped) {
    r.evidence = SrbEvidence::Escaped;
    r.exponent = ExponentClass::Escaped;
    return r;
  }
  if (search.status == CycleStatus::Found && search.cycle->attracting()) {
    r.evidence = SrbEvidence::PeriodicAttractor;
    r.cycle = search.cycle;
    r.exponent = classify_exponent(p, budget);
    return r;
  }
  r.exponent = classify_exponent(p, budget);
  if (r.exponent == ExponentClass::Escaped) {
    r.evidence = SrbEvidence::Escaped;
    return r;
  }
  if (r.exponent == ExponentClass::Positive) {
    r.support_fraction = effective_support(estimate_density(p, budget));
    if (r.support_fraction > support_threshold) r.evidence = SrbEvidence::StochasticLike;
  }
  return r;
}

}  // namespace chaoscope
