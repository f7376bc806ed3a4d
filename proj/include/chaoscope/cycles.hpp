#pragma once

// Periodic orbits of the quadratic family: attracting-cycle detection from the
// critical orbit, superstable parameters of the period-doubling cascade, and
// parameter scans for hyperbolic windows.
//
// Any attracting cycle of Q_a attracts the critical point, so detection
// follows the critical orbit only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chaoscope/error.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/maps.hpp"
#include "chaoscope/parallel.hpp"

namespace chaoscope {

inline constexpr double tol_cycle = 1e-10;
inline constexpr double tol_root = 1e-12;
inline constexpr double tol_mult = 1e-6;
inline constexpr std::size_t default_cycle_budget = 100'000;
inline constexpr std::size_t default_max_period = 64;

enum class Stability { Attracting, Superstable, Neutral, Repelling };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Attracting: return "attracting";
    case Stability::Superstable: return "superstable";
    case Stability::Neutral: return "neutral";
    case Stability::Repelling: return "repelling";
  }
  return "unknown";
}

inline Stability classify_multiplier(double m) {
  double am = std::abs(m);
  if (am <= tol_mult) return Stability::Superstable;
  if (std::abs(am - 1.0) <= tol_mult) return Stability::Neutral;
  if (am < 1.0) return Stability::Attracting;
  return Stability::Repelling;
}

struct CycleRecord {
  ParameterPoint params;
  std::size_t period = 0;
  double point = 0.0;  // cycle element of smallest modulus
  double multiplier = 0.0;
  Stability stability = Stability::Repelling;

  bool attracting() const { return stability == Stability::Attracting || stability == Stability::Superstable; }
};

enum class CycleStatus { Found, NotFound, Escaped };

struct CycleSearch {
  CycleStatus status = CycleStatus::NotFound;
  std::optional<CycleRecord> cycle;
};

// Multiplier (f^period)'(x) by the chain rule along the cycle through x.
inline double cycle_multiplier(QuadraticParams p, double x, std::size_t period) {
  double m = 1.0;
  for (std::size_t i = 0; i < period; ++i) {
    m *= quad_derivative(p, x);
    x = quad_apply(p, x);
  }
  return m;
}

// Smallest d (dividing period) such that |f^d(x) - x| <= tol, or 0 if none.
inline std::size_t minimal_period(QuadraticParams p, double x, std::size_t period, double tol = tol_cycle) {
  for (std::size_t d = 1; d <= period; ++d) {
    if (period % d != 0) continue;
    if (std::abs(advance(QuadraticMap{p}, x, d) - x) <= tol) return d;
  }
  return 0;
}

namespace detail {

// Newton on F(x) = f^p(x) - x. Returns nullopt if it fails to settle.
inline std::optional<double> refine_periodic_point(QuadraticParams p, double x, std::size_t period) {
  for (int it = 0; it < 100; ++it) {
    double y = x;
    double dy = 1.0;
    for (std::size_t i = 0; i < period; ++i) {
      dy *= quad_derivative(p, y);
      y = quad_apply(p, y);
    }
    double f = y - x;
    if (f == 0.0) return x;
    double fp = dy - 1.0;
    if (fp == 0.0 || !std::isfinite(fp)) return std::nullopt;
    double step = f / fp;
    x -= step;
    if (!std::isfinite(x)) return std::nullopt;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) return x;
  }
  return x;
}

inline double smallest_cycle_element(QuadraticParams p, double x, std::size_t period) {
  double best = x;
  for (std::size_t i = 0; i < period; ++i) {
    if (std::abs(x) < std::abs(best)) best = x;
    x = quad_apply(p, x);
  }
  return best;
}

}  // namespace detail

// Follows the critical orbit (from x = 0) for up to `budget` steps. At
// geometrically spaced checkpoints it looks for a near-return within
// max_period steps, refines the periodic point with Newton's method, and
// accepts it when the refined cycle closes within tol_cycle and is not
// repelling.
inline CycleSearch find_cycle_by_convergence(QuadraticParams p, std::size_t max_period = default_max_period,
                                             std::size_t budget = default_cycle_budget) {
  constexpr double detect_tol = 1e-7;
  CycleSearch result;
  if (max_period == 0) return result;

  double x = 0.0;
  std::size_t done = 0;
  std::size_t checkpoint = std::min<std::size_t>(256, budget);
  while (true) {
    for (; done < checkpoint; ++done) {
      x = quad_apply(p, x);
      if (!(std::abs(x) <= default_escape_radius)) {
        result.status = CycleStatus::Escaped;
        return result;
      }
    }

    double y = x;
    for (std::size_t k = 1; k <= max_period; ++k) {
      y = quad_apply(p, y);
      if (std::abs(y - x) > detect_tol) continue;
      auto refined = detail::refine_periodic_point(p, x, k);
      if (!refined) break;
      std::size_t period = minimal_period(p, *refined, k);
      if (period == 0) break;
      double point = detail::smallest_cycle_element(p, *refined, period);
      double mult = cycle_multiplier(p, point, period);
      Stability st = classify_multiplier(mult);
      if (st == Stability::Repelling) break;
      result.status = CycleStatus::Found;
      result.cycle = CycleRecord{{p.a, std::nullopt}, period, point, mult, st};
      return result;
    }

    if (checkpoint >= budget) break;
    checkpoint = std::min(budget, checkpoint * 2);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Period-doubling cascade

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Q_a^{2^k}(0), the function whose roots are period-2^k superstable params.
inline double critical_return(double a, unsigned k) {
  const std::uint64_t n = std::uint64_t{1} << k;
  double x = 0.0;
  QuadraticParams p{a};
  for (std::uint64_t i = 0; i < n; ++i) x = quad_apply(p, x);
  return x;
}

namespace detail {

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

inline std::size_t count_sign_changes(double lo, double hi, unsigned k, std::size_t samples) {
  std::size_t changes = 0;
  int prev = sign(critical_return(lo, k));
  for (std::size_t i = 1; i <= samples; ++i) {
    double a = (i == samples) ? hi : lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(samples));
    int s = sign(critical_return(a, k));
    if (s != 0 && prev != 0 && s != prev) ++changes;
    if (s != 0) prev = s;
  }
  return changes;
}

}  // namespace detail

// Superstable parameter of period 2^k inside `bracket`: bisection down to
// tol_root, one secant step inside the final bracket, then a few-ulp polish
// on |Q_a^{2^k}(0)|.
inline double superstable_parameter(unsigned k, Bracket bracket) {
  if (k == 0 || k > 30) throw bracket_error("cascade index must be in [1, 30]");
  double lo = bracket.lo, hi = bracket.hi;
  if (!(lo < hi)) throw bracket_error("bracket must satisfy lo < hi");
  double glo = critical_return(lo, k);
  double ghi = critical_return(hi, k);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (detail::sign(glo) == detail::sign(ghi)) {
    throw bracket_error("no sign change of Q_a^" + std::to_string(1u << k) + "(0) on [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");
  }
  if (detail::count_sign_changes(lo, hi, k, 64) > 1) {
    throw bracket_error("bracket contains more than one root for period " + std::to_string(1u << k) +
                        "; use a tighter bracket");
  }

  while (hi - lo > tol_root) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double gm = critical_return(mid, k);
    if (gm == 0.0) return mid;
    if (detail::sign(gm) == detail::sign(glo)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }

  double root = 0.5 * (lo + hi);
  if (ghi != glo) {
    double secant = lo - glo * (hi - lo) / (ghi - glo);
    if (secant >= lo && secant <= hi) root = secant;
  }

  double best = root;
  double best_g = std::abs(critical_return(root, k));
  double probe = root;
  double probe_down = root;
  for (int i = 0; i < 4 && best_g > 0.0; ++i) {
    probe = std::nextafter(probe, 3.0);
    probe_down = std::nextafter(probe_down, 0.0);
    for (double cand : {probe, probe_down}) {
      double g = std::abs(critical_return(cand, k));
      if (g < best_g) {
        best_g = g;
        best = cand;
      }
    }
  }
  return best;
}

// True when a is a root of Q_a^{2^k}(0) localized to tol_root (sign change or
// exact zero within [a - tol_root, a + tol_root]) and no earlier iterate of the
// critical point comes back within tol_root of 0.
inline bool verify_superstable(double a, unsigned k) {
  double g = critical_return(a, k);
  if (g != 0.0) {
    double gl = critical_return(a - tol_root, k);
    double gr = critical_return(a + tol_root, k);
    bool localized = detail::sign(gl) != detail::sign(g) || detail::sign(gr) != detail::sign(g) || gl == 0.0 ||
                     gr == 0.0;
    if (!localized) return false;
  }
  const std::uint64_t n = std::uint64_t{1} << k;
  QuadraticParams p{a};
  double x = 0.0;
  for (std::uint64_t j = 1; j < n; ++j) {
    x = quad_apply(p, x);
    if (std::abs(x) <= tol_root) return false;
  }
  return true;
}

struct CascadeResult {
  std::vector<double> superstable_params;  // index k-1 holds the period-2^k member
  double c_estimate = 0.0;
  std::vector<double> delta_estimates;  // (a_k - a_{k-1}) / (a_{k+1} - a_k), k = 2..k_max-1
};

// Chains superstable_parameter. Members 1 and 2 use fixed brackets; from
// k = 3 on, the next member is predicted from the last gap shrunk by the
// current ratio estimate, and bracketed by +/- half the predicted gap. The
// degenerate a_0 = 0 seeds the first ratio.
inline CascadeResult run_cascade(unsigned k_max) {
  if (k_max < 3) throw bracket_error("run_cascade needs k_max >= 3");
  if (k_max > 24) throw bracket_error("run_cascade supports k_max <= 24");
  CascadeResult r;
  std::vector<double> a{0.0};
  a.push_back(superstable_parameter(1, {0.5, 1.2}));
  a.push_back(superstable_parameter(2, {1.2, 1.36}));
  for (unsigned k = 3; k <= k_max; ++k) {
    double last_gap = a[k - 1] - a[k - 2];
    double ratio = (a[k - 2] - a[k - 3]) / last_gap;
    double gap = last_gap / ratio;
    double predicted = a[k - 1] + gap;
    a.push_back(superstable_parameter(k, {predicted - 0.5 * gap, predicted + 0.5 * gap}));
  }
  r.superstable_params.assign(a.begin() + 1, a.end());
  for (unsigned k = 2; k + 1 <= k_max; ++k) {
    r.delta_estimates.push_back((a[k] - a[k - 1]) / (a[k + 1] - a[k]));
  }
  double delta = r.delta_estimates.back();
  r.c_estimate = a[k_max] + (a[k_max] - a[k_max - 1]) / (delta - 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Window scans

struct Window {
  double lo = 0.0;  // first grid parameter in the run
  double hi = 0.0;  // last grid parameter in the run
  std::size_t period = 0;
  std::size_t points = 0;
};

struct WindowScan {
  std::vector<std::pair<double, CycleRecord>> hits;  // attracting cycles, grid order
  std::vector<Window> windows;                       // maximal runs of equal period
};

// Grid parameter i of n on [lo, hi] (endpoints included). Computed as
// lo + (hi - lo) * (i / (n - 1)) so nested grids share bit-identical points.
inline double grid_point(double lo, double hi, std::size_t i, std::size_t n) {
  if (n < 2) return lo;
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
}

inline WindowScan scan_windows(Bracket interval, std::size_t grid_points, std::size_t max_period = default_max_period,
                               std::size_t budget = default_cycle_budget, unsigned threads = 1) {
  if (grid_points < 2) throw error("scan_windows needs at least 2 grid points");
  auto searches = parallel_map(grid_points, threads, [&](std::size_t i) {
    return find_cycle_by_convergence({grid_point(interval.lo, interval.hi, i, grid_points)}, max_period, budget);
  });

  WindowScan out;
  std::size_t prev_index = 0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const auto& s = searches[i];
    if (s.status != CycleStatus::Found || !s.cycle->attracting()) continue;
    double a = grid_point(interval.lo, interval.hi, i, grid_points);
    bool extend = !out.windows.empty() && prev_index + 1 == i && out.windows.back().period == s.cycle->period;
    if (extend) {
      out.windows.back().hi = a;
      ++out.windows.back().points;
    } else {
      out.windows.push_back({a, a, s.cycle->period, 1});
    }
    out.hits.emplace_back(a, *s.cycle);
    prev_index = i;
  }
  return out;
}

}  // namespace chaoscope
