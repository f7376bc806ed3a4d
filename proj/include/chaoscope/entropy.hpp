#pragma once

// Topological entropy three ways:
//   * lap numbers of Q_a^n (exact integer counts from the preimage tree of the
//     critical point),
//   * greedy (n, eps)-separated subsets of a finite sample under the dynamical
//     metric max_{0<=j<=n} d(f^j x, f^j y),
//   * log of the spectral radius of the transition matrix of a Markov
//     piecewise-linear map.
// Plus a monotonicity check along a parameter grid and the decision procedure
// for positive entropy in the quadratic family.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chaoscope/cycles.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/maps.hpp"
#include "chaoscope/piecewise_linear.hpp"

namespace chaoscope {

inline constexpr unsigned lap_n_max = 22;
inline constexpr unsigned default_cascade_depth = 10;
inline constexpr double default_entropy_margin = 1e-4;
inline constexpr double separated_eps_schedule[] = {0.05, 0.02, 0.01};

enum class EntropyMethod { LapCount, SeparatedSet, MarkovSpectral };

inline std::string_view to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::LapCount: return "lap_count";
    case EntropyMethod::SeparatedSet: return "separated_set";
    case EntropyMethod::MarkovSpectral: return "markov_spectral";
  }
  return "unknown";
}

// diagnostics by method:
//   LapCount       : (1/k) log lap(k) for k = 1..n_max
//   SeparatedSet   : cardinalities (one per n, or one per eps in a schedule)
//   MarkovSpectral : lower and upper bound on the spectral radius
struct EntropyEstimate {
  double value = 0.0;  // nats, >= 0
  EntropyMethod method = EntropyMethod::LapCount;
  std::optional<double> error_bound;
  std::vector<double> diagnostics;
};

// ---------------------------------------------------------------------------
// Lap numbers

// Number of points x in (-1, 1) with Q_a^i(x) = 0, for i = 0..n-1, walking
// the preimage tree x = +-sqrt((1 - y) / a). [-1, 1] is forward invariant for
// 0 < a <= 2, so a branch that leaves it never comes back. Endpoints are not
// turning points, and a preimage that lands exactly on 0 again (a periodic
// critical point) is the root itself, so its subtree is not re-counted.
inline std::vector<std::uint64_t> critical_preimage_counts(QuadraticParams p, unsigned n) {
  if (!(p.a > 0.0 && p.a <= 2.0)) throw error("lap counting needs 0 < a <= 2");
  if (n > lap_n_max) throw error("lap counting supports n <= " + std::to_string(lap_n_max));
  std::vector<std::uint64_t> counts(n, 0);
  if (n == 0) return counts;
  struct Node {
    double y;
    unsigned level;
  };
  std::vector<Node> stack{{0.0, 0}};
  while (!stack.empty()) {
    Node node = stack.back();
    stack.pop_back();
    ++counts[node.level];
    if (node.level + 1 >= n) continue;
    double t = (1.0 - node.y) / p.a;
    if (!(t > 0.0)) continue;
    double x = std::sqrt(t);
    if (!(x < 1.0)) continue;
    stack.push_back({x, node.level + 1});
    stack.push_back({-x, node.level + 1});
  }
  return counts;
}

// lap(k) for k = 1..n, as laps[k - 1].
inline std::vector<std::uint64_t> lap_counts(QuadraticParams p, unsigned n) {
  auto counts = critical_preimage_counts(p, n);
  std::vector<std::uint64_t> laps(n);
  std::uint64_t acc = 1;
  for (unsigned i = 0; i < n; ++i) {
    acc += counts[i];
    laps[i] = acc;
  }
  return laps;
}

// Number of monotone laps of Q_a^n on [-1, 1].
inline std::uint64_t lap_count(QuadraticParams p, unsigned n) {
  if (n == 0) throw error("lap_count needs n >= 1");
  return lap_counts(p, n).back();
}

// Entropy from lap growth. By submultiplicativity, s_k = (1/k) log lap(k)
// bounds the entropy from above; the value is the last growth rate
// log(lap(n) / lap(n-1)), capped by s_n, and error_bound = s_n - value so that
// value + error_bound is the upper bound.
inline EntropyEstimate entropy_lap(QuadraticParams p, unsigned n_max = lap_n_max) {
  if (n_max < 2) throw error("entropy_lap needs n_max >= 2");
  auto laps = lap_counts(p, n_max);
  EntropyEstimate e;
  e.method = EntropyMethod::LapCount;
  for (unsigned k = 1; k <= n_max; ++k) e.diagnostics.push_back(std::log(static_cast<double>(laps[k - 1])) / k);
  const double upper = e.diagnostics.back();
  const double growth =
      std::log(static_cast<double>(laps[n_max - 1])) - std::log(static_cast<double>(laps[n_max - 2]));
  e.value = std::clamp(growth, 0.0, upper);
  e.error_bound = upper - e.value;
  return e;
}

// ---------------------------------------------------------------------------
// Separated sets

namespace detail {

inline double sort_key(double x) { return x; }
inline double sort_key(Point2 z) { return z.x; }

template <class State>
struct Trajectories {
  std::size_t length = 0;  // states per trajectory (n + 1)
  std::vector<State> data;
  std::vector<std::size_t> order;  // sample indices sorted by first coordinate

  const State* row(std::size_t i) const { return data.data() + i * length; }
};

template <DynamicalMap Map>
Trajectories<typename Map::state_type> trajectories(const Map& f, std::span<const typename Map::state_type> sample,
                                                    unsigned n) {
  Trajectories<typename Map::state_type> t;
  t.length = n + 1;
  t.data.resize(sample.size() * t.length);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    auto x = sample[i];
    for (std::size_t j = 0; j <= n; ++j) {
      t.data[i * t.length + j] = x;
      x = f(x);
    }
  }
  t.order.resize(sample.size());
  std::iota(t.order.begin(), t.order.end(), std::size_t{0});
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::size_t a, std::size_t b) { return sort_key(sample[a]) < sort_key(sample[b]); });
  return t;
}

// Greedy maximal (n, eps)-separated subset, scanning points by increasing
// first coordinate. A candidate only needs checking against chosen points
// whose first coordinate is within eps (all others are separated at j = 0).
template <DynamicalMap Map>
std::vector<std::size_t> greedy_separated(const Trajectories<typename Map::state_type>& t, unsigned n, double eps) {
  std::vector<std::size_t> chosen;
  std::size_t window_start = 0;
  for (std::size_t id : t.order) {
    const auto* row = t.row(id);
    const double key = sort_key(row[0]);
    while (window_start < chosen.size() && sort_key(t.row(chosen[window_start])[0]) < key - eps) ++window_start;
    bool separated_from_all = true;
    for (std::size_t c = window_start; c < chosen.size() && separated_from_all; ++c) {
      const auto* other = t.row(chosen[c]);
      bool separated = false;
      for (std::size_t j = 0; j <= n; ++j) {
        if (Map::distance(row[j], other[j]) > eps) {
          separated = true;
          break;
        }
      }
      separated_from_all = separated;
    }
    if (separated_from_all) chosen.push_back(id);
  }
  return chosen;
}

}  // namespace detail

// Indices (into `sample`) of a greedy maximal (n, eps)-separated subset.
template <DynamicalMap Map>
std::vector<std::size_t> separated_subset(const Map& f, std::span<const typename Map::state_type> sample, unsigned n,
                                          double eps) {
  auto t = detail::trajectories(f, sample, n);
  return detail::greedy_separated<Map>(t, n, eps);
}

// (1/n) log |E| for a greedy (n, eps)-separated subset E of the sample. This
// is a lower bound on (1/n) log s_n(eps) restricted to the sample; no upper
// bound is claimed, so error_bound stays empty. diagnostics = {|E|}.
template <DynamicalMap Map>
EntropyEstimate estimate_entropy_separated(const Map& f, std::span<const typename Map::state_type> sample, unsigned n,
                                           double eps) {
  if (n == 0) throw error("separated-set estimate needs n >= 1");
  if (!(eps > 0.0)) throw error("separated-set estimate needs eps > 0");
  if (sample.empty()) throw error("separated-set estimate needs a non-empty sample");
  auto chosen = separated_subset(f, sample, n, eps);
  EntropyEstimate e;
  e.method = EntropyMethod::SeparatedSet;
  e.value = std::max(0.0, std::log(static_cast<double>(chosen.size())) / n);
  e.diagnostics = {static_cast<double>(chosen.size())};
  return e;
}

// Growth-rate variant: cardinalities s_k of greedy (k, eps)-separated subsets
// for k = 1..n, then (log s_k2 - log s_k1) / (k2 - k1) where k2 is the largest
// k whose count stays below sample/16 (so the finite sample does not cap it)
// and k1 = k2 / 2. The eps-dependent prefactor of s_k cancels in the ratio.
// diagnostics = {s_1, ..., s_n, k1, k2}.
template <DynamicalMap Map>
EntropyEstimate estimate_entropy_separated_growth(const Map& f, std::span<const typename Map::state_type> sample,
                                                  unsigned n, double eps) {
  if (n < 2) throw error("separated-set growth estimate needs n >= 2");
  if (!(eps > 0.0)) throw error("separated-set estimate needs eps > 0");
  if (sample.empty()) throw error("separated-set estimate needs a non-empty sample");
  auto t = detail::trajectories(f, sample, n);
  const double cap = static_cast<double>(sample.size()) / 16.0;
  std::vector<double> counts;
  unsigned k2 = 2;
  for (unsigned k = 1; k <= n; ++k) {
    double s = static_cast<double>(detail::greedy_separated<Map>(t, k, eps).size());
    if (s > cap) {
      if (k <= 2) throw error("sample too small for this eps: count at k = " + std::to_string(k) + " is capped");
      break;  // larger k only grows further
    }
    counts.push_back(s);
    k2 = k;
  }
  const unsigned k1 = std::max(1u, k2 / 2);
  EntropyEstimate e;
  e.method = EntropyMethod::SeparatedSet;
  e.value = std::max(0.0, (std::log(counts[k2 - 1]) - std::log(counts[k1 - 1])) / (k2 - k1));
  e.diagnostics = counts;
  e.diagnostics.push_back(k1);
  e.diagnostics.push_back(k2);
  return e;
}

// Runs the plain estimator over the fixed eps schedule {0.05, 0.02, 0.01} and
// reports the eps = 0.01 value; diagnostics hold the value at each eps.
template <DynamicalMap Map>
EntropyEstimate entropy_separated_schedule(const Map& f, std::span<const typename Map::state_type> sample,
                                           unsigned n) {
  auto t = detail::trajectories(f, sample, n);
  EntropyEstimate e;
  e.method = EntropyMethod::SeparatedSet;
  for (double eps : separated_eps_schedule) {
    double size = static_cast<double>(detail::greedy_separated<Map>(t, n, eps).size());
    e.value = std::max(0.0, std::log(size) / n);
    e.diagnostics.push_back(e.value);
  }
  return e;
}

// `count` points of the orbit of x0 (or z0) after
// burn_in steps. Used for attractor samples of the Henon map.
template <DynamicalMap Map>
std::vector<typename Map::state_type> orbit_sample(const Map& f, typename Map::state_type start, std::size_t burn_in,
                                                   std::size_t count) {
  auto x = advance(f, start, burn_in);
  std::vector<typename Map::state_type> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(x);
    x = f(x);
  }
  return out;
}

// Evenly spaced cell midpoints of [lo, hi].
inline std::vector<double> uniform_sample(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * ((static_cast<double>(i) + 0.5) / static_cast<double>(count));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markov spectral entropy

struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;
};

namespace detail {

// Tarjan's strongly connected components of the directed graph of a 0/1 matrix.
inline std::vector<std::vector<std::size_t>> strong_components(const std::vector<std::vector<int>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  std::size_t counter = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (!m[v][w]) continue;
      if (index[w] == SIZE_MAX) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == SIZE_MAX) visit(v);
  return comps;
}

// Collatz-Wielandt bounds for an irreducible block: power iteration on
// B + I keeps the iterate strictly positive, and for positive v
//   min_i (Bv)_i / v_i <= rho(B) <= max_i (Bv)_i / v_i.
inline SpectralBounds irreducible_bounds(const std::vector<std::vector<int>>& m, const std::vector<std::size_t>& comp) {
  const std::size_t n = comp.size();
  std::vector<double> v(n, 1.0), w(n);
  SpectralBounds b;
  for (int it = 0; it < 200000; ++it) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (m[comp[i]][comp[j]]) s += v[j];
      double ratio = s / v[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      w[i] = s + v[i];
    }
    b = {lo, hi};
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    double scale = *std::max_element(w.begin(), w.end());
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / scale;
  }
  return b;
}

}  // namespace detail

// Bounds on the spectral radius of a square 0/1 matrix: the maximum over its
// strongly connected blocks (a block with no internal edge contributes 0).
inline SpectralBounds spectral_radius_bounds(const std::vector<std::vector<int>>& m) {
  SpectralBounds total;
  for (const auto& comp : detail::strong_components(m)) {
    bool has_edge = false;
    for (std::size_t i : comp)
      for (std::size_t j : comp) has_edge = has_edge || m[i][j];
    if (!has_edge) continue;
    auto b = detail::irreducible_bounds(m, comp);
    total.lower = std::max(total.lower, b.lower);
    total.upper = std::max(total.upper, b.upper);
  }
  return total;
}

// log of the spectral radius of the piece transition matrix. Throws
// not_markov_error unless the partition is Markov; pass refine = true to first
// insert image endpoints (at most max_markov_refinements rounds).
inline EntropyEstimate entropy_pl_markov(const PiecewiseLinearMap& m, bool refine = false) {
  PiecewiseLinearMap map = refine ? refine_to_markov(m) : m;
  if (!is_markov(map)) throw not_markov_error("partition is not Markov; image endpoints miss the breakpoints");
  auto bounds = spectral_radius_bounds(transition_matrix(map));
  EntropyEstimate e;
  e.method = EntropyMethod::MarkovSpectral;
  e.diagnostics = {bounds.lower, bounds.upper};
  if (bounds.upper <= 1.0) {
    e.value = 0.0;
    e.error_bound = 0.0;
    return e;
  }
  double lo = std::log(std::max(bounds.lower, 1.0));
  double hi = std::log(bounds.upper);
  e.value = 0.5 * (lo + hi);
  e.error_bound = 0.5 * (hi - lo);
  return e;
}

// ---------------------------------------------------------------------------
// Monotonicity along a parameter grid

struct MonotonicityViolation {
  std::size_t index = 0;  // violation between grid[index] and grid[index + 1]
  double a_left = 0.0;
  double a_right = 0.0;
  double drop = 0.0;     // value(left) - value(right)
  double allowed = 0.0;  // sum of the two error bounds
};

struct MonotonicityReport {
  std::vector<double> grid;
  std::vector<EntropyEstimate> estimates;
  std::vector<MonotonicityViolation> violations;

  bool passed() const { return violations.empty(); }
};

// Checks that a -> h_top(Q_a) is non-decreasing on the grid, up to the
// lap-count error bounds.
inline MonotonicityReport check_monotonicity(std::span<const double> grid, unsigned n_max = 18, unsigned threads = 1) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] < grid[i - 1]) throw error("monotonicity grid must be non-decreasing");
  MonotonicityReport r;
  r.grid.assign(grid.begin(), grid.end());
  r.estimates = parallel_map(grid.size(), threads, [&](std::size_t i) { return entropy_lap({grid[i]}, n_max); });
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double drop = r.estimates[i].value - r.estimates[i + 1].value;
    double allowed = r.estimates[i].error_bound.value_or(0.0) + r.estimates[i + 1].error_bound.value_or(0.0);
    if (drop > allowed) r.violations.push_back({i, grid[i], grid[i + 1], drop, allowed});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decision procedure for positive entropy

enum class EntropyVerdict { Positive, Zero, Boundary };

inline std::string_view to_string(EntropyVerdict v) {
  switch (v) {
    case EntropyVerdict::Positive: return "POSITIVE";
    case EntropyVerdict::Zero: return "ZERO";
    case EntropyVerdict::Boundary: return "BOUNDARY";
  }
  return "UNKNOWN";
}

// Accumulation point of the period-doubling cascade at the given depth,
// computed once per depth; concurrent callers block on the first computation
// and all observe the same value.
inline double cascade_boundary(unsigned depth = default_cascade_depth) {
  static std::mutex mutex;
  static std::map<unsigned, double> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(depth);
  if (it != cache.end()) return it->second;
  double c = run_cascade(depth).c_estimate;
  cache.emplace(depth, c);
  return c;
}

struct EntropyDecision {
  EntropyVerdict verdict = EntropyVerdict::Boundary;
  double c = 0.0;
  double margin = 0.0;
};

// Zero-entropy parameters form the interval (0, c]; decides membership with
// an explicit numerical band of width `margin` around c.
inline EntropyDecision decide_ent_plus(double a, unsigned cascade_depth = default_cascade_depth,
                                       double margin = default_entropy_margin) {
  if (!(a > 0.0 && a <= 2.0)) throw error("decide_ent_plus needs 0 < a <= 2");
  if (!(margin >= 0.0)) throw error("margin must be non-negative");
  const double c = cascade_boundary(cascade_depth);
  EntropyDecision d{EntropyVerdict::Boundary, c, margin};
  if (a > c + margin) d.verdict = EntropyVerdict::Positive;
  else if (a < c - margin) d.verdict = EntropyVerdict::Zero;
  return d;
}

}  // namespace chaoscope
