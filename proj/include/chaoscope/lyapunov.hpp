#pragma once

// Finite-time Lyapunov exponents along orbits of the quadratic and Henon
// families.
//
// A CocycleTrace stores the running log-norm L_k = log|D f^k(start) v| for
// k = 1..steps (log_norms[k-1] holds L_k). The plain estimate is L_n / n; the
// tail supremum sup_{k in last 10%} L_k / k stands in for the limsup.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "chaoscope/maps.hpp"

namespace chaoscope {

inline constexpr std::size_t default_exponent_budget = 1'000'000;
inline constexpr double default_exponent_threshold = 0.01;
inline constexpr std::size_t renormalize_every = 32;
inline constexpr double tail_fraction = 0.1;

struct ParameterPoint {
  double a = 0.0;
  std::optional<double> b;  // set for Henon parameters
};

struct CocycleTrace {
  ParameterPoint params;
  Point2 start;          // y = 0 for the quadratic family
  std::size_t requested = 0;
  std::size_t steps = 0;  // == log_norms.size()
  std::vector<double> log_norms;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double sup_estimate = std::numeric_limits<double>::quiet_NaN();
  bool hit_critical = false;  // an exact zero factor; last entry is -inf
  bool escaped = false;       // orbit left the escape radius; prefix only
};

enum class ExponentClass { Positive, NonPositive, HitCritical, Escaped, Inconclusive };

inline std::string_view to_string(ExponentClass c) {
  switch (c) {
    case ExponentClass::Positive: return "positive";
    case ExponentClass::NonPositive: return "nonpositive";
    case ExponentClass::HitCritical: return "hit_critical";
    case ExponentClass::Escaped: return "escaped";
    case ExponentClass::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace detail {

// Neumaier-compensated running sum; log-norm sums reach ~1e3 after 1e3 steps,
// where plain summation loses digits the b = 0 reduction check needs.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
    else comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// sup of L_k / k over the last tail_fraction of the recorded steps.
inline double tail_sup(const std::vector<double>& log_norms) {
  const std::size_t n = log_norms.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  std::size_t window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = n - window + 1; k <= n; ++k) {
    best = std::max(best, log_norms[k - 1] / static_cast<double>(k));
  }
  return best;
}

inline void finish(CocycleTrace& t) {
  t.steps = t.log_norms.size();
  if (t.steps == 0) return;
  t.estimate = t.log_norms.back() / static_cast<double>(t.steps);
  t.sup_estimate = std::max(detail::tail_sup(t.log_norms), t.estimate);
}

// Shared 1-D cocycle along the orbit of x0 under Q_a.
inline CocycleTrace quadratic_cocycle(QuadraticParams p, double x0, std::size_t n, double escape_radius) {
  CocycleTrace t;
  t.params = {p.a, std::nullopt};
  t.start = {x0, 0.0};
  t.requested = n;
  t.log_norms.reserve(n);
  double x = x0;
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(x) <= escape_radius)) {
      t.escaped = true;
      break;
    }
    double factor = quad_derivative(p, x);
    if (factor == 0.0) {
      t.hit_critical = true;
      t.log_norms.push_back(-std::numeric_limits<double>::infinity());
      break;
    }
    sum.add(std::log(std::abs(factor)));
    t.log_norms.push_back(sum.value());
    x = quad_apply(p, x);
  }
  finish(t);
  return t;
}

}  // namespace detail

// Cocycle along the critical orbit: start at the critical value x = 1,
// factor at step i is log|-2 a x_i|.
inline CocycleTrace lyapunov_quadratic(QuadraticParams p, std::size_t n,
                                       double escape_radius = default_escape_radius) {
  return detail::quadratic_cocycle(p, 1.0, n, escape_radius);
}

// Same cocycle from an arbitrary start x0 (generic-point exponent).
inline CocycleTrace lyapunov_generic(QuadraticParams p, double x0, std::size_t n,
                                     double escape_radius = default_escape_radius) {
  return detail::quadratic_cocycle(p, x0, n, escape_radius);
}

// Growth of ||DH^n(z0) v0|| by iterated Jacobian-vector products. The carried
// vector is rescaled to unit length every renormalize_every steps and the
// log of the shed norm is accumulated.
inline CocycleTrace lyapunov_henon(HenonParams p, Point2 z0 = {0.0, 0.0}, Point2 v0 = {0.0, 1.0},
                                   std::size_t n = default_exponent_budget,
                                   double escape_radius = default_escape_radius) {
  CocycleTrace t;
  t.params = {p.a, p.b};
  t.start = z0;
  t.requested = n;
  t.log_norms.reserve(n);
  Point2 z = z0;
  Point2 v = v0;
  detail::CompensatedSum shed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(norm(z) <= escape_radius)) {
      t.escaped = true;
      break;
    }
    v = henon_jacobian(p, z) * v;
    double len = norm(v);
    if (len == 0.0) {
      t.hit_critical = true;
      t.log_norms.push_back(-std::numeric_limits<double>::infinity());
      break;
    }
    t.log_norms.push_back(shed.value() + std::log(len));
    if ((i + 1) % renormalize_every == 0) {
      shed.add(std::log(len));
      v = {v.x / len, v.y / len};
    }
    z = henon_apply(p, z);
  }
  detail::finish(t);
  return t;
}

inline ExponentClass classify_trace(const CocycleTrace& t, double threshold) {
  if (t.hit_critical) return ExponentClass::HitCritical;
  if (t.escaped) return ExponentClass::Escaped;
  if (t.sup_estimate > threshold) return ExponentClass::Positive;
  if (t.sup_estimate < -threshold) return ExponentClass::NonPositive;
  return ExponentClass::Inconclusive;
}

// Membership surrogate for "positive Lyapunov exponent" at finite budget.
// Positive iff the tail sup exceeds +threshold, NonPositive iff it is below
// -threshold.
inline ExponentClass classify_exponent(QuadraticParams p, std::size_t budget = default_exponent_budget,
                                       double threshold = default_exponent_threshold) {
  return classify_trace(lyapunov_quadratic(p, budget), threshold);
}

inline ExponentClass classify_exponent(HenonParams p, std::size_t budget = default_exponent_budget,
                                       double threshold = default_exponent_threshold) {
  return classify_trace(lyapunov_henon(p, {0.0, 0.0}, {0.0, 1.0}, budget), threshold);
}

}  // namespace chaoscope
