#pragma once

// Real root isolation for univariate rational polynomials by Descartes'
// rule of signs on dyadic subintervals, in exact arithmetic.

#include <cstddef>
#include <vector>

#include "chaoscope/bss/polynomial.hpp"
#include "chaoscope/error.hpp"

namespace chaoscope::bss {

inline constexpr int max_subdivision_depth = 128;

// Open interval (lo, hi) holding exactly one root, or the exact root lo == hi.
struct RootInterval {
  Rational lo;
  Rational hi;

  bool exact() const { return lo == hi; }
};

// Power of two at or above the Cauchy bound 1 + max |a_i / a_n|.
inline Rational root_bound(const UPoly& p) {
  Rational m = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) m = std::max(m, Rational(boost::multiprecision::abs(p[i] / p.back())));
  Rational b = 1;
  while (b < m + 1) b *= 2;
  return b;
}

// Upper bound on the number of roots of p in the open interval (lo, hi); exact
// when it is 0 or 1.
inline std::size_t descartes_bound(const UPoly& p, const Rational& lo, const Rational& hi) {
  // q(x) = p(lo + (hi - lo) x) maps (0, 1) onto (lo, hi); then
  // (1 + x)^n q(1 / (1 + x)) maps (0, inf) onto (0, 1).
  UPoly q = scale_argument(taylor_shift(p, lo), hi - lo);
  return sign_variations(taylor_shift(reverse(q), Rational(1)));
}

namespace detail {

inline void isolate(const UPoly& p, const Rational& lo, const Rational& hi, int depth, std::vector<RootInterval>& out) {
  std::size_t v = descartes_bound(p, lo, hi);
  if (v == 0) return;
  if (v == 1) {
    out.push_back({lo, hi});
    return;
  }
  if (depth >= max_subdivision_depth)
    throw unresolved_root_error("roots not separated after " + std::to_string(max_subdivision_depth) + " subdivisions");
  Rational mid = (lo + hi) / 2;
  isolate(p, lo, mid, depth + 1, out);
  if (sign_at(p, mid) == 0) out.push_back({mid, mid});
  isolate(p, mid, hi, depth + 1, out);
}

}  // namespace detail

// Isolating intervals for the real roots of p (made square-free first), in
// increasing order. Consecutive intervals may share an endpoint.
inline std::vector<RootInterval> isolate_roots(const UPoly& poly) {
  UPoly p = squarefree_part(poly);
  std::vector<RootInterval> out;
  if (degree(p) <= 0) return out;
  Rational b = root_bound(p);
  detail::isolate(p, -b, b, 0, out);
  return out;
}

// Halves an inexact interval, keeping the half with the root (or collapsing
// onto an exact dyadic root). p must be square-free.
inline void bisect(const UPoly& p, RootInterval& r) {
  if (r.exact()) return;
  Rational mid = (r.lo + r.hi) / 2;
  if (sign_at(p, mid) == 0) {
    r.lo = r.hi = mid;
  } else if (descartes_bound(p, r.lo, mid) == 1) {
    r.hi = mid;
  } else {
    r.lo = mid;
  }
}

// Refines isolating intervals of square-free p until neighbours are strictly
// separated and no inexact interval has a root of p as an endpoint.
inline void separate(const UPoly& p, std::vector<RootInterval>& roots) {
  for (int round = 0;; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      auto& r = roots[i];
      if (r.exact()) continue;
      bool touches_left = i > 0 && roots[i - 1].hi >= r.lo;
      bool touches_right = i + 1 < roots.size() && roots[i + 1].lo <= r.hi;
      if (touches_left || touches_right || sign_at(p, r.lo) == 0 || sign_at(p, r.hi) == 0) {
        bisect(p, r);
        changed = true;
      }
    }
    if (!changed) return;
    if (round > max_subdivision_depth)
      throw unresolved_root_error("could not separate neighbouring root intervals");
  }
}

}  // namespace chaoscope::bss
