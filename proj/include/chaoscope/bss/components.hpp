#pragma once

// Connected components of a one-variable halting-set description. All
// constraint roots are isolated exactly; the line then splits into the root
// points and the open intervals between them, on each of which every
// constraint has constant sign. Components are maximal runs of member cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "chaoscope/bss/paths.hpp"
#include "chaoscope/bss/polynomial.hpp"
#include "chaoscope/bss/roots.hpp"
#include "chaoscope/error.hpp"

namespace chaoscope::bss {

struct Cell {
  // A root cell holds its isolating interval; an open cell spans from the
  // previous root interval to the next one (the outer cells are cut at 1 past
  // the extreme roots).
  Rational lo;
  Rational hi;
  bool point = false;
  bool member = false;
};

struct ComponentReport {
  std::size_t components = 0;
  std::vector<Cell> cells;  // left to right
};

namespace detail {

// Sign of h at the unique root of sf inside r. sf is square-free, divisible
// by every root of h, and non-zero at inexact endpoints of r.
inline int sign_at_root(const UPoly& h, const UPoly& sf, const RootInterval& r) {
  if (r.exact()) return sign_at(h, r.lo);
  UPoly g = gcd(h, sf);
  if (degree(g) > 0 && sign_at(g, r.lo) != sign_at(g, r.hi)) return 0;
  return sign_at(h, r.lo);
}

inline bool piece_holds(const std::vector<int>& strict_signs, const std::vector<int>& nonstrict_signs) {
  return std::all_of(strict_signs.begin(), strict_signs.end(), [](int s) { return s < 0; }) &&
         std::all_of(nonstrict_signs.begin(), nonstrict_signs.end(), [](int s) { return s <= 0; });
}

}  // namespace detail

inline std::size_t count_member_runs(const std::vector<bool>& members) {
  std::size_t runs = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i] && (i == 0 || !members[i - 1])) ++runs;
  return runs;
}

// Exact cell decomposition and component count. Requires exactly one input
// variable. Throws unresolved_root_error if isolation hits its cap.
inline ComponentReport components_1d_report(const HaltingSetDescription& desc) {
  if (desc.inputs.size() != 1) throw error("component counting needs exactly one input variable");

  struct PieceData {
    std::vector<UPoly> strict, nonstrict;
  };
  std::vector<PieceData> pieces;
  UPoly product{Rational(1)};
  for (const auto& s : desc.pieces) {
    PieceData d;
    for (const auto& h : s.strict) d.strict.push_back(to_univariate(h));
    for (const auto& h : s.nonstrict) d.nonstrict.push_back(to_univariate(h));
    for (const auto* list : {&d.strict, &d.nonstrict})
      for (const auto& u : *list) product = squarefree_part(multiply(product, u));
    pieces.push_back(std::move(d));
  }
  const UPoly sf = squarefree_part(product);
  auto roots = isolate_roots(sf);
  separate(sf, roots);

  ComponentReport report;
  auto open_member = [&](const Rational& x) {
    for (const auto& d : pieces) {
      std::vector<int> ss, ns;
      for (const auto& h : d.strict) ss.push_back(sign_at(h, x));
      for (const auto& h : d.nonstrict) ns.push_back(sign_at(h, x));
      if (detail::piece_holds(ss, ns)) return true;
    }
    return false;
  };
  auto root_member = [&](const RootInterval& r) {
    for (const auto& d : pieces) {
      std::vector<int> ss, ns;
      for (const auto& h : d.strict) ss.push_back(detail::sign_at_root(h, sf, r));
      for (const auto& h : d.nonstrict) ns.push_back(detail::sign_at_root(h, sf, r));
      if (detail::piece_holds(ss, ns)) return true;
    }
    return false;
  };

  if (roots.empty()) {
    report.cells.push_back({Rational(0), Rational(0), false, open_member(Rational(0))});
  } else {
    report.cells.push_back({roots.front().lo - 1, roots.front().lo, false, open_member(roots.front().lo - 1)});
    for (std::size_t i = 0; i < roots.size(); ++i) {
      report.cells.push_back({roots[i].lo, roots[i].hi, true, root_member(roots[i])});
      Rational right = i + 1 < roots.size() ? roots[i + 1].lo : roots[i].hi + 2;
      Rational sample = (roots[i].hi + right) / 2;
      report.cells.push_back({roots[i].hi, right, false, open_member(sample)});
    }
  }
  std::vector<bool> members;
  for (const auto& c : report.cells) members.push_back(c.member);
  report.components = count_member_runs(members);
  return report;
}

inline std::size_t components_1d(const HaltingSetDescription& desc) { return components_1d_report(desc).components; }

namespace detail {

// Sign of a univariate polynomial at a double point: Horner in double with a
// running error bound, falling back to exact rational evaluation when the
// bound does not settle the sign. Expanded high-degree path polynomials
// cancel badly in floating point, so the plain double value is not usable.
class FilteredPoly {
 public:
  explicit FilteredPoly(const UPoly& p) : exact_(p) {
    for (const auto& c : p) {
      coeff_.push_back(to_double(c));
      abs_coeff_.push_back(std::abs(coeff_.back()));
    }
  }

  int sign(double x) const {
    if (exact_.empty()) return 0;
    double v = 0.0, mag = 0.0;
    const double ax = std::abs(x);
    for (std::size_t i = coeff_.size(); i-- > 0;) {
      v = v * x + coeff_[i];
      mag = mag * ax + abs_coeff_[i];
    }
    const double u = std::numeric_limits<double>::epsilon();
    const double bound = 4.0 * static_cast<double>(coeff_.size() + 1) * u * mag;
    if (std::isfinite(v) && std::isfinite(bound) && std::abs(v) > bound) return v > 0.0 ? 1 : -1;
    return sign_at(exact_, to_rational(x));
  }

 private:
  UPoly exact_;
  std::vector<double> coeff_;
  std::vector<double> abs_coeff_;
};

}  // namespace detail

// Membership at `samples` evenly spaced points of [lo, hi], with exact signs,
// and the number of maximal member runs among them.
struct ScanCount {
  std::size_t runs = 0;
  std::size_t members = 0;
};

inline ScanCount brute_force_components(const HaltingSetDescription& desc, double lo, double hi, std::size_t samples) {
  if (desc.inputs.size() != 1) throw error("component counting needs exactly one input variable");
  if (samples < 2 || !(lo < hi)) throw error("brute-force scan needs samples >= 2 and lo < hi");
  struct Piece {
    std::vector<detail::FilteredPoly> strict, nonstrict;
  };
  std::vector<Piece> pieces;
  for (const auto& s : desc.pieces) {
    Piece p;
    for (const auto& h : s.strict) p.strict.emplace_back(to_univariate(h));
    for (const auto& h : s.nonstrict) p.nonstrict.emplace_back(to_univariate(h));
    pieces.push_back(std::move(p));
  }
  auto member_at = [&](double x) {
    for (const auto& p : pieces) {
      bool ok = std::all_of(p.strict.begin(), p.strict.end(), [&](const auto& h) { return h.sign(x) < 0; }) &&
                std::all_of(p.nonstrict.begin(), p.nonstrict.end(), [&](const auto& h) { return h.sign(x) <= 0; });
      if (ok) return true;
    }
    return false;
  };
  std::vector<bool> member(samples);
  ScanCount out;
  for (std::size_t i = 0; i < samples; ++i) {
    double x = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(samples - 1));
    member[i] = member_at(x);
    if (member[i]) ++out.members;
  }
  out.runs = count_member_runs(member);
  return out;
}

}  // namespace chaoscope::bss
