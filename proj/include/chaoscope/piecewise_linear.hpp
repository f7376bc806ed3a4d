#pragma once

// Piecewise-linear (possibly discontinuous) interval maps, their Markov
// partitions, and the 0/1 transition matrix between pieces.
//
// Text format: one piece per line, `lo hi slope intercept`, whitespace
// separated decimal literals; on [lo, hi] the map is slope * x + intercept.
// Blank lines and `#` comments are ignored.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscope/error.hpp"

namespace chaoscope {

inline constexpr double tol_markov = 1e-9;
inline constexpr int max_markov_refinements = 8;

struct LinearPiece {
  double lo = 0.0;
  double hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const noexcept { return slope * x + intercept; }
  double image_lo() const noexcept { return std::min((*this)(lo), (*this)(hi)); }
  double image_hi() const noexcept { return std::max((*this)(lo), (*this)(hi)); }
};

class PiecewiseLinearMap {
 public:
  PiecewiseLinearMap() = default;

  // Pieces must be given left to right, each with lo < hi, sharing endpoints
  // exactly, and every image must stay in the domain (within tol_markov).
  explicit PiecewiseLinearMap(std::vector<LinearPiece> pieces) : pieces_(std::move(pieces)) { validate(); }

  const std::vector<LinearPiece>& pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }
  double domain_lo() const { return pieces_.front().lo; }
  double domain_hi() const { return pieces_.back().hi; }

  // Partition points lo_0 < lo_1 < ... < hi_last.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (const auto& p : pieces_) b.push_back(p.lo);
    b.push_back(domain_hi());
    return b;
  }

  // Evaluates with the convention that a shared breakpoint belongs to the
  // piece on its right (the last piece keeps its right endpoint).
  double operator()(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const LinearPiece& p) { return v < p.hi; });
    if (it == pieces_.end()) it = std::prev(pieces_.end());
    return (*it)(x);
  }

 private:
  void validate() const {
    if (pieces_.empty()) throw error("piecewise-linear map needs at least one piece");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& p = pieces_[i];
      if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !std::isfinite(p.slope) || !std::isfinite(p.intercept))
        throw error("piece " + std::to_string(i) + " has a non-finite value");
      if (!(p.lo < p.hi)) throw error("piece " + std::to_string(i) + " must satisfy lo < hi");
      if (i > 0 && pieces_[i - 1].hi != p.lo)
        throw error("pieces " + std::to_string(i - 1) + " and " + std::to_string(i) + " do not share an endpoint");
    }
    const double lo = domain_lo(), hi = domain_hi();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (pieces_[i].image_lo() < lo - tol_markov || pieces_[i].image_hi() > hi + tol_markov)
        throw error("image of piece " + std::to_string(i) + " leaves the domain");
    }
  }

  std::vector<LinearPiece> pieces_;
};

inline PiecewiseLinearMap parse_piecewise_linear(std::string_view text) {
  std::vector<LinearPiece> pieces;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    double values[4];
    int count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (count == 4) throw parse_error("expected exactly 4 numbers per piece", line_no, start + 1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + i, v);
      if (ec != std::errc{} || ptr != line.data() + i)
        throw parse_error("invalid number '" + std::string(line.substr(start, i - start)) + "'", line_no, start + 1);
      values[count++] = v;
    }
    if (count == 0) continue;
    if (count != 4) throw parse_error("expected exactly 4 numbers per piece", line_no, 1);
    pieces.push_back({values[0], values[1], values[2], values[3]});
    if (end == text.size()) break;
  }
  if (pieces.empty()) throw parse_error("no pieces", line_no, 1);
  return PiecewiseLinearMap(std::move(pieces));
}

inline std::string format_piecewise_linear(const PiecewiseLinearMap& m) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& p : m.pieces()) os << p.lo << ' ' << p.hi << ' ' << p.slope << ' ' << p.intercept << '\n';
  return os.str();
}

namespace detail {

inline bool near_breakpoint(const std::vector<double>& bps, double v) {
  auto it = std::lower_bound(bps.begin(), bps.end(), v - tol_markov);
  return it != bps.end() && std::abs(*it - v) <= tol_markov;
}

// Image endpoints that are not (within tol_markov) partition points.
inline std::vector<double> non_markov_points(const PiecewiseLinearMap& m) {
  const auto bps = m.breakpoints();
  std::vector<double> missing;
  for (const auto& p : m.pieces()) {
    for (double v : {p.image_lo(), p.image_hi()}) {
      if (!near_breakpoint(bps, v)) missing.push_back(v);
    }
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end(),
                            [](double u, double v) { return std::abs(u - v) <= tol_markov; }),
                missing.end());
  return missing;
}

}  // namespace detail

// Images of pieces are unions of pieces, within tol_markov.
inline bool is_markov(const PiecewiseLinearMap& m) { return detail::non_markov_points(m).empty(); }

// Inserts image endpoints as new breakpoints, round by round, until the
// partition is Markov. Each round splits the pieces containing the missing
// points, whose own images then bring in the next points of the breakpoint
// orbits. Throws not_markov_error after max_rounds rounds.
inline PiecewiseLinearMap refine_to_markov(const PiecewiseLinearMap& m, int max_rounds = max_markov_refinements) {
  PiecewiseLinearMap current = m;
  for (int round = 0;; ++round) {
    auto missing = detail::non_markov_points(current);
    if (missing.empty()) return current;
    if (round == max_rounds)
      throw not_markov_error("partition is not Markov after " + std::to_string(max_rounds) + " refinements");
    std::vector<LinearPiece> next;
    for (const auto& p : current.pieces()) {
      double lo = p.lo;
      for (double v : missing) {
        if (v > lo + tol_markov && v < p.hi - tol_markov) {
          next.push_back({lo, v, p.slope, p.intercept});
          lo = v;
        }
      }
      next.push_back({lo, p.hi, p.slope, p.intercept});
    }
    current = PiecewiseLinearMap(std::move(next));
  }
}

// 0/1 matrix with entry (i, j) = 1 iff piece j lies inside the image of piece i.
inline std::vector<std::vector<int>> transition_matrix(const PiecewiseLinearMap& m) {
  const auto& ps = m.pieces();
  std::vector<std::vector<int>> t(ps.size(), std::vector<int>(ps.size(), 0));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double lo = ps[i].image_lo(), hi = ps[i].image_hi();
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (ps[j].lo >= lo - tol_markov && ps[j].hi <= hi + tol_markov) t[i][j] = 1;
    }
  }
  return t;
}

}  // namespace chaoscope
