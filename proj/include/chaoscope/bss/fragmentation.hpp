#pragma once

// Run counting over parameter scans: how many disjoint Positive stretches a
// classification sequence has at increasing grid resolution, set against the
// piece count of machine halting sets at a fixed path depth.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "chaoscope/cycles.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/parallel.hpp"

namespace chaoscope::bss {

// Maximal runs of `target` in the sequence.
inline std::size_t count_runs(const std::vector<ExponentClass>& seq, ExponentClass target = ExponentClass::Positive) {
  std::size_t runs = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (seq[i] == target && (i == 0 || seq[i - 1] != target)) ++runs;
  return runs;
}

struct ResolutionScan {
  std::size_t resolution = 0;  // intervals; the grid has resolution + 1 points
  std::vector<ExponentClass> classes;
};

// Classifies Q_a on the grid lo + (hi - lo) * i / resolution. Grids whose
// resolutions divide one another share their common points bit for bit.
inline ResolutionScan classify_grid(double lo, double hi, std::size_t resolution, std::size_t budget,
                                    unsigned threads = default_thread_count()) {
  if (resolution < 1) throw error("resolution must be at least 1");
  ResolutionScan s;
  s.resolution = resolution;
  s.classes = parallel_map(resolution + 1, threads, [&](std::size_t i) {
    return classify_exponent(QuadraticParams{grid_point(lo, hi, i, resolution + 1)}, budget);
  });
  return s;
}

struct MachineBound {
  std::string name;
  std::size_t depth = 0;
  std::size_t pieces = 0;  // from enumerate_paths at that depth

  // 2^depth, saturating
  double bound() const { return depth >= 1024 ? HUGE_VAL : std::ldexp(1.0, static_cast<int>(depth)); }
  bool within_bound() const { return static_cast<double>(pieces) <= bound(); }
};

struct FragmentationRow {
  std::size_t resolution = 0;
  std::size_t points = 0;
  std::size_t positive_runs = 0;
};

struct FragmentationReport {
  std::vector<FragmentationRow> rows;
  std::vector<MachineBound> machines;

  bool non_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].positive_runs < rows[i - 1].positive_runs) return false;
    return true;
  }

  bool machines_within_bound() const {
    for (const auto& m : machines)
      if (!m.within_bound()) return false;
    return true;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "resolution,points,positive_runs\n";
    for (const auto& r : rows) os << r.resolution << ',' << r.points << ',' << r.positive_runs << '\n';
    os << "# positive-run counts " << (non_decreasing() ? "non-decreasing" : "DECREASING") << " across resolutions\n";
    os << "# contrast: a machine's halting paths of depth d give at most 2^d basic semi-algebraic pieces,"
          " so its halting set has at most 2^d components at that depth\n";
    for (const auto& m : machines) {
      os << "# machine " << m.name << " depth=" << m.depth << " pieces=" << m.pieces << " bound=2^" << m.depth << ' '
         << (m.within_bound() ? "ok" : "EXCEEDED") << '\n';
    }
    return os.str();
  }
};

inline FragmentationReport fragmentation_report(const std::vector<ResolutionScan>& scans,
                                                std::vector<MachineBound> machines = {}) {
  FragmentationReport r;
  for (const auto& s : scans) r.rows.push_back({s.resolution, s.classes.size(), count_runs(s.classes)});
  r.machines = std::move(machines);
  return r;
}

}  // namespace chaoscope::bss
