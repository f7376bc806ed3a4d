#pragma once

// Spot check of path semantics: for random inputs, the interpreter halts
// within `depth` nodes exactly when the input lies in a piece of the
// enumerated description (membership evaluated in exact arithmetic).

#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "chaoscope/bss/interpreter.hpp"
#include "chaoscope/bss/paths.hpp"
#include "chaoscope/bss/program.hpp"

namespace chaoscope::bss {

struct SoundnessMismatch {
  std::vector<double> input;
  bool halted = false;  // interpreter verdict
  bool member = false;  // description verdict
};

struct SoundnessReport {
  std::size_t samples = 0;
  std::size_t halted = 0;
  std::vector<SoundnessMismatch> mismatches;

  bool passed() const { return mismatches.empty(); }
};

inline SoundnessReport check_soundness(const Program& prog, const HaltingSetDescription& desc, std::size_t depth,
                                       std::size_t samples, std::uint64_t seed, double lo = -4.0, double hi = 4.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  SoundnessReport r;
  r.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> x(prog.input_count());
    for (auto& v : x) v = dist(rng);
    bool halted = std::holds_alternative<Halted>(run(prog, x, depth));
    std::vector<Rational> exact;
    for (double v : x) exact.push_back(to_rational(v));
    bool member = desc.contains(exact, depth);
    if (halted) ++r.halted;
    if (halted != member) r.mismatches.push_back({x, halted, member});
  }
  return r;
}

}  // namespace chaoscope::bss
