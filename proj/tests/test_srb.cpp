#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include "chaoscope/srb.hpp"

using namespace chaoscope;
using Catch::Approx;

namespace {

// Oracle: arcsine-law mass of [lo, hi] for the a = 2 invariant density
// 1 / (pi sqrt(1 - x^2)).
double arcsine_mass(double lo, double hi) { return (std::asin(hi) - std::asin(lo)) / std::numbers::pi; }

double total(const DensityHistogram& h) { return std::accumulate(h.mass.begin(), h.mass.end(), 0.0); }

}  // namespace

TEST_CASE("a = 2 histogram follows the arcsine law", "[srb][oracle]") {
  auto h = estimate_density({2.0}, 1'000'000, default_burn_in, 50);
  CHECK(h.restarted);  // the critical orbit lands on the repelling fixed point -1
  CHECK(h.lo == -1.0);
  CHECK(h.hi == 1.0);
  std::vector<double> expected;
  for (std::size_t i = 0; i < h.bins; ++i) expected.push_back(arcsine_mass(h.bin_lo(i), h.bin_hi(i)));
  CHECK(l1_distance(h.mass, expected) < 0.05);
  CHECK(birkhoff_average({2.0}, Observable::Identity, 1'000'000) == Approx(0.0).margin(0.01));
  CHECK(birkhoff_average({2.0}, Observable::Square, 1'000'000) == Approx(0.5).margin(0.01));
}

TEST_CASE("histogram mass sums to one", "[srb][property]") {
  for (double a : {0.5, 1.3, 1.76, 1.9, 2.0}) {
    for (std::size_t bins : {1u, 7u, 100u, 1000u}) {
      auto h = estimate_density({a}, 100'000, 1000, bins);
      CHECK(total(h) == Approx(1.0).margin(1e-12));
      auto f = push_forward(h, {a});
      CHECK(total(f) == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("histogram is nearly invariant under push-forward", "[srb][property]") {
  for (double a : {1.9, 2.0}) {
    for (std::size_t bins : {50u, 100u, 400u}) {
      auto h = estimate_density({a}, 1'000'000, default_burn_in, bins);
      CHECK(l1_distance(push_forward(h, {a}).mass, h.mass) < 5.0 / std::sqrt(static_cast<double>(bins)));
    }
  }
}

TEST_CASE("attracting fixed point concentrates the histogram", "[srb]") {
  auto h = estimate_density({0.5}, 10'000, 1000, 100);
  double xs = std::sqrt(3.0) - 1.0;
  CHECK_FALSE(h.restarted);
  CHECK(h.mass[h.bin_of(xs)] == Approx(1.0));
  CHECK(effective_support(h) == Approx(0.01));
  CHECK(birkhoff_average({0.5}, Observable::Identity, 10'000, 1000) == Approx(xs).margin(1e-9));
}

TEST_CASE("superstable orbit is a finite-support measure", "[srb]") {
  auto h = estimate_density({1.0}, 1000, 10, 10);
  CHECK(h.hit_critical);
  CHECK(h.mass[h.bin_of(0.0)] == Approx(0.5));
  CHECK(h.mass[h.bin_of(1.0)] == Approx(0.5));
}

TEST_CASE("evidence classes on known parameters", "[srb]") {
  auto chaotic = classify_srb_evidence({2.0}, 200'000);
  CHECK(chaotic.evidence == SrbEvidence::StochasticLike);
  CHECK(chaotic.exponent == ExponentClass::Positive);
  CHECK(chaotic.support_fraction > 0.9);

  auto p3 = classify_srb_evidence({1.76}, 200'000);
  CHECK(p3.evidence == SrbEvidence::PeriodicAttractor);
  REQUIRE(p3.cycle);
  CHECK(p3.cycle->period == 3);

  CHECK(classify_srb_evidence({2.3}, 10'000).evidence == SrbEvidence::Escaped);
}

TEST_CASE("periodic and stochastic evidence never overlap", "[srb][property]") {
  auto reports = parallel_map(60, 4, [](std::size_t i) {
    return classify_srb_evidence({grid_point(1.4, 2.0, i, 60)}, 50'000);
  });
  for (const auto& r : reports) {
    bool periodic = r.evidence == SrbEvidence::PeriodicAttractor;
    bool stochastic = r.evidence == SrbEvidence::StochasticLike;
    CHECK_FALSE((periodic && stochastic));
    if (periodic) {
      REQUIRE(r.cycle);
      CHECK(r.cycle->attracting());
    }
    if (stochastic) CHECK(r.exponent == ExponentClass::Positive);
  }
}

TEST_CASE("density estimation is deterministic", "[srb][property]") {
  auto a = estimate_density({1.85}, 200'000, 1000, 64);
  auto b = estimate_density({1.85}, 200'000, 1000, 64);
  CHECK(a.mass == b.mass);
  CHECK(histogram_csv(a) == histogram_csv(b));
}

TEST_CASE("histogram CSV layout", "[srb]") {
  auto h = estimate_density({2.0}, 1000, 10, 4);
  auto csv = histogram_csv(h);
  CHECK(csv.rfind("bin_lo,bin_hi,mass\n-1,-0.5,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("invalid density arguments are rejected", "[srb]") {
  CHECK_THROWS_AS(estimate_density({2.0}, 0), error);
  CHECK_THROWS_AS(estimate_density({2.0}, 10, 10, 0), error);
  CHECK_THROWS_AS(estimate_density({2.5}, 1000, 10, 10), escape_error);
}
