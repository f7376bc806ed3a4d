#include <catch_amalgamated.hpp>

#include <cmath>

#include "chaoscope/cycles.hpp"

using namespace chaoscope;
using Catch::Approx;

namespace {

// Independent oracle: Q_a^{2^k}(0) in long double.
long double critical_return_ld(long double a, unsigned k) {
  long double x = 0.0L;
  for (unsigned long long i = 0; i < (1ULL << k); ++i) x = 1.0L - a * x * x;
  return x;
}

// Plain bisection for the root in [lo, hi], assuming a sign change.
double bisect_oracle(unsigned k, long double lo, long double hi) {
  long double glo = critical_return_ld(lo, k);
  for (int i = 0; i < 200 && hi - lo > 1e-16L; ++i) {
    long double mid = (lo + hi) / 2;
    long double g = critical_return_ld(mid, k);
    if ((g > 0) == (glo > 0)) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>((lo + hi) / 2);
}

}  // namespace

TEST_CASE("fixed point and multiplier match the closed form", "[cycles][oracle]") {
  for (double a : {0.2, 0.5, 0.7}) {
    auto s = find_cycle_by_convergence({a});
    REQUIRE(s.status == CycleStatus::Found);
    const auto& c = *s.cycle;
    CHECK(c.period == 1);
    double xs = (std::sqrt(1.0 + 4.0 * a) - 1.0) / (2.0 * a);
    CHECK(c.point == Approx(xs).margin(1e-10));
    CHECK(c.multiplier == Approx(1.0 - std::sqrt(1.0 + 4.0 * a)).margin(1e-9));
    CHECK(c.stability == Stability::Attracting);
  }
}

TEST_CASE("multiplier agrees with a finite-difference derivative", "[cycles][oracle]") {
  for (double a : {1.2, 1.76, 1.3}) {
    auto s = find_cycle_by_convergence({a});
    REQUIRE(s.status == CycleStatus::Found);
    const auto& c = *s.cycle;
    QuadraticMap f{{a}};
    const double h = 1e-6;
    double fd = (advance(f, c.point + h, c.period) - advance(f, c.point - h, c.period)) / (2 * h);
    CHECK(c.multiplier == Approx(fd).margin(1e-5));
  }
}

TEST_CASE("known attracting cycles", "[cycles]") {
  struct Case {
    double a;
    std::size_t period;
  };
  for (auto [a, period] : {Case{1.0, 2}, Case{1.3, 4}, Case{1.76, 3}, Case{1.755, 3}, Case{1.6254, 5}}) {
    auto s = find_cycle_by_convergence({a});
    INFO("a = " << a);
    REQUIRE(s.status == CycleStatus::Found);
    CHECK(s.cycle->period == period);
    CHECK(std::abs(s.cycle->multiplier) < 1.0);
  }
  auto sup = find_cycle_by_convergence({1.0});
  CHECK(sup.cycle->stability == Stability::Superstable);
}

TEST_CASE("no attracting cycle in chaotic or escaping cases", "[cycles]") {
  CHECK(find_cycle_by_convergence({2.0}).status == CycleStatus::NotFound);
  CHECK(find_cycle_by_convergence({2.5}).status == CycleStatus::Escaped);
}

TEST_CASE("stability classes of multipliers", "[cycles]") {
  CHECK(classify_multiplier(0.0) == Stability::Superstable);
  CHECK(classify_multiplier(0.5) == Stability::Attracting);
  CHECK(classify_multiplier(-1.0) == Stability::Neutral);
  CHECK(classify_multiplier(1.5) == Stability::Repelling);
}

TEST_CASE("cascade members match bisection oracle", "[cycles][oracle]") {
  auto r = run_cascade(10);
  REQUIRE(r.superstable_params.size() == 10);
  CHECK(r.superstable_params[0] == Approx(1.0).margin(1e-12));
  for (unsigned k = 1; k <= 8; ++k) {
    double a = r.superstable_params[k - 1];
    double oracle = bisect_oracle(k, a - 1e-7, a + 1e-7);
    INFO("k = " << k);
    CHECK(a == Approx(oracle).margin(1e-11));
    CHECK(verify_superstable(a, k));
  }
  CHECK(r.superstable_params[1] == Approx(1.3107026413368).margin(1e-10));
  CHECK(r.c_estimate == Approx(1.4011551890).margin(1e-7));
  CHECK(r.delta_estimates.back() == Approx(4.6692).margin(0.01));
  for (std::size_t i = 1; i < r.superstable_params.size(); ++i)
    CHECK(r.superstable_params[i] > r.superstable_params[i - 1]);
}

TEST_CASE("bad brackets are rejected", "[cycles]") {
  CHECK_THROWS_AS(superstable_parameter(1, {1.1, 1.2}), bracket_error);
  CHECK_THROWS_AS(superstable_parameter(1, {1.2, 1.1}), bracket_error);
  CHECK_THROWS_AS(run_cascade(2), bracket_error);
  CHECK_FALSE(verify_superstable(1.2, 1));
}

TEST_CASE("window scan finds the period-3 window", "[cycles]") {
  auto s = scan_windows({1.70, 1.80}, 201);
  bool found = false;
  for (const auto& w : s.windows) {
    if (w.period == 3) {
      found = true;
      CHECK(w.lo <= 1.76);
      CHECK(w.hi >= 1.76);
      CHECK(w.lo >= 1.75);
    }
  }
  CHECK(found);
  for (const auto& [a, c] : s.hits) CHECK(c.attracting());
}

TEST_CASE("window scan output does not depend on the thread count", "[cycles][property]") {
  auto s1 = scan_windows({1.4, 2.0}, 300, 32, 20'000, 1);
  auto s4 = scan_windows({1.4, 2.0}, 300, 32, 20'000, 4);
  REQUIRE(s1.hits.size() == s4.hits.size());
  for (std::size_t i = 0; i < s1.hits.size(); ++i) {
    CHECK(s1.hits[i].first == s4.hits[i].first);
    CHECK(s1.hits[i].second.multiplier == s4.hits[i].second.multiplier);
  }
}

TEST_CASE("nested grids share points exactly", "[cycles][property]") {
  const double lo = 1.4, hi = 2.0;
  for (std::size_t m : {10u, 100u, 1000u}) {
    for (std::size_t i = 0; i <= m; ++i) CHECK(grid_point(lo, hi, i, m + 1) == grid_point(lo, hi, 10 * i, 10 * m + 1));
  }
  CHECK(grid_point(lo, hi, 0, 5) == lo);
  CHECK(grid_point(lo, hi, 4, 5) == hi);
}
