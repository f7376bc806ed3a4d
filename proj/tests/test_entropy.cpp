#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chaoscope/entropy.hpp"
#include "chaoscope/piecewise_linear.hpp"

using namespace chaoscope;
using Catch::Approx;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(CHAOSCOPE_SOURCE_DIR) + "/" + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Oracle: laps of Q_a^n counted as monotone runs of a dense sample on [-1, 1].
std::uint64_t dense_laps(double a, unsigned n, std::size_t samples) {
  std::uint64_t laps = 1;
  int dir = 0;
  double prev = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(samples);
    for (unsigned k = 0; k < n; ++k) x = 1.0 - a * x * x;
    if (i > 0) {
      int d = (x > prev) - (x < prev);
      if (d != 0) {
        if (dir != 0 && d != dir) ++laps;
        dir = d;
      }
    }
    prev = x;
  }
  return laps;
}

bool separated(const std::vector<double>& u, const std::vector<double>& v, double eps) {
  for (std::size_t j = 0; j < u.size(); ++j)
    if (std::abs(u[j] - v[j]) > eps) return true;
  return false;
}

}  // namespace

TEST_CASE("lap counts at a = 2 double each step", "[entropy]") {
  auto laps = lap_counts({2.0}, 20);
  for (unsigned k = 1; k <= 20; ++k) CHECK(laps[k - 1] == (std::uint64_t{1} << k));
  CHECK(lap_count({2.0}, 20) == 1'048'576);
}

TEST_CASE("lap counts match dense-sample monotone runs", "[entropy][oracle]") {
  for (double a : {0.9, 1.3, 1.5, 1.7, 1.85, 1.95}) {
    auto laps = lap_counts({a}, 7);
    for (unsigned n = 1; n <= 7; ++n) {
      INFO("a = " << a << ", n = " << n);
      CHECK(laps[n - 1] == dense_laps(a, n, 1 << 20));
    }
  }
}

TEST_CASE("lap counts are submultiplicative", "[entropy][property]") {
  for (double a : {1.45, 1.6, 1.75, 1.9, 2.0}) {
    auto laps = lap_counts({a}, 16);
    for (unsigned m = 1; m <= 8; ++m)
      for (unsigned n = 1; m + n <= 16; ++n) CHECK(laps[m + n - 1] <= laps[m - 1] * laps[n - 1]);
  }
}

TEST_CASE("period-3 superstable parameter has entropy log phi", "[entropy]") {
  CHECK(entropy_lap({1.7549}, 22).value == Approx(std::log(std::numbers::phi)).margin(0.02));
}

TEST_CASE("lap entropy brackets known values", "[entropy]") {
  auto e2 = entropy_lap({2.0}, 20);
  CHECK(e2.value == Approx(std::log(2.0)).margin(1e-12));
  REQUIRE(e2.error_bound);
  CHECK(*e2.error_bound >= 0.0);
  auto e1 = entropy_lap({1.3}, 18);  // period 4 attractor, zero entropy
  CHECK(e1.value < 0.1);  // growth log(lap(n) / lap(n-1)) decays like 1/n here
  CHECK(lap_count({1.3}, 18) < 18 * 18);
  CHECK(e1.value + *e1.error_bound >= 0.0);
  CHECK_THROWS_AS(entropy_lap({2.0}, 1), error);
}

TEST_CASE("lap entropy is monotone on a coarse grid", "[entropy][property]") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(1.0 + i / 40.0);
  auto r = check_monotonicity(grid, 16, 2);
  CHECK(r.passed());
  CHECK(r.estimates.size() == grid.size());
  std::vector<double> bad{1.5, 1.4};
  CHECK_THROWS_AS(check_monotonicity(bad), error);
}

TEST_CASE("greedy separated subsets are separated and maximal", "[entropy][oracle]") {
  QuadraticMap f{{1.9}};
  auto sample = uniform_sample(-1.0, 1.0, 1500);
  const unsigned n = 5;
  const double eps = 0.05;
  auto chosen = separated_subset(f, std::span<const double>(sample), n, eps);
  auto traj = [&](double x) {
    std::vector<double> t;
    for (unsigned j = 0; j <= n; ++j) {
      t.push_back(x);
      x = f(x);
    }
    return t;
  };
  std::vector<std::vector<double>> chosen_traj;
  for (auto i : chosen) chosen_traj.push_back(traj(sample[i]));
  for (std::size_t i = 0; i < chosen_traj.size(); ++i)
    for (std::size_t j = i + 1; j < chosen_traj.size(); ++j) CHECK(separated(chosen_traj[i], chosen_traj[j], eps));
  for (double x : sample) {
    auto t = traj(x);
    bool covered = false;
    for (const auto& c : chosen_traj) covered = covered || !separated(t, c, eps);
    CHECK(covered);
  }
}

TEST_CASE("separated-set growth is near log 2 at a = 2", "[entropy]") {
  QuadraticMap f{{2.0}};
  auto sample = uniform_sample(-1.0, 1.0, 200'000);
  auto e = estimate_entropy_separated_growth(f, std::span<const double>(sample), 12, 0.01);
  CHECK(e.value == Approx(std::log(2.0)).margin(0.08));
}

TEST_CASE("separated-set growth tracks the lap estimate", "[entropy]") {
  for (double a : {1.2, 1.5, 1.7549, 2.0}) {
    QuadraticMap f{{a}};
    auto sample = uniform_sample(-1.0, 1.0, 200'000);
    auto e = estimate_entropy_separated_growth(f, std::span<const double>(sample), 12, 0.01);
    CHECK(e.value == Approx(entropy_lap({a}, 20).value).margin(0.08));
  }
}

TEST_CASE("full tent map has entropy log 2", "[entropy][markov]") {
  auto m = parse_piecewise_linear(slurp("data/full_tent.pl"));
  CHECK(is_markov(m));
  auto t = transition_matrix(m);
  CHECK(t == std::vector<std::vector<int>>{{1, 1}, {1, 1}});
  auto e = entropy_pl_markov(m);
  CHECK(e.value == Approx(std::log(2.0)).margin(1e-9));
  CHECK(e.method == EntropyMethod::MarkovSpectral);
}

TEST_CASE("golden-mean map has entropy log phi", "[entropy][markov][oracle]") {
  auto m = parse_piecewise_linear(slurp("data/golden_mean.pl"));
  CHECK(transition_matrix(m) == std::vector<std::vector<int>>{{1, 1}, {1, 0}});
  auto e = entropy_pl_markov(m);
  CHECK(e.value == Approx(std::log(std::numbers::phi)).margin(1e-9));
  REQUIRE(e.error_bound);
  CHECK(*e.error_bound <= 1e-9);
}

TEST_CASE("non-Markov partition needs refinement", "[entropy][markov]") {
  auto m = parse_piecewise_linear(slurp("data/needs_refinement.pl"));
  CHECK_FALSE(is_markov(m));
  CHECK_THROWS_AS(entropy_pl_markov(m), not_markov_error);
  auto r = refine_to_markov(m);
  CHECK(is_markov(r));
  CHECK(r.size() == 4);
  for (double x : {0.1, 0.3, 0.6, 0.9}) CHECK(r(x) == Approx(m(x)).margin(1e-15));
  CHECK(entropy_pl_markov(m, true).value == Approx(0.0).margin(1e-12));
}

TEST_CASE("irrational slope never becomes Markov", "[entropy][markov]") {
  // x -> sqrt(2) x mod 1 style map: breakpoint orbits never close up.
  double s = std::sqrt(2.0);
  PiecewiseLinearMap m({{0.0, 1.0 / s, s, 0.0}, {1.0 / s, 1.0, s, -1.0}});
  CHECK_THROWS_AS(refine_to_markov(m), not_markov_error);
}

TEST_CASE("spectral bounds of reducible matrices", "[entropy][markov]") {
  auto b = spectral_radius_bounds({{1, 1, 0}, {0, 1, 1}, {0, 0, 0}});
  CHECK(b.lower == Approx(1.0).margin(1e-9));
  CHECK(b.upper == Approx(1.0).margin(1e-9));
  auto z = spectral_radius_bounds({{0, 1}, {0, 0}});
  CHECK(z.upper == 0.0);
  auto g = spectral_radius_bounds({{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 0, 1, 1}, {0, 0, 1, 1}});
  CHECK(g.lower <= 2.0 + 1e-12);
  CHECK(g.upper >= 2.0 - 1e-12);
  CHECK(g.upper - g.lower < 1e-9);
}

TEST_CASE("piecewise-linear parse errors carry line and column", "[entropy][markov]") {
  try {
    parse_piecewise_linear("0 0.5 2 0\n0.5 1 -2 x2\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 10);
  }
  CHECK_THROWS_AS(parse_piecewise_linear("0 1 1\n"), parse_error);
  CHECK_THROWS_AS(parse_piecewise_linear("# nothing\n"), parse_error);
  CHECK_THROWS_AS(parse_piecewise_linear("0 1 3 0\n"), error);  // image leaves the domain
  CHECK_THROWS_AS(parse_piecewise_linear("0 0.5 1 0\n0.6 1 1 0\n"), error);
}

TEST_CASE("piecewise-linear format round trips", "[entropy][markov][property]") {
  auto m = parse_piecewise_linear(slurp("data/golden_mean.pl"));
  auto back = parse_piecewise_linear(format_piecewise_linear(m));
  REQUIRE(back.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back.pieces()[i].lo == m.pieces()[i].lo);
    CHECK(back.pieces()[i].slope == m.pieces()[i].slope);
    CHECK(back.pieces()[i].intercept == m.pieces()[i].intercept);
  }
}

TEST_CASE("entropy decision around the cascade boundary", "[entropy]") {
  CHECK(decide_ent_plus(1.5).verdict == EntropyVerdict::Positive);
  CHECK(decide_ent_plus(1.3).verdict == EntropyVerdict::Zero);
  CHECK(decide_ent_plus(1.40115).verdict == EntropyVerdict::Boundary);
  CHECK(decide_ent_plus(2.0).verdict == EntropyVerdict::Positive);
  CHECK(decide_ent_plus(1.5).c == Approx(1.4011551890).margin(1e-7));
  CHECK_THROWS_AS(decide_ent_plus(0.0), error);
  CHECK_THROWS_AS(decide_ent_plus(2.1), error);
  CHECK_THROWS_AS(decide_ent_plus(1.5, 10, -1.0), error);
}

TEST_CASE("decision agrees with lap entropy away from the boundary", "[entropy][property]") {
  for (double a : {1.2, 1.35, 1.39, 1.45, 1.6, 1.8}) {
    auto d = decide_ent_plus(a);
    auto e = entropy_lap({a}, 20);
    if (d.verdict == EntropyVerdict::Positive) CHECK(e.value > 0.0);
    // below the boundary lap numbers grow polynomially, not exponentially
    if (d.verdict == EntropyVerdict::Zero) CHECK(lap_count({a}, 20) < 20 * 20 * 20);
  }
}

TEST_CASE("cascade boundary is shared across threads", "[entropy][parallel]") {
  auto cs = parallel_map(16, 8, [](std::size_t) { return cascade_boundary(12); });
  for (double c : cs) CHECK(c == cs.front());
}

namespace {

struct Halving {
  using state_type = double;
  double operator()(double x) const { return x / 2.0; }
  double magnitude(double x) const { return std::abs(x); }
  static double distance(double u, double v) { return std::abs(u - v); }
};

}  // namespace

TEST_CASE("plain separated-set estimates on reference systems", "[entropy]") {
  auto uniform = uniform_sample(-1.0, 1.0, 100'000);
  auto q2 = estimate_entropy_separated(QuadraticMap{{2.0}}, std::span<const double>(uniform), 18, 0.01);
  CHECK(q2.value >= 0.55);
  CHECK(q2.value <= std::log(2.0) + 1e-12);
  CHECK_FALSE(q2.error_bound);

  // On the Henon attractor the plain estimate is capped by the sample: nearly
  // every point is separated by n = 16, so it reads log(N) / n. The growth
  // variant cancels the eps-dependent prefactor and lands in [0.2, 0.5].
  HenonMap h{{1.4, 0.3}};
  auto attractor = orbit_sample(h, Point2{0.0, 0.0}, 1000, 100'000);
  auto plain = estimate_entropy_separated(h, std::span<const Point2>(attractor), 16, 0.01);
  CHECK(plain.value <= std::log(100'000.0) / 16 + 1e-12);
  auto growth = estimate_entropy_separated_growth(h, std::span<const Point2>(attractor), 16, 0.01);
  CHECK(growth.value >= 0.2);
  CHECK(growth.value <= 0.5);

  auto unit = uniform_sample(0.0, 1.0, 10'000);
  auto c = estimate_entropy_separated(Halving{}, std::span<const double>(unit), 200, 0.01);
  CHECK(c.value < 0.03);
}
