#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "chaoscope/maps.hpp"
#include "chaoscope/parallel.hpp"

using namespace chaoscope;
using Catch::Approx;

TEST_CASE("quadratic map values and derivative", "[maps]") {
  QuadraticParams p{2.0};
  CHECK(quad_apply(p, 0.0) == 1.0);
  CHECK(quad_apply(p, 1.0) == -1.0);
  CHECK(quad_apply(p, -1.0) == -1.0);
  CHECK(quad_apply(p, 0.5) == 0.5);
  CHECK(quad_derivative(p, 0.5) == -2.0);
  CHECK(quad_derivative(p, 0.0) == 0.0);
}

TEST_CASE("Henon map reduces to the quadratic map at b = 0", "[maps]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng) + 1.0, x = u(rng);
    Point2 z = henon_apply({a, 0.0}, {x, 0.0});
    CHECK(z.x == quad_apply({a}, x));
    CHECK(z.y == 0.0);
    CHECK(henon_apply({a, 0.0}, z).x == quad_apply({a}, z.x));
  }
}

TEST_CASE("Henon Jacobian determinant is -b", "[maps][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    HenonParams p{u(rng) + 2.0, u(rng) / 4.0};
    Point2 z{u(rng), u(rng)};
    CHECK(henon_jacobian(p, z).det() == Approx(-p.b).margin(1e-15));
  }
}

TEST_CASE("Henon Jacobian matches finite differences", "[maps]") {
  HenonParams p{1.4, 0.3};
  Point2 z{0.3, -0.2};
  Mat2 j = henon_jacobian(p, z);
  const double h = 1e-6;
  Point2 dx0 = henon_apply(p, {z.x + h, z.y}), dx1 = henon_apply(p, {z.x - h, z.y});
  Point2 dy0 = henon_apply(p, {z.x, z.y + h}), dy1 = henon_apply(p, {z.x, z.y - h});
  CHECK(j.m00 == Approx((dx0.x - dx1.x) / (2 * h)).epsilon(1e-8));
  CHECK(j.m10 == Approx((dx0.y - dx1.y) / (2 * h)).epsilon(1e-8));
  CHECK(j.m01 == Approx((dy0.x - dy1.x) / (2 * h)).margin(1e-8));
  CHECK(j.m11 == Approx((dy0.y - dy1.y) / (2 * h)).margin(1e-8));
}

TEST_CASE("orbit stream emits start plus n states", "[maps]") {
  auto orbit = iterate(QuadraticMap{{2.0}}, 0.0, 5);
  REQUIRE(orbit.states.size() == 6);
  CHECK_FALSE(orbit.escaped);
  std::vector<double> expected{0.0, 1.0, -1.0, -1.0, -1.0, -1.0};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(orbit.states[i].value == expected[i]);
    CHECK(orbit.states[i].step == i);
  }
}

TEST_CASE("orbit stream stops at the first escaped state", "[maps]") {
  auto orbit = iterate(QuadraticMap{{3.0}}, 1.0, 100);
  REQUIRE(orbit.escaped);
  CHECK(orbit.states.back().escaped);
  CHECK(std::abs(orbit.states.back().value) > default_escape_radius);
  for (std::size_t i = 0; i + 1 < orbit.states.size(); ++i) CHECK_FALSE(orbit.states[i].escaped);
}

TEST_CASE("NaN counts as escaped", "[maps]") {
  auto orbit = iterate(QuadraticMap{{1.0}}, std::numeric_limits<double>::quiet_NaN(), 10);
  REQUIRE(orbit.states.size() == 1);
  CHECK(orbit.escaped);
}

TEST_CASE("advance applies the map n times", "[maps]") {
  QuadraticMap f{{1.3}};
  double x = 0.2;
  for (int i = 0; i < 17; ++i) x = f(x);
  CHECK(advance(f, 0.2, 17) == x);
}

TEST_CASE("parallel_map keeps index order for any thread count", "[parallel][property]") {
  auto fn = [](std::size_t i) { return std::sin(static_cast<double>(i)) * static_cast<double>(i); };
  auto serial = parallel_map(1000, 1, fn);
  for (unsigned t : {2u, 3u, 7u, 64u}) CHECK(parallel_map(1000, t, fn) == serial);
  CHECK(parallel_map(0, 4, fn).empty());
}

TEST_CASE("parallel_map rethrows a worker exception", "[parallel]") {
  std::atomic<int> calls{0};
  auto fn = [&](std::size_t i) -> int {
    ++calls;
    if (i == 37) throw std::runtime_error("boom");
    return 0;
  };
  CHECK_THROWS_WITH(parallel_map(100, 4, fn), "boom");
}
