#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "chaoscope/cycles.hpp"
#include "chaoscope/lyapunov.hpp"

using namespace chaoscope;
using Catch::Approx;

namespace {

// Independent oracle: both Henon exponents by QR (Gram-Schmidt) on a full
// frame, re-orthonormalized every step.
std::pair<double, double> henon_qr(HenonParams p, Point2 z, std::size_t burn, std::size_t n) {
  for (std::size_t i = 0; i < burn; ++i) z = henon_apply(p, z);
  Point2 e1{1.0, 0.0}, e2{0.0, 1.0};
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Mat2 j = henon_jacobian(p, z);
    Point2 u = j * e1, v = j * e2;
    double r11 = norm(u);
    e1 = {u.x / r11, u.y / r11};
    double r12 = e1.x * v.x + e1.y * v.y;
    Point2 w{v.x - r12 * e1.x, v.y - r12 * e1.y};
    double r22 = norm(w);
    e2 = {w.x / r22, w.y / r22};
    s1 += std::log(r11);
    s2 += std::log(r22);
    z = henon_apply(p, z);
  }
  return {s1 / static_cast<double>(n), s2 / static_cast<double>(n)};
}

}  // namespace

TEST_CASE("a = 2 critical orbit: exponent log 4 after the first step", "[lyapunov]") {
  auto t = lyapunov_quadratic({2.0}, 1000);
  REQUIRE(t.steps == 1000);
  CHECK_FALSE(t.escaped);
  CHECK_FALSE(t.hit_critical);
  // log|-4 * 1| then log|-4 * -1| forever.
  for (std::size_t k = 0; k < t.steps; ++k)
    CHECK(t.log_norms[k] == Approx(static_cast<double>(k + 1) * std::log(4.0)).epsilon(1e-13));
  CHECK(t.estimate == Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(classify_trace(t, default_exponent_threshold) == ExponentClass::Positive);
}

TEST_CASE("exponent at an attracting fixed point matches the closed form", "[lyapunov][oracle]") {
  for (double a : {0.3, 0.5, 0.7}) {
    double m = 1.0 - std::sqrt(1.0 + 4.0 * a);  // multiplier at x* = (sqrt(1+4a) - 1) / (2a)
    auto t = lyapunov_quadratic({a}, 200'000);
    CHECK(t.estimate == Approx(std::log(std::abs(m))).margin(1e-3));
    CHECK(classify_trace(t, default_exponent_threshold) == ExponentClass::NonPositive);
  }
}

TEST_CASE("superstable parameter hits the critical point", "[lyapunov]") {
  auto t = lyapunov_quadratic({1.0}, 100);  // 1 -> 0
  CHECK(t.hit_critical);
  CHECK(std::isinf(t.log_norms.back()));
  CHECK(classify_trace(t, 0.01) == ExponentClass::HitCritical);
}

TEST_CASE("escaping orbit is reported as escaped", "[lyapunov]") {
  auto t = lyapunov_quadratic({2.5}, 1000);
  CHECK(t.escaped);
  CHECK(t.steps < 1000);
  CHECK(classify_exponent(QuadraticParams{2.5}, 1000) == ExponentClass::Escaped);
  CHECK(classify_exponent(HenonParams{3.0, 0.3}, 1000) == ExponentClass::Escaped);
}

TEST_CASE("classification band around zero is inconclusive", "[lyapunov]") {
  CocycleTrace t;
  t.sup_estimate = 0.005;
  CHECK(classify_trace(t, 0.01) == ExponentClass::Inconclusive);
  t.sup_estimate = -0.005;
  CHECK(classify_trace(t, 0.01) == ExponentClass::Inconclusive);
  t.sup_estimate = 0.02;
  CHECK(classify_trace(t, 0.01) == ExponentClass::Positive);
  t.sup_estimate = -0.02;
  CHECK(classify_trace(t, 0.01) == ExponentClass::NonPositive);
}

TEST_CASE("generic-point exponent at a = 2 is log 2", "[lyapunov]") {
  auto t = lyapunov_generic({2.0}, 0.123456789, 1'000'000);
  CHECK(t.estimate == Approx(std::log(2.0)).margin(0.01));
}

TEST_CASE("Henon exponent agrees with a QR oracle", "[lyapunov][oracle]") {
  HenonParams p{1.4, 0.3};
  auto [l1, l2] = henon_qr(p, {0.0, 0.0}, 1000, 200'000);
  CHECK(l1 + l2 == Approx(std::log(0.3)).margin(1e-9));
  CHECK(l1 == Approx(0.419).margin(0.01));
  auto t = lyapunov_henon(p, {0.0, 0.0}, {0.0, 1.0}, 200'000);
  CHECK(t.estimate == Approx(l1).margin(0.01));
  CHECK(classify_trace(t, 0.01) == ExponentClass::Positive);
}

TEST_CASE("Henon trace at b = 0 is the quadratic trace shifted by one step", "[lyapunov][property]") {
  for (double a : {0.4, 1.1, 1.5, 1.76, 1.9, 2.0}) {
    auto q = lyapunov_quadratic({a}, 5000);
    auto h = lyapunov_henon({a, 0.0}, {0.0, 0.0}, {0.0, 1.0}, 5001);
    REQUIRE(h.steps == q.steps + 1);
    for (std::size_t k = 1; k < h.steps; ++k) {
      double lq = q.log_norms[k - 1], lh = h.log_norms[k];
      if (std::isinf(lq)) {
        CHECK(lh == lq);
      } else {
        CHECK(lh == Approx(lq).epsilon(1e-12).margin(1e-12));
      }
    }
  }
}

TEST_CASE("renormalization keeps long Henon traces finite", "[lyapunov]") {
  auto t = lyapunov_henon({1.4, 0.3}, {0.0, 0.0}, {1.0, 0.0}, 100'000);
  REQUIRE(t.steps == 100'000);
  CHECK(std::isfinite(t.log_norms.back()));
  CHECK(t.log_norms.back() > 1e4);  // far beyond the double exponent range of raw norms
}

TEST_CASE("tail sup dominates the final estimate", "[lyapunov][property]") {
  for (double a : {0.5, 1.3, 1.6, 1.8, 1.95}) {
    auto t = lyapunov_quadratic({a}, 20'000);
    if (t.hit_critical || t.escaped) continue;
    CHECK(t.sup_estimate >= t.estimate);
  }
}
