#include <catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <string>

#include "chaoscope/scan.hpp"

using namespace chaoscope;

namespace {

ScanConfig small(Family f, unsigned threads) {
  ScanConfig c;
  c.family = f;
  c.lo = f == Family::Henon ? 1.0 : 1.7;
  c.hi = f == Family::Henon ? 1.4 : 1.8;
  c.grid = 21;
  c.budget = 5000;
  c.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("scan output is independent of the thread count", "[scan][property]") {
  for (Family f : {Family::Quadratic, Family::Henon}) {
    auto one = scan_csv(f, run_scan(small(f, 1)));
    for (unsigned t : {2u, 5u, 16u}) CHECK(scan_csv(f, run_scan(small(f, t))) == one);
  }
}

TEST_CASE("quadratic scan CSV layout", "[scan]") {
  auto rows = run_scan(small(Family::Quadratic, 2));
  auto csv = scan_csv(Family::Quadratic, rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,exp_estimate,class,cycle_period,entropy_lap");
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++count;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(count == 21);
  CHECK(rows.front().a == 1.7);
  CHECK(rows.back().a == 1.8);
}

TEST_CASE("scan rows are consistent with their cycles", "[scan][property]") {
  auto cfg = small(Family::Quadratic, 4);
  cfg.lo = 1.74;
  cfg.hi = 1.78;
  cfg.grid = 41;
  cfg.budget = 100'000;
  for (const auto& r : run_scan(cfg)) {
    if (r.cycle_period) CHECK(r.cls != ExponentClass::Positive);
    if (r.cls == ExponentClass::Positive) CHECK(r.entropy > 0.0);
  }
}

TEST_CASE("Henon scan CSV layout", "[scan]") {
  auto csv = scan_csv(Family::Henon, run_scan(small(Family::Henon, 3)));
  CHECK(csv.rfind("a,b,exp_estimate,class\n1,0.29999999999999999,", 0) == 0);
}

TEST_CASE("scan configuration is validated", "[scan]") {
  ScanConfig c;
  c.grid = 1;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.budget = 10;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.lo = 1.9;
  c.hi = 1.8;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.hi = 2.5;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.lap_depth = 40;
  CHECK_THROWS_AS(c.validate(), error);
  CHECK_NOTHROW(ScanConfig{}.validate());
}

TEST_CASE("bifurcation raster is a deterministic P3 image", "[scan]") {
  auto cfg = small(Family::Quadratic, 1);
  RasterConfig rc;
  rc.height = 20;
  auto img = bifurcation_ppm(cfg, rc);
  CHECK(img.rfind("P3\n21 20\n255\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(img.begin(), img.end(), '\n')) == 3 + 21 * 20);
  cfg.threads = 4;
  CHECK(bifurcation_ppm(cfg, rc) == img);
  cfg.seed = 2;
  auto other = bifurcation_ppm(cfg, rc);
  CHECK(other.size() > 0);
  auto henon = small(Family::Henon, 2);
  CHECK(bifurcation_ppm(henon, rc).rfind("P3\n21 20\n", 0) == 0);
}

TEST_CASE("period-3 window shows three raster rows", "[scan]") {
  ScanConfig cfg;
  cfg.lo = 1.76;
  cfg.hi = 1.76;
  cfg.grid = 2;
  cfg.budget = 1000;
  RasterConfig rc;
  rc.height = 300;
  auto img = bifurcation_ppm(cfg, rc);
  std::istringstream in(img);
  std::string line;
  for (int i = 0; i < 3; ++i) std::getline(in, line);
  std::size_t black = 0;
  while (std::getline(in, line)) black += line == "0 0 0";
  CHECK(black == 2 * 3);
}
