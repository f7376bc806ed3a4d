// chaoscope command-line front end.
//
// Exit status: 0 on success, 2 on a usage error, 1 when a computation fails.
// Output files are written to a temporary sibling and renamed into place.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chaoscope/bss/check.hpp"
#include "chaoscope/bss/components.hpp"
#include "chaoscope/bss/fragmentation.hpp"
#include "chaoscope/bss/interpreter.hpp"
#include "chaoscope/bss/paths.hpp"
#include "chaoscope/bss/program.hpp"
#include "chaoscope/cycles.hpp"
#include "chaoscope/entropy.hpp"
#include "chaoscope/lyapunov.hpp"
#include "chaoscope/parallel.hpp"
#include "chaoscope/piecewise_linear.hpp"
#include "chaoscope/scan.hpp"
#include "chaoscope/srb.hpp"

namespace fs = std::filesystem;
using namespace chaoscope;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw error("cannot rename into '" + path + "': " + ec.message());
  }
}

// Writes to the path, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else write_file(path, content);
}

std::string num(double v, int digits = 17) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

struct Globals {
  unsigned threads = 0;
  unsigned resolved() const { return threads > 0 ? threads : default_thread_count(); }
};

// ---------------------------------------------------------------------------

struct LyapunovArgs {
  double a = 2.0;
  std::optional<double> b;
  std::size_t n = default_exponent_budget;
  std::optional<double> x0;
  double threshold = default_exponent_threshold;
};

int cmd_lyapunov(const LyapunovArgs& args) {
  CocycleTrace t;
  if (args.b) t = lyapunov_henon({args.a, *args.b}, {0.0, 0.0}, {0.0, 1.0}, args.n);
  else if (args.x0) t = lyapunov_generic({args.a}, *args.x0, args.n);
  else t = lyapunov_quadratic({args.a}, args.n);
  std::cout << "estimate=" << num(t.estimate) << '\n'
            << "sup_estimate=" << num(t.sup_estimate) << '\n'
            << "steps=" << t.steps << '\n'
            << "class=" << to_string(classify_trace(t, args.threshold)) << '\n';
  return 0;
}

struct EntropyArgs {
  std::optional<double> a;
  std::string pl;
  bool refine = false;
  unsigned n_max = lap_n_max;
  bool separated = false;
  unsigned n = 12;
  double eps = 0.05;
  std::size_t samples = 200'000;
};

void print_estimate(const EntropyEstimate& e) {
  std::cout << "entropy=" << num(e.value) << '\n' << "method=" << to_string(e.method) << '\n';
  if (e.error_bound) std::cout << "error_bound=" << num(*e.error_bound) << '\n';
}

int cmd_entropy(const EntropyArgs& args) {
  if (!args.pl.empty()) {
    auto m = parse_piecewise_linear(read_file(args.pl));
    print_estimate(entropy_pl_markov(m, args.refine));
    return 0;
  }
  if (!args.a) throw CLI::ValidationError("entropy", "give --a or --pl");
  QuadraticParams p{*args.a};
  if (args.separated) {
    auto [lo, hi] = density_support(p);
    auto sample = uniform_sample(lo, hi, args.samples);
    print_estimate(estimate_entropy_separated_growth(QuadraticMap{p}, std::span<const double>(sample), args.n, args.eps));
    return 0;
  }
  print_estimate(entropy_lap(p, args.n_max));
  return 0;
}

struct CyclesArgs {
  std::optional<double> a;
  std::vector<double> interval;
  std::size_t grid = 100;
  std::size_t max_period = default_max_period;
  std::size_t budget = default_cycle_budget;
};

int cmd_cycles(const CyclesArgs& args, const Globals& g) {
  if (args.a) {
    auto s = find_cycle_by_convergence({*args.a}, args.max_period, args.budget);
    if (s.status == CycleStatus::Escaped) {
      std::cout << "status=escaped\n";
    } else if (s.status == CycleStatus::NotFound) {
      std::cout << "status=not_found\n";
    } else {
      std::cout << "status=found\n"
                << "period=" << s.cycle->period << '\n'
                << "point=" << num(s.cycle->point) << '\n'
                << "multiplier=" << num(s.cycle->multiplier) << '\n'
                << "stability=" << to_string(s.cycle->stability) << '\n';
    }
    return 0;
  }
  if (args.interval.size() != 2) throw CLI::ValidationError("cycles", "give --a or --interval LO HI");
  auto scan = scan_windows({args.interval[0], args.interval[1]}, args.grid, args.max_period, args.budget, g.resolved());
  std::cout << "lo,hi,period,points\n";
  for (const auto& w : scan.windows)
    std::cout << num(w.lo) << ',' << num(w.hi) << ',' << w.period << ',' << w.points << '\n';
  return 0;
}

int cmd_cascade(unsigned k) {
  auto r = run_cascade(k);
  std::cout << "k,a_k,delta\n";
  for (std::size_t i = 0; i < r.superstable_params.size(); ++i) {
    std::cout << i + 1 << ',' << num(r.superstable_params[i]) << ',';
    // delta_estimates[j] uses members j+1, j+2, j+3 (1-based); show it on the last of them
    if (i >= 2) std::cout << num(r.delta_estimates[i - 2]);
    std::cout << '\n';
  }
  std::cout << "c=" << num(r.c_estimate) << '\n';
  return 0;
}

struct SrbArgs {
  double a = 2.0;
  std::size_t n = 1'000'000;
  std::size_t burn_in = default_burn_in;
  std::size_t bins = default_bins;
  std::string out;
};

int cmd_srb(const SrbArgs& args) {
  QuadraticParams p{args.a};
  auto report = classify_srb_evidence(p, args.n);
  std::cout << "evidence=" << to_string(report.evidence) << '\n'
            << "exponent_class=" << to_string(report.exponent) << '\n';
  if (report.cycle) std::cout << "cycle_period=" << report.cycle->period << '\n';
  if (report.evidence == SrbEvidence::Escaped) return 0;
  auto h = estimate_density(p, args.n, args.burn_in, args.bins);
  std::cout << "support_fraction=" << num(effective_support(h)) << '\n'
            << "mean=" << num(birkhoff_average(p, Observable::Identity, args.n, args.burn_in)) << '\n'
            << "mean_square=" << num(birkhoff_average(p, Observable::Square, args.n, args.burn_in)) << '\n';
  if (!args.out.empty()) write_file(args.out, histogram_csv(h));
  return 0;
}

struct DecideArgs {
  double a = 0.0;
  unsigned depth = default_cascade_depth;
  std::string margin = "1e-4";
};

int cmd_decide(const DecideArgs& args) {
  double margin = 0.0;
  try {
    std::size_t used = 0;
    margin = std::stod(args.margin, &used);
    if (used != args.margin.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw CLI::ValidationError("--margin", "not a number: " + args.margin);
  }
  auto d = decide_ent_plus(args.a, args.depth, margin);
  std::ostringstream c;
  c << std::fixed << std::setprecision(7) << d.c;
  std::cout << to_string(d.verdict) << " c=" << c.str() << " margin=" << args.margin << '\n';
  return 0;
}

struct ScanArgs {
  std::string family = "quadratic";
  std::vector<double> interval{1.4, 2.0};
  std::size_t grid = 1000;
  double b = 0.3;
  std::size_t budget = 20'000;
  unsigned lap_depth = default_scan_lap_depth;
  std::uint64_t seed = 1;
  std::string out;
  std::string report;
  std::string raster;
  std::size_t raster_height = 400;
  std::vector<std::size_t> resolutions;
  std::vector<std::string> machines;
  std::size_t machine_depth = 16;
};

int cmd_scan(const ScanArgs& args, const Globals& g) {
  ScanConfig cfg;
  cfg.family = args.family == "henon" ? Family::Henon : Family::Quadratic;
  cfg.lo = args.interval.at(0);
  cfg.hi = args.interval.at(1);
  cfg.grid = args.grid;
  cfg.b = args.b;
  cfg.budget = args.budget;
  cfg.lap_depth = args.lap_depth;
  cfg.seed = args.seed;
  cfg.threads = g.resolved();
  cfg.validate();

  auto rows = run_scan(cfg);
  emit(args.out, scan_csv(cfg.family, rows));

  if (!args.report.empty()) {
    std::vector<bss::ResolutionScan> scans;
    scans.push_back({cfg.grid - 1, scan_classes(rows)});
    for (std::size_t m : args.resolutions) {
      if (m == cfg.grid - 1) continue;
      if (cfg.family == Family::Henon) throw error("fragmentation resolutions are only supported for the quadratic family");
      scans.push_back(bss::classify_grid(cfg.lo, cfg.hi, m, cfg.budget, cfg.threads));
    }
    std::sort(scans.begin(), scans.end(), [](const auto& u, const auto& v) { return u.resolution < v.resolution; });
    std::vector<bss::MachineBound> bounds;
    for (const auto& path : args.machines) {
      auto prog = bss::parse_program(read_file(path));
      auto desc = bss::enumerate_paths(prog, args.machine_depth);
      bounds.push_back({fs::path(path).filename().string(), args.machine_depth, desc.pieces.size()});
    }
    write_file(args.report, bss::fragmentation_report(scans, bounds).to_string());
  }
  if (!args.raster.empty()) {
    RasterConfig rc;
    rc.height = args.raster_height;
    write_file(args.raster, bifurcation_ppm(cfg, rc));
  }
  return 0;
}

struct BssArgs {
  std::string file;
  std::vector<double> inputs;
  std::size_t fuel = 1000;
  std::size_t depth = bss::default_max_depth;
  unsigned max_degree = bss::default_max_degree;
  std::string out;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double lo = -4.0;
  double hi = 4.0;
};

int cmd_bss_run(const BssArgs& args) {
  auto prog = bss::parse_program(read_file(args.file));
  if (args.inputs.size() != prog.input_count())
    throw CLI::ValidationError("--input", "machine expects " + std::to_string(prog.input_count()) + " inputs");
  auto result = bss::run(prog, args.inputs, args.fuel);
  if (const auto* h = std::get_if<bss::Halted>(&result)) {
    std::cout << "halted steps=" << h->steps;
    for (double v : h->outputs) std::cout << ' ' << num(v);
    std::cout << '\n';
  } else {
    std::cout << "out_of_fuel steps=" << std::get<bss::OutOfFuel>(result).steps << '\n';
  }
  return 0;
}

int cmd_bss_paths(const BssArgs& args) {
  auto prog = bss::parse_program(read_file(args.file));
  auto desc = bss::enumerate_paths(prog, args.depth, args.max_degree);
  std::string text = bss::serialize(desc);
  if (desc.inputs.size() == 1) text += "components " + std::to_string(bss::components_1d(desc)) + "\n";
  emit(args.out, text);
  return 0;
}

int cmd_bss_check(const BssArgs& args) {
  auto prog = bss::parse_program(read_file(args.file));
  auto desc = bss::enumerate_paths(prog, args.depth, args.max_degree);
  auto r = bss::check_soundness(prog, desc, args.depth, args.samples, args.seed, args.lo, args.hi);
  std::cout << "samples=" << r.samples << " halted=" << r.halted << " mismatches=" << r.mismatches.size() << '\n';
  for (const auto& m : r.mismatches) {
    std::cout << "mismatch input=";
    for (std::size_t i = 0; i < m.input.size(); ++i) std::cout << (i ? " " : "") << num(m.input[i]);
    std::cout << " halted=" << m.halted << " member=" << m.member << '\n';
  }
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoscope: dynamics of the quadratic and Henon families, and machines over the reals"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (default: CHAOSCOPE_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);

  int status = 0;

  LyapunovArgs ly;
  auto* c_ly = app.add_subcommand("lyapunov", "exponent along the critical orbit (or from --x0, or Henon with --b)");
  c_ly->add_option("--a", ly.a, "parameter a")->required();
  c_ly->add_option("--b", ly.b, "Henon parameter b");
  c_ly->add_option("--n", ly.n, "iterations")->check(CLI::PositiveNumber);
  c_ly->add_option("--x0", ly.x0, "start point for the quadratic family");
  c_ly->add_option("--threshold", ly.threshold, "classification threshold")->check(CLI::NonNegativeNumber);
  c_ly->callback([&] { status = cmd_lyapunov(ly); });

  EntropyArgs en;
  auto* c_en = app.add_subcommand("entropy", "topological entropy estimate");
  c_en->add_option("--a", en.a, "parameter a of the quadratic family");
  c_en->add_option("--pl", en.pl, "piecewise-linear map file")->check(CLI::ExistingFile);
  c_en->add_flag("--refine", en.refine, "refine the partition to a Markov one first");
  c_en->add_option("--n-max", en.n_max, "lap-count depth")->check(CLI::Range(2u, lap_n_max));
  c_en->add_flag("--separated", en.separated, "separated-set growth estimate instead of lap counts");
  c_en->add_option("--n", en.n, "orbit length for separated sets")->check(CLI::Range(2u, 64u));
  c_en->add_option("--eps", en.eps, "separation scale")->check(CLI::PositiveNumber);
  c_en->add_option("--samples", en.samples, "sample size")->check(CLI::PositiveNumber);
  c_en->callback([&] { status = cmd_entropy(en); });

  CyclesArgs cy;
  auto* c_cy = app.add_subcommand("cycles", "attracting cycle at --a, or periodic windows over --interval");
  c_cy->add_option("--a", cy.a, "parameter a");
  c_cy->add_option("--interval", cy.interval, "scan interval LO HI")->expected(2);
  c_cy->add_option("--grid", cy.grid, "grid points")->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}));
  c_cy->add_option("--max-period", cy.max_period, "largest period searched");
  c_cy->add_option("--budget", cy.budget, "iteration budget")->check(CLI::PositiveNumber);
  c_cy->callback([&] { status = cmd_cycles(cy, g); });

  unsigned cascade_k = default_cascade_depth;
  auto* c_ca = app.add_subcommand("cascade", "superstable period-doubling parameters and their accumulation point");
  c_ca->add_option("--k", cascade_k, "number of members")->check(CLI::Range(3u, 24u));
  c_ca->callback([&] { status = cmd_cascade(cascade_k); });

  SrbArgs sr;
  auto* c_sr = app.add_subcommand("srb", "invariant-density evidence along the critical orbit");
  c_sr->add_option("--a", sr.a, "parameter a")->required();
  c_sr->add_option("--n", sr.n, "iterations")->check(CLI::PositiveNumber);
  c_sr->add_option("--burn-in", sr.burn_in, "discarded iterations");
  c_sr->add_option("--bins", sr.bins, "histogram bins")->check(CLI::PositiveNumber);
  c_sr->add_option("--out", sr.out, "histogram CSV path");
  c_sr->callback([&] { status = cmd_srb(sr); });

  DecideArgs de;
  auto* c_de = app.add_subcommand("decide", "is the entropy of Q_a positive?");
  c_de->add_option("--a", de.a, "parameter a in (0, 2]")->required();
  c_de->add_option("--depth", de.depth, "cascade depth")->check(CLI::Range(3u, 24u));
  c_de->add_option("--margin", de.margin, "numerical band around the boundary");
  c_de->callback([&] { status = cmd_decide(de); });

  ScanArgs sc;
  auto* c_sc = app.add_subcommand("scan", "parameter sweep: CSV, fragmentation report, bifurcation raster");
  c_sc->add_option("--family", sc.family, "quadratic or henon")->check(CLI::IsMember({"quadratic", "henon"}));
  c_sc->add_option("--interval", sc.interval, "parameter interval LO HI")->expected(2);
  c_sc->add_option("--grid", sc.grid, "grid points")->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}));
  c_sc->add_option("--b", sc.b, "Henon parameter b");
  c_sc->add_option("--budget", sc.budget, "iterations per parameter")
      ->check(CLI::Range(min_scan_budget, std::size_t{1'000'000'000}));
  c_sc->add_option("--lap-depth", sc.lap_depth, "lap-count depth of the entropy column")
      ->check(CLI::Range(2u, lap_n_max));
  c_sc->add_option("--seed", sc.seed, "seed for raster start points");
  c_sc->add_option("--out", sc.out, "CSV path (default: stdout)");
  c_sc->add_option("--report", sc.report, "fragmentation report path");
  c_sc->add_option("--resolutions", sc.resolutions, "extra grid resolutions (intervals) for the report");
  c_sc->add_option("--machine", sc.machines, "machine files whose piece counts go into the report")
      ->check(CLI::ExistingFile);
  c_sc->add_option("--machine-depth", sc.machine_depth, "path depth for the machine piece counts")
      ->check(CLI::Range(std::size_t{1}, std::size_t{62}));
  c_sc->add_option("--raster", sc.raster, "PPM bifurcation raster path");
  c_sc->add_option("--raster-height", sc.raster_height, "raster rows")->check(CLI::Range(std::size_t{2}, std::size_t{100'000}));
  c_sc->callback([&] { status = cmd_scan(sc, g); });

  BssArgs bs;
  auto* c_bss = app.add_subcommand("bss", "machines over the reals");
  c_bss->require_subcommand(1);
  auto* c_run = c_bss->add_subcommand("run", "execute a machine");
  c_run->add_option("file", bs.file, "machine file")->required()->check(CLI::ExistingFile);
  c_run->add_option("--input", bs.inputs, "input values")->required();
  c_run->add_option("--fuel", bs.fuel, "maximum executed nodes")->check(CLI::PositiveNumber);
  c_run->callback([&] { status = cmd_bss_run(bs); });
  auto* c_paths = c_bss->add_subcommand("paths", "halting-set description by path enumeration");
  c_paths->add_option("file", bs.file, "machine file")->required()->check(CLI::ExistingFile);
  c_paths->add_option("--depth", bs.depth, "path depth")->check(CLI::PositiveNumber);
  c_paths->add_option("--max-degree", bs.max_degree, "polynomial degree cap")->check(CLI::PositiveNumber);
  c_paths->add_option("--out", bs.out, "output path (default: stdout)");
  c_paths->callback([&] { status = cmd_bss_paths(bs); });
  auto* c_check = c_bss->add_subcommand("check", "compare interpreter halting with the description on random inputs");
  c_check->add_option("file", bs.file, "machine file")->required()->check(CLI::ExistingFile);
  c_check->add_option("--depth", bs.depth, "path depth")->check(CLI::PositiveNumber);
  c_check->add_option("--max-degree", bs.max_degree, "polynomial degree cap")->check(CLI::PositiveNumber);
  c_check->add_option("--samples", bs.samples, "random inputs")->check(CLI::PositiveNumber);
  c_check->add_option("--seed", bs.seed, "random seed");
  c_check->add_option("--lo", bs.lo, "lower end of the input range");
  c_check->add_option("--hi", bs.hi, "upper end of the input range");
  c_check->callback([&] { status = cmd_bss_check(bs); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const chaoscope::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout.flush();
  return status;
}
