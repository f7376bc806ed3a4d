#pragma once

// Symbolic enumeration of halting computation paths. Along a path every
// assignment is substituted exactly, so each halting path yields one basic
// semi-algebraic set over the input variables.
//
// Serialized form (line oriented, `#` comments allowed on their own lines):
//
//   inputs <name> <name> ...
//   truncated <true|false>
//   pieces <count>
//   piece <i> steps=<s>
//   <polynomial> < 0
//   <polynomial> <= 0
//   end
//
// Polynomials are written as `num/den*x^2*y + num/den` sums.

#include <algorithm>
#include <climits>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscope/bss/program.hpp"
#include "chaoscope/error.hpp"

namespace chaoscope::bss {

inline constexpr std::size_t default_max_depth = 32;
inline constexpr unsigned default_max_degree = 64;

// { x : h(x) < 0 for h in strict, h(x) <= 0 for h in nonstrict }
struct BasicSemiAlgebraicSet {
  std::vector<Polynomial> strict;
  std::vector<Polynomial> nonstrict;
  std::size_t steps = 0;  // length of the halting path, in executed nodes

  template <class T>
  bool contains(const std::vector<T>& point) const {
    for (const auto& h : strict)
      if (!(h.evaluate(point) < T(0))) return false;
    for (const auto& h : nonstrict)
      if (!(h.evaluate(point) <= T(0))) return false;
    return true;
  }
};

struct HaltingSetDescription {
  std::vector<std::string> inputs;
  std::vector<BasicSemiAlgebraicSet> pieces;
  bool truncated = false;

  // Membership in the union of the pieces whose path has at most max_steps nodes.
  template <class T>
  bool contains(const std::vector<T>& point, std::size_t max_steps = SIZE_MAX) const {
    return std::any_of(pieces.begin(), pieces.end(),
                       [&](const auto& s) { return s.steps <= max_steps && s.contains(point); });
  }
};

// Exact polynomial value of an expression given polynomials for each slot.
// Throws degree_overflow_error naming `node` if any intermediate degree
// exceeds max_degree.
inline Polynomial symbolic(const Expr& e, const std::vector<Polynomial>& env, std::size_t nvars, unsigned max_degree,
                           std::size_t node) {
  auto guard = [&](unsigned long long d) {
    if (d > max_degree)
      throw degree_overflow_error("polynomial degree " + std::to_string(d) + " exceeds the limit " +
                                      std::to_string(max_degree),
                                  node);
  };
  switch (e.kind) {
    case Expr::Kind::Number: return Polynomial::constant(nvars, e.value);
    case Expr::Kind::Variable: return env.at(e.slot);
    case Expr::Kind::Neg: return -symbolic(e.args[0], env, nvars, max_degree, node);
    case Expr::Kind::Add:
      return symbolic(e.args[0], env, nvars, max_degree, node) + symbolic(e.args[1], env, nvars, max_degree, node);
    case Expr::Kind::Sub:
      return symbolic(e.args[0], env, nvars, max_degree, node) - symbolic(e.args[1], env, nvars, max_degree, node);
    case Expr::Kind::Mul: {
      auto a = symbolic(e.args[0], env, nvars, max_degree, node);
      auto b = symbolic(e.args[1], env, nvars, max_degree, node);
      guard(static_cast<unsigned long long>(a.degree()) + b.degree());
      return a * b;
    }
    case Expr::Kind::Div: return symbolic(e.args[0], env, nvars, max_degree, node).scaled(Rational(1) / e.value);
    case Expr::Kind::Pow: {
      auto base = symbolic(e.args[0], env, nvars, max_degree, node);
      guard(static_cast<unsigned long long>(base.degree()) * e.exponent);
      return base.pow(e.exponent);
    }
  }
  return Polynomial(nvars);
}

namespace detail {

struct PathState {
  std::size_t pc = 0;
  std::size_t steps = 0;
  std::vector<Polynomial> env;
  std::vector<Polynomial> strict;
  std::vector<Polynomial> nonstrict;
};

inline void push_unique(std::vector<Polynomial>& list, Polynomial p) {
  if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(std::move(p));
}

// Adds `h < 0` (strict) or `h <= 0`; returns false if the constraint is a
// constant that fails, in which case the path is infeasible.
inline bool add_constraint(PathState& s, Polynomial h, bool strict) {
  if (h.is_constant()) {
    int sg = h.constant_term().sign();
    return strict ? sg < 0 : sg <= 0;
  }
  push_unique(strict ? s.strict : s.nonstrict, std::move(h));
  return true;
}

inline void explore(const Program& prog, PathState s, std::size_t max_depth, unsigned max_degree,
                    HaltingSetDescription& out) {
  const std::size_t nvars = prog.input_count();
  while (true) {
    if (s.steps == max_depth) {
      out.truncated = true;
      return;
    }
    ++s.steps;
    const Node& node = prog.nodes[s.pc];
    if (std::holds_alternative<InputNode>(node)) {
      for (std::size_t k = 0; k < nvars; ++k) s.env[k] = Polynomial::variable(nvars, k);
      ++s.pc;
    } else if (const auto* as = std::get_if<AssignNode>(&node)) {
      s.env[as->slot] = symbolic(as->expr, s.env, nvars, max_degree, s.pc);
      ++s.pc;
    } else if (const auto* br = std::get_if<BranchNode>(&node)) {
      Polynomial h = symbolic(br->expr, s.env, nvars, max_degree, s.pc);
      // true: h < 0 or h <= 0; false: -h <= 0 or -h < 0
      PathState taken = s;
      taken.pc = br->if_true;
      if (add_constraint(taken, h, br->strict)) explore(prog, std::move(taken), max_depth, max_degree, out);
      s.pc = br->if_false;
      if (!add_constraint(s, -h, !br->strict)) return;
    } else if (std::holds_alternative<HaltNode>(node)) {
      out.pieces.push_back({std::move(s.strict), std::move(s.nonstrict), s.steps});
      return;
    } else {
      s.pc = std::get<GotoNode>(node).target;
    }
  }
}

}  // namespace detail

// Depth-first enumeration of all computation paths of at most max_depth
// executed nodes, true branches first. Each halting path contributes one
// piece; `truncated` is set when some path was cut at max_depth.
inline HaltingSetDescription enumerate_paths(const Program& prog, std::size_t max_depth = default_max_depth,
                                             unsigned max_degree = default_max_degree) {
  if (max_depth == 0) throw error("enumerate_paths needs max_depth >= 1");
  HaltingSetDescription out;
  out.inputs = prog.inputs();
  detail::PathState start;
  start.env.assign(prog.variables.size(), Polynomial(prog.input_count()));
  detail::explore(prog, std::move(start), max_depth, max_degree, out);
  return out;
}

inline std::string serialize(const HaltingSetDescription& d) {
  std::ostringstream os;
  os << "inputs";
  for (const auto& n : d.inputs) os << ' ' << n;
  os << "\ntruncated " << (d.truncated ? "true" : "false") << "\npieces " << d.pieces.size() << '\n';
  for (std::size_t i = 0; i < d.pieces.size(); ++i) {
    const auto& p = d.pieces[i];
    os << "piece " << i << " steps=" << p.steps << '\n';
    for (const auto& h : p.strict) os << h.to_string(d.inputs) << " < 0\n";
    for (const auto& h : p.nonstrict) os << h.to_string(d.inputs) << " <= 0\n";
    os << "end\n";
  }
  return os.str();
}

inline HaltingSetDescription parse_description(std::string_view text) {
  HaltingSetDescription d;
  std::vector<std::string_view> lines;
  std::vector<std::size_t> numbers;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
    numbers.push_back(line_no);
  }

  std::size_t i = 0;
  auto next = [&](std::string_view what) -> std::string {
    if (i >= lines.size()) throw parse_error("unexpected end of description, expected " + std::string(what), line_no + 1, 1);
    return std::string(lines[i++]);
  };
  auto fail = [&](const std::string& what) -> void { throw parse_error(what, numbers[i - 1], 1); };

  {
    std::istringstream is(next("inputs"));
    std::string kw, name;
    is >> kw;
    if (kw != "inputs") fail("expected 'inputs'");
    while (is >> name) d.inputs.push_back(name);
    if (d.inputs.empty()) fail("no input variables");
  }
  {
    std::string line = next("truncated");
    if (line == "truncated true") d.truncated = true;
    else if (line != "truncated false") fail("expected 'truncated true|false'");
  }
  std::size_t count = 0;
  {
    std::istringstream is(next("pieces"));
    std::string kw;
    if (!(is >> kw >> count) || kw != "pieces") fail("expected 'pieces <count>'");
  }
  const std::size_t nvars = d.inputs.size();
  std::vector<Polynomial> env;
  for (std::size_t k = 0; k < nvars; ++k) env.push_back(Polynomial::variable(nvars, k));

  for (std::size_t piece = 0; piece < count; ++piece) {
    BasicSemiAlgebraicSet s;
    {
      std::istringstream is(next("piece"));
      std::string kw, steps;
      std::size_t index = 0;
      if (!(is >> kw >> index >> steps) || kw != "piece" || index != piece || steps.rfind("steps=", 0) != 0)
        fail("expected 'piece " + std::to_string(piece) + " steps=<n>'");
      try {
        s.steps = std::stoull(steps.substr(6));
      } catch (const std::exception&) {
        fail("invalid step count");
      }
    }
    while (true) {
      std::string line = next("end");
      if (line == "end") break;
      bool strict = false;
      std::size_t cut = 0;
      if (line.size() > 5 && line.compare(line.size() - 5, 5, " <= 0") == 0) {
        cut = line.size() - 5;
      } else if (line.size() > 4 && line.compare(line.size() - 4, 4, " < 0") == 0) {
        strict = true;
        cut = line.size() - 4;
      } else {
        fail("expected an inequality '... < 0' or '... <= 0'");
      }
      Expr e;
      try {
        e = parse_expression(std::string_view(line).substr(0, cut), d.inputs);
      } catch (const parse_error& err) {
        fail(std::string("invalid polynomial: ") + err.what());
      }
      (strict ? s.strict : s.nonstrict).push_back(symbolic(e, env, nvars, UINT_MAX, 0));
    }
    d.pieces.push_back(std::move(s));
  }
  if (i != lines.size()) {
    ++i;
    fail("trailing content after the last piece");
  }
  return d;
}

}  // namespace chaoscope::bss
