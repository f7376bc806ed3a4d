#pragma once

// Machines over the reals: a line-oriented program text, its parser and
// structural validation.
//
// Grammar (one node per non-blank, non-comment line; node indices count those
// lines from 0; `#` starts a comment):
//
//   input <var> [,] <var> ...                exactly once, as node 0
//   <var> = <expr>                           polynomial assignment
//   branch <expr> <0 ? <idx> : <idx>         also `<=0`; true target first
//   halt [<var> ...]                         stop, outputting the variables
//   goto <idx>
//   loop                                     same as `goto` to itself
//
//   <expr> : sums, differences, products, unary minus, parentheses,
//            `^` with a non-negative integer exponent, and `/` by a non-zero
//            constant. Literals are integers or decimals, taken as exact
//            rationals (0.1 is 1/10).

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chaoscope/bss/polynomial.hpp"
#include "chaoscope/error.hpp"

namespace chaoscope::bss {

struct Expr {
  enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow };

  Kind kind = Kind::Number;
  Rational value;         // Number; Div holds the divisor here
  std::string name;       // Variable
  std::size_t slot = 0;   // Variable, resolved against Program::variables
  unsigned exponent = 0;  // Pow
  std::vector<Expr> args;
};

struct InputNode {
  std::vector<std::string> vars;
};
struct AssignNode {
  std::string var;
  std::size_t slot = 0;
  Expr expr;
};
struct BranchNode {
  Expr expr;
  bool strict = true;  // `<0` when true, `<=0` when false
  std::size_t if_true = 0;
  std::size_t if_false = 0;
};
struct HaltNode {
  std::vector<std::string> vars;
  std::vector<std::size_t> slots;
};
struct GotoNode {
  std::size_t target = 0;
};

using Node = std::variant<InputNode, AssignNode, BranchNode, HaltNode, GotoNode>;

struct Program {
  std::vector<Node> nodes;
  std::vector<std::size_t> source_lines;  // 1-based line of each node
  std::vector<std::string> variables;     // inputs first, then assigned vars in order of appearance

  std::size_t input_count() const { return std::get<InputNode>(nodes.front()).vars.size(); }
  const std::vector<std::string>& inputs() const { return std::get<InputNode>(nodes.front()).vars; }
};

namespace detail {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t column = 0;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
      out.push_back({Token::Kind::Ident, std::string(line.substr(start, i - start)), start + 1});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      if (i < line.size() && line[i] == '.') {
        ++i;
        if (i >= line.size() || !std::isdigit(static_cast<unsigned char>(line[i])))
          throw parse_error("malformed decimal literal", line_no, start + 1);
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      }
      out.push_back({Token::Kind::Number, std::string(line.substr(start, i - start)), start + 1});
    } else if (c == '<' && i + 1 < line.size() && line[i + 1] == '=') {
      i += 2;
      out.push_back({Token::Kind::Symbol, "<=", start + 1});
    } else if (std::string_view("+-*/^()=<?:,").find(c) != std::string_view::npos) {
      ++i;
      out.push_back({Token::Kind::Symbol, std::string(1, c), start + 1});
    } else {
      throw parse_error(std::string("unexpected character '") + c + "'", line_no, start + 1);
    }
  }
  out.push_back({Token::Kind::End, "", line.size() + 1});
  return out;
}

inline Rational parse_decimal(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(Integer(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  Integer den = 1;
  for (std::size_t k = dot + 1; k < text.size(); ++k) den *= 10;
  return Rational(Integer(digits)) / Rational(den);
}

inline bool is_keyword(const std::string& s) {
  return s == "input" || s == "branch" || s == "halt" || s == "goto" || s == "loop";
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line_no) : toks_(std::move(tokens)), line_(line_no) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool accept(std::string_view sym) {
    if (peek().kind == Token::Kind::Symbol && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::End ? "end of line" : "'" + t.text + "'";
    throw parse_error(what + ", found " + found, line_, t.column);
  }

  std::string identifier() {
    if (peek().kind != Token::Kind::Ident) fail("expected a variable name");
    if (is_keyword(peek().text)) fail("keyword used as a variable name");
    return take().text;
  }

  std::size_t index() {
    if (peek().kind != Token::Kind::Number || peek().text.find('.') != std::string::npos)
      fail("expected a node index");
    try {
      return static_cast<std::size_t>(std::stoull(take().text));
    } catch (const std::exception&) {
      throw parse_error("node index out of range", line_, toks_[pos_ - 1].column);
    }
  }

  void end() {
    if (!at_end()) fail("unexpected trailing input");
  }

  Expr expression() {
    Expr lhs = term();
    while (true) {
      if (accept("+")) lhs = binary(Expr::Kind::Add, std::move(lhs), term());
      else if (accept("-")) lhs = binary(Expr::Kind::Sub, std::move(lhs), term());
      else return lhs;
    }
  }

 private:
  static Expr binary(Expr::Kind k, Expr a, Expr b) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  static std::optional<Rational> constant_value(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Number: return e.value;
      case Expr::Kind::Variable: return std::nullopt;
      case Expr::Kind::Neg: {
        auto v = constant_value(e.args[0]);
        if (v) return -*v;
        return std::nullopt;
      }
      case Expr::Kind::Pow: {
        auto v = constant_value(e.args[0]);
        if (!v) return std::nullopt;
        Rational r = 1;
        for (unsigned k = 0; k < e.exponent; ++k) r *= *v;
        return r;
      }
      case Expr::Kind::Div: {
        auto v = constant_value(e.args[0]);
        if (v) return *v / e.value;
        return std::nullopt;
      }
      default: {
        auto a = constant_value(e.args[0]);
        auto b = constant_value(e.args[1]);
        if (!a || !b) return std::nullopt;
        if (e.kind == Expr::Kind::Add) return *a + *b;
        if (e.kind == Expr::Kind::Sub) return *a - *b;
        return *a * *b;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    while (true) {
      if (accept("*")) {
        lhs = binary(Expr::Kind::Mul, std::move(lhs), unary());
      } else if (peek().kind == Token::Kind::Symbol && peek().text == "/") {
        std::size_t column = peek().column;
        ++pos_;
        Expr rhs = unary();
        auto divisor = constant_value(rhs);
        if (!divisor) throw parse_error("division is only allowed by a constant", line_, column);
        if (*divisor == 0) throw parse_error("division by zero", line_, column);
        Expr e;
        e.kind = Expr::Kind::Div;
        e.value = *divisor;
        e.args.push_back(std::move(lhs));
        lhs = std::move(e);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept("-")) {
      Expr e;
      e.kind = Expr::Kind::Neg;
      e.args.push_back(unary());
      return e;
    }
    if (accept("+")) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept("^")) {
      if (peek().kind != Token::Kind::Number || peek().text.find('.') != std::string::npos)
        fail("expected a non-negative integer exponent");
      unsigned long e = 0;
      try {
        e = std::stoul(take().text);
      } catch (const std::exception&) {
        e = 1000000;
      }
      if (e > 4096) throw parse_error("exponent too large", line_, toks_[pos_ - 1].column);
      Expr p;
      p.kind = Expr::Kind::Pow;
      p.exponent = static_cast<unsigned>(e);
      p.args.push_back(std::move(base));
      return p;
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      Expr e;
      e.kind = Expr::Kind::Number;
      e.value = parse_decimal(take().text);
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      if (is_keyword(t.text)) fail("keyword used in an expression");
      Expr e;
      e.kind = Expr::Kind::Variable;
      e.name = take().text;
      return e;
    }
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    fail("expected a number, variable or '('");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

inline void collect_reads(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::Variable) out.push_back(&e);
  for (const auto& a : e.args) collect_reads(a, out);
}

inline void resolve_slots(Expr& e, const std::map<std::string, std::size_t>& slots) {
  if (e.kind == Expr::Kind::Variable) {
    auto it = slots.find(e.name);
    e.slot = it == slots.end() ? SIZE_MAX : it->second;
  }
  for (auto& a : e.args) resolve_slots(a, slots);
}

inline std::vector<std::size_t> successors(const Node& node, std::size_t index) {
  return std::visit(
      [&](const auto& n) -> std::vector<std::size_t> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BranchNode>) return {n.if_true, n.if_false};
        else if constexpr (std::is_same_v<T, GotoNode>) return {n.target};
        else if constexpr (std::is_same_v<T, HaltNode>) return {};
        else return {index + 1};
      },
      node);
}

// Definite assignment: every read must be preceded, on every path from node 0,
// by an input or an assignment of that variable.
inline void check_definite_assignment(const Program& prog) {
  const std::size_t n = prog.nodes.size();
  const std::size_t nv = prog.variables.size();
  std::vector<std::vector<bool>> in(n, std::vector<bool>(nv, true));
  std::vector<bool> reached(n, false);
  in[0].assign(nv, false);
  reached[0] = true;

  auto out_of = [&](std::size_t i) {
    std::vector<bool> out = in[i];
    if (const auto* inp = std::get_if<InputNode>(&prog.nodes[i])) {
      for (std::size_t k = 0; k < inp->vars.size(); ++k) out[k] = true;
    } else if (const auto* as = std::get_if<AssignNode>(&prog.nodes[i])) {
      out[as->slot] = true;
    }
    return out;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!reached[i]) continue;
      auto out = out_of(i);
      for (std::size_t s : successors(prog.nodes[i], i)) {
        if (s >= n) continue;
        std::vector<bool> merged = in[s];
        if (!reached[s]) {
          merged = out;
          reached[s] = true;
          changed = true;
        } else {
          for (std::size_t k = 0; k < nv; ++k) merged[k] = merged[k] && out[k];
        }
        if (merged != in[s]) {
          in[s] = std::move(merged);
          changed = true;
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i]) continue;
    std::vector<const Expr*> reads;
    std::vector<std::size_t> read_slots;
    std::vector<std::string> read_names;
    if (const auto* as = std::get_if<AssignNode>(&prog.nodes[i])) collect_reads(as->expr, reads);
    if (const auto* br = std::get_if<BranchNode>(&prog.nodes[i])) collect_reads(br->expr, reads);
    for (const auto* r : reads) {
      read_slots.push_back(r->slot);
      read_names.push_back(r->name);
    }
    if (const auto* h = std::get_if<HaltNode>(&prog.nodes[i])) {
      read_slots = h->slots;
      read_names = h->vars;
    }
    for (std::size_t k = 0; k < read_slots.size(); ++k) {
      if (read_slots[k] == SIZE_MAX || !in[i][read_slots[k]])
        throw semantic_error("unbound variable '" + read_names[k] + "'", i);
    }
  }
}

}  // namespace detail

// Parses and validates a program. Throws parse_error (line, column) for
// syntax problems and semantic_error (node index) for invalid targets,
// misplaced input nodes, or variables read before assignment.
inline Program parse_program(std::string_view text) {
  Program prog;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size() || (pos == text.size() && line_no == 0)) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto tokens = detail::tokenize(line, line_no);
    if (tokens.front().kind == detail::Token::Kind::End) continue;
    detail::LineParser p(std::move(tokens), line_no);
    const std::size_t index = prog.nodes.size();
    const detail::Token head = p.peek();
    if (head.kind != detail::Token::Kind::Ident) p.fail("expected a statement");

    if (head.text == "input") {
      p.take();
      InputNode n;
      n.vars.push_back(p.identifier());
      while (!p.at_end()) {
        p.accept(",");
        n.vars.push_back(p.identifier());
      }
      prog.nodes.emplace_back(std::move(n));
    } else if (head.text == "branch") {
      p.take();
      BranchNode n;
      n.expr = p.expression();
      if (p.accept("<")) n.strict = true;
      else if (p.accept("<=")) n.strict = false;
      else p.fail("expected '<0' or '<=0'");
      if (p.peek().kind != detail::Token::Kind::Number || p.peek().text != "0") p.fail("comparison must be against 0");
      p.take();
      p.expect("?");
      n.if_true = p.index();
      p.expect(":");
      n.if_false = p.index();
      p.end();
      prog.nodes.emplace_back(std::move(n));
    } else if (head.text == "halt") {
      p.take();
      HaltNode n;
      while (!p.at_end()) {
        n.vars.push_back(p.identifier());
        p.accept(",");
      }
      prog.nodes.emplace_back(std::move(n));
    } else if (head.text == "goto") {
      p.take();
      GotoNode n{p.index()};
      p.end();
      prog.nodes.emplace_back(n);
    } else if (head.text == "loop") {
      p.take();
      p.end();
      prog.nodes.emplace_back(GotoNode{index});
    } else {
      AssignNode n;
      n.var = p.identifier();
      p.expect("=");
      n.expr = p.expression();
      p.end();
      prog.nodes.emplace_back(std::move(n));
    }
    prog.source_lines.push_back(line_no);
    if (end == text.size()) break;
  }

  if (prog.nodes.empty()) throw parse_error("empty program", std::max<std::size_t>(line_no, 1), 1);

  // Structure.
  if (!std::holds_alternative<InputNode>(prog.nodes.front())) throw semantic_error("first node must be 'input'", 0);
  for (std::size_t i = 1; i < prog.nodes.size(); ++i)
    if (std::holds_alternative<InputNode>(prog.nodes[i])) throw semantic_error("only node 0 may be 'input'", i);
  for (std::size_t i = 0; i < prog.nodes.size(); ++i) {
    for (std::size_t s : detail::successors(prog.nodes[i], i)) {
      bool falls_off = !std::holds_alternative<BranchNode>(prog.nodes[i]) &&
                       !std::holds_alternative<GotoNode>(prog.nodes[i]);
      if (s >= prog.nodes.size()) {
        throw semantic_error(falls_off ? "execution falls off the end of the program"
                                       : "invalid target " + std::to_string(s),
                             i);
      }
    }
  }

  // Variable slots: inputs first, then assignment targets in order.
  std::map<std::string, std::size_t> slots;
  for (const auto& v : prog.inputs()) {
    if (!slots.emplace(v, prog.variables.size()).second) throw semantic_error("duplicate input '" + v + "'", 0);
    prog.variables.push_back(v);
  }
  for (auto& node : prog.nodes) {
    if (auto* as = std::get_if<AssignNode>(&node)) {
      if (slots.emplace(as->var, prog.variables.size()).second) prog.variables.push_back(as->var);
    }
  }
  for (auto& node : prog.nodes) {
    if (auto* as = std::get_if<AssignNode>(&node)) {
      as->slot = slots.at(as->var);
      detail::resolve_slots(as->expr, slots);
    } else if (auto* br = std::get_if<BranchNode>(&node)) {
      detail::resolve_slots(br->expr, slots);
    } else if (auto* h = std::get_if<HaltNode>(&node)) {
      h->slots.clear();
      for (const auto& v : h->vars) {
        auto it = slots.find(v);
        h->slots.push_back(it == slots.end() ? SIZE_MAX : it->second);
      }
    }
  }
  detail::check_definite_assignment(prog);
  return prog;
}

// Parses a standalone polynomial expression over the given variables (used to
// read serialized halting-set descriptions back).
inline Expr parse_expression(std::string_view text, const std::vector<std::string>& variables) {
  auto tokens = detail::tokenize(text, 1);
  detail::LineParser p(std::move(tokens), 1);
  Expr e = p.expression();
  p.end();
  std::map<std::string, std::size_t> slots;
  for (std::size_t i = 0; i < variables.size(); ++i) slots.emplace(variables[i], i);
  detail::resolve_slots(e, slots);
  std::vector<const Expr*> reads;
  detail::collect_reads(e, reads);
  for (const auto* r : reads)
    if (r->slot == SIZE_MAX) throw parse_error("unknown variable '" + r->name + "'", 1, 1);
  return e;
}

}  // namespace chaoscope::bss
