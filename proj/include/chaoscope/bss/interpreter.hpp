#pragma once

// Floating-point small-step execution of a parsed machine.

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "chaoscope/bss/program.hpp"
#include "chaoscope/error.hpp"

namespace chaoscope::bss {

struct Halted {
  std::vector<double> outputs;
  std::size_t steps = 0;  // nodes executed, counting the input and halt nodes
};

struct OutOfFuel {
  std::size_t steps = 0;
};

using RunResult = std::variant<Halted, OutOfFuel>;

inline double evaluate(const Expr& e, const std::vector<double>& env) {
  switch (e.kind) {
    case Expr::Kind::Number: return to_double(e.value);
    case Expr::Kind::Variable: return env[e.slot];
    case Expr::Kind::Neg: return -evaluate(e.args[0], env);
    case Expr::Kind::Add: return evaluate(e.args[0], env) + evaluate(e.args[1], env);
    case Expr::Kind::Sub: return evaluate(e.args[0], env) - evaluate(e.args[1], env);
    case Expr::Kind::Mul: return evaluate(e.args[0], env) * evaluate(e.args[1], env);
    case Expr::Kind::Div: return evaluate(e.args[0], env) / to_double(e.value);
    case Expr::Kind::Pow: {
      double base = evaluate(e.args[0], env);
      double r = 1.0;
      for (unsigned k = 0; k < e.exponent; ++k) r *= base;
      return r;
    }
  }
  return 0.0;
}

// Executes at most `fuel` nodes. Throws error if the input arity is wrong.
inline RunResult run(const Program& prog, const std::vector<double>& inputs, std::size_t fuel) {
  if (inputs.size() != prog.input_count())
    throw error("machine expects " + std::to_string(prog.input_count()) + " inputs, got " +
                std::to_string(inputs.size()));
  std::vector<double> env(prog.variables.size(), 0.0);
  std::size_t pc = 0;
  std::size_t steps = 0;
  while (steps < fuel) {
    ++steps;
    const Node& node = prog.nodes[pc];
    if (std::holds_alternative<InputNode>(node)) {
      for (std::size_t k = 0; k < inputs.size(); ++k) env[k] = inputs[k];
      ++pc;
    } else if (const auto* as = std::get_if<AssignNode>(&node)) {
      env[as->slot] = evaluate(as->expr, env);
      ++pc;
    } else if (const auto* br = std::get_if<BranchNode>(&node)) {
      double v = evaluate(br->expr, env);
      bool taken = br->strict ? v < 0.0 : v <= 0.0;
      pc = taken ? br->if_true : br->if_false;
    } else if (const auto* h = std::get_if<HaltNode>(&node)) {
      Halted out;
      out.steps = steps;
      for (std::size_t s : h->slots) out.outputs.push_back(env[s]);
      return out;
    } else {
      pc = std::get<GotoNode>(node).target;
    }
  }
  return OutOfFuel{steps};
}

}  // namespace chaoscope::bss
