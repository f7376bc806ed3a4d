#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaoscope {

// Base for every failure the library reports. Callers that only care about
// "computation failed" catch this; the CLI maps it to exit code 1.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An orbit left the escape radius where the operation needs a bounded one.
class escape_error : public error {
 public:
  using error::error;
};

// Root bracketing failed: no sign change, or more than one root.
class bracket_error : public error {
 public:
  using error::error;
};

// Piecewise-linear partition is not Markov (even after bounded refinement).
class not_markov_error : public error {
 public:
  using error::error;
};

// Text could not be parsed. line/column are 1-based.
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line, std::size_t column)
      : error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Program parsed but violates a structural rule; node is 0-based.
class semantic_error : public error {
 public:
  semantic_error(const std::string& what, std::size_t node)
      : error("node " + std::to_string(node) + ": " + what), node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

// Symbolic path polynomial exceeded the configured degree cap.
class degree_overflow_error : public semantic_error {
 public:
  using semantic_error::semantic_error;
};

// Root isolation hit its subdivision cap without separating roots.
class unresolved_root_error : public error {
 public:
  using error::error;
};

}  // namespace chaoscope
