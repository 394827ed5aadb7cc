#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crnwd {

/// Malformed model structure: bad index, mismatched state length, missing species.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation called outside its stated precondition.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible models passed to merge.
struct CompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Overflow, NaN, or a singular linear system.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// State-space exploration exceeded max_states; carries the partial count.
struct ExplorationError : std::runtime_error {
  ExplorationError(const std::string& what, std::uint64_t explored)
      : std::runtime_error(what), states_explored(explored) {}
  std::uint64_t states_explored;
};

/// Invalid builder arguments (e.g. catalyst name collides with a rung).
struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Syntax error in a .crn or .csl file, with 1-based position.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
  int line;
  int column;
};

/// Inconsistent run configuration (horizon too small, missing file, bad axis).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace crnwd
