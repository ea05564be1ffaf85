#pragma once

#include <memory>
#include <string>

#include "swarmsync/state.hpp"

namespace swarmsync {

/// Parsed arithmetic expression over one agent state and time.
///
/// Grammar (documented in the README):
///   identifiers  x[k][d]  (order k, component d, both 1-based), t
///   operators    + - * / ^        (^ binds tightest, right-associative)
///   functions    sin cos exp
///   numbers      decimal literals
class Expr {
public:
  virtual ~Expr() = default;
  virtual double eval(const AgentState& x, double t) const = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Parses `source` and validates every x[k][d] reference against `dims`.
/// Throws ParseError with a character-offset diagnostic on malformed input.
ExprPtr parse_expression(const std::string& source, StateDims dims);

}  // namespace swarmsync
