#pragma once

#include <stdexcept>
#include <string>

namespace swarmsync {

// All domain errors derive from Error and carry a stable machine-greppable
// prefix ("E_SOMETHING: detail") so CLI consumers can match on the first token.
class Error : public std::runtime_error {
public:
  Error(const std::string& prefix, const std::string& detail)
      : std::runtime_error(prefix + ": " + detail), prefix_(prefix) {}
  const std::string& prefix() const { return prefix_; }

private:
  std::string prefix_;
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& d) : Error("E_DIMENSION", d) {}
};

struct SingularCoupling : Error {
  explicit SingularCoupling(const std::string& d) : Error("E_SINGULAR_COUPLING", d) {}
};

struct NonPositiveQ : Error {
  explicit NonPositiveQ(const std::string& d) : Error("E_NONPOSITIVE_Q", d) {}
};

struct NonPositivePole : Error {
  explicit NonPositivePole(const std::string& d) : Error("E_NONPOSITIVE_POLE", d) {}
};

struct InvalidDecayRate : Error {
  explicit InvalidDecayRate(const std::string& d) : Error("E_INVALID_DECAY_RATE", d) {}
};

struct BoundViolation : Error {
  explicit BoundViolation(const std::string& d) : Error("E_BOUND_VIOLATION", d) {}
};

struct ZeroSeparation : Error {
  explicit ZeroSeparation(const std::string& d) : Error("E_ZERO_SEPARATION", d) {}
};

struct InnerRadiusBreach : Error {
  explicit InnerRadiusBreach(const std::string& d) : Error("E_INNER_RADIUS_BREACH", d) {}
};

struct IsolatedAgent : Error {
  explicit IsolatedAgent(const std::string& d) : Error("E_ISOLATED_AGENT", d) {}
};

struct RuleInapplicable : Error {
  explicit RuleInapplicable(const std::string& d) : Error("E_RULE_INAPPLICABLE", d) {}
};

struct AdmissibilityViolation : Error {
  explicit AdmissibilityViolation(const std::string& d) : Error("E_ADMISSIBILITY", d) {}
};

struct NonFiniteState : Error {
  explicit NonFiniteState(const std::string& d) : Error("E_NONFINITE_STATE", d) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& d) : Error("E_PARSE", d) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& d) : Error("E_VALIDATION", d) {}
};

}  // namespace swarmsync
