#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swarmsync/expr.hpp"
#include "swarmsync/state.hpp"

namespace swarmsync {

enum class ModelKind {
  BuiltinLeader,
  BuiltinAgent1,
  BuiltinAgent2,
  BuiltinAgent3,
  BuiltinAgent4,
  BuiltinAgent5,
  UserDefined,
};

/// Drift field of one agent (or the leader): maps (state, time) to the
/// top-block derivative contribution f(x) or f0(x0, t) in R^p.
///
/// The five builtin followers and the builtin leader are the heterogeneous
/// models of the reference scenario, hard-coded with their printed
/// coefficients (n = 3, p = 2). User-defined models hold one parsed
/// expression per output component.
class DynamicsModel {
public:
  DynamicsModel() = default;

  static DynamicsModel builtin(ModelKind kind);

  static DynamicsModel user_defined(StateDims dims,
                                    const std::vector<std::string>& component_exprs);

  ModelKind kind() const { return kind_; }
  const StateDims& dims() const { return dims_; }

  /// f(x, t): leader models may use t, follower models ignore it.
  VectorXd drift(const AgentState& x, double t) const;

  /// Builtin agent 5's printed first channel lacks a control term; by
  /// default the control enters every channel anyway (the agent-dynamics
  /// template is normative). Setting this mask entry to false reproduces
  /// the printed dynamics verbatim for channel 1.
  const std::vector<bool>& input_mask() const { return input_mask_; }
  void set_input_channel(int component, bool enabled);

  /// Expression sources for user-defined models (empty for builtins).
  const std::vector<std::string>& sources() const { return sources_; }

private:
  ModelKind kind_ = ModelKind::UserDefined;
  StateDims dims_{3, 2};
  std::vector<ExprPtr> exprs_;
  std::vector<std::string> sources_;
  std::vector<bool> input_mask_;
};

enum class DisturbanceKind { Zero, SinusoidalMix, UserDefined };

/// One additive sinusoid a*sin(omega*t + phase) on a single axis.
struct SinusoidTerm {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// Bounded time signal w(t) in R^p entering the top block of an agent.
class DisturbanceModel {
public:
  static DisturbanceModel zero(int p);

  /// terms[d] is the sinusoid list for axis d.
  static DisturbanceModel sinusoidal_mix(std::vector<std::vector<SinusoidTerm>> terms,
                                         double bound);

  static DisturbanceModel user_defined(int p, const std::vector<std::string>& exprs,
                                       double bound);

  DisturbanceKind kind() const { return kind_; }
  int dimension() const { return p_; }
  double bound() const { return bound_; }

  /// w(t); throws BoundViolation if ||w(t)|| exceeds the declared bound.
  VectorXd signal(double t) const;

  const std::vector<std::vector<SinusoidTerm>>& terms() const { return terms_; }
  const std::vector<std::string>& sources() const { return sources_; }

private:
  DisturbanceKind kind_ = DisturbanceKind::Zero;
  int p_ = 0;
  double bound_ = 0.0;
  std::vector<std::vector<SinusoidTerm>> terms_;
  std::vector<ExprPtr> exprs_;
  std::vector<std::string> sources_;
};

/// The default disturbance of the reference scenario: per axis
/// 0.1 sin(t) + 0.05 cos(2t), declared bound 0.15 * sqrt(p).
DisturbanceModel default_disturbance(int p);

/// Brunovsky chain: block k derivative is block k+1 for k < n, and the
/// top block is f(x) + u + w (u masked per the model's input channels).
VectorXd follower_derivative(const DynamicsModel& model, const AgentState& x,
                             const VectorXd& u, const VectorXd& w);

/// Brunovsky chain with top block f0(x0, t) and no input.
VectorXd leader_derivative(const DynamicsModel& model, const AgentState& x0, double t);

}  // namespace swarmsync
