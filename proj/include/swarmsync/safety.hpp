#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swarmsync/dynamics.hpp"
#include "swarmsync/sim.hpp"

namespace swarmsync {

enum class BarrierKind { Pair, Leader, Obstacle };

/// Signed safety margin h >= 0: pair and leader barriers measure distance
/// minus the separation threshold, obstacle barriers distance minus the
/// detection radius R.
struct Barrier {
  BarrierKind kind = BarrierKind::Pair;
  int i = 0;        // follower index (0-based)
  int j = 0;        // second follower for pair barriers
  int obstacle = 0; // obstacle index for obstacle barriers
  double threshold = 1.0;
};

double barrier_value(const Barrier& barrier, const std::vector<AgentState>& states,
                     const AgentState& leader, const ObstacleSet& obstacles);

/// Joint drift of a two-follower subsystem [x_i; x_j] with inputs and
/// disturbances off; the input channel of agent i feeds its top block.
struct PairSystem {
  DynamicsModel model_i, model_j;

  VectorXd drift(const VectorXd& joint) const;
  MatrixXd input_channel_i() const; // (2 n p) x p
  StateDims dims() const { return model_i.dims(); }
};

struct LieChainReport {
  /// ||L_{Fu} L_{Fx}^v h|| for v = 0 .. n-1 (input appears only at v = n-1).
  std::vector<double> input_lie_magnitude;
  double first_numeric = 0.0;  // L_{Fx} h
  double second_numeric = 0.0; // L_{Fx}^2 h
};

/// Numerically estimates the Lie-derivative chain of a barrier along a drift
/// field via nested five-point central differences.
LieChainReport lie_chain_check(const std::function<VectorXd(const VectorXd&)>& drift,
                               const MatrixXd& input_channel,
                               const std::function<double(const VectorXd&)>& barrier,
                               const VectorXd& x, int n_order, double step = 1e-3);

/// Closed-form first and second drift Lie derivatives of a pair barrier
/// under the chain structure:
///   L_Fx h  = n^T (v_i - v_j)
///   L_Fx2 h = (1/s)(v_i - v_j)^T (I - n n^T)(v_i - v_j) + n^T (a_i - a_j)
double pair_lie_first(const AgentState& xi, const AgentState& xj);
double pair_lie_second(const AgentState& xi, const AgentState& xj);

struct GainRuleInputs {
  double w_bound = 0.0;     // w_{n,ij}
  double rest_bound = 0.0;  // E_ij, non-repulsive projection envelope
  double drift_bound = 0.0; // D^nom_ij, n-th drift Lie derivative envelope
  double cross_bound = 0.0; // R_ij, third-party repulsion envelope
  double psi = 1.0;
  double varpi = 1.0;
};

/// Minimum admissible Gamma^1 from the explicit gain rule
///   Gamma > (w + E + D) psi / (2 varpi - R psi);
/// throws RuleInapplicable when the denominator is not positive.
double gain_rule(const GainRuleInputs& inputs);

/// Measures the gain-rule envelopes for one follower pair along a recorded
/// trace: drift_bound from the n-th drift Lie derivative of the pair
/// subsystem, rest_bound from the projected non-repulsive control split,
/// cross_bound from third-party repulsion, w_bound from the declared
/// disturbance bounds. sample_stride decimates the Lie-derivative scan.
GainRuleInputs estimate_bounds(const SimTrace& trace, int i, int j,
                               const SimConfig& config, int sample_stride = 50);

struct SafetyWorst {
  std::string label;
  double margin = std::numeric_limits<double>::infinity();
  double time = 0.0;
};

struct SafetyReport {
  bool all_safe = true;
  MatrixXd min_pair_sep;        // N x N (symmetric, inf on diagonal)
  VectorXd min_leader_sep;      // N
  MatrixXd min_obstacle_dist;   // N x (#obstacles)
  SafetyWorst worst;
};

/// Minimum separations over a whole trace against the configured
/// thresholds; obstacle distances are checked against the detection
/// radius R.
SafetyReport safety_monitor(const SimTrace& trace, const FormationSpec& formation,
                            const ObstacleSet& obstacles);

}  // namespace swarmsync
