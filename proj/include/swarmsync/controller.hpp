#pragma once

#include <functional>
#include <vector>

#include "swarmsync/graph.hpp"
#include "swarmsync/nn.hpp"
#include "swarmsync/state.hpp"

namespace swarmsync {

/// Desired per-agent state offsets plus the collision thresholds and the
/// repulsion strength. offsets[0] is the leader's, offsets[i] follower i's;
/// each is a flat n*p vector (order-k block = psi_i^k).
struct FormationSpec {
  std::vector<VectorXd> offsets;
  MatrixXd pair_thresholds;   // psi_ij^1: symmetric, zero diagonal, positive off-diagonal
  VectorXd leader_thresholds; // psi_i0^1 > 0
  double repulsion_strength = 1.0; // varpi

  void validate(int n_agents, StateDims dims) const;
};

/// Obstacles share one detection radius R and one inner radius L in (0, R).
struct ObstacleSet {
  std::vector<VectorXd> centers;
  double outer_radius = 1.0;
  double inner_radius = 0.5;

  void validate(int p) const;
};

struct ControlParams {
  double nu1 = 1.0;
  double nu2 = 1.0;
  VectorXd lambda_bar;            // length n-1; lambda_n = 1 implicit
  std::vector<MatrixXd> c_gain;   // per agent, p x (n*p)
  MatrixXd Gamma0, Gamma1, Gamma2; // p x p positive definite

  void validate(int n_agents, StateDims dims) const;
};

/// Per-agent composite bases used by the control and tuning laws.
class BasisSet {
public:
  /// The 12-dimensional bases of the reference scenario (n = 3, p = 2);
  /// the leader basis is the state basis applied to the leader's state.
  static BasisSet builtin12();

  static BasisSet user_defined(StateDims dims,
                               std::vector<std::string> state_exprs,
                               std::vector<std::string> leader_exprs,
                               std::vector<std::string> disturbance_exprs);

  VectorXd state(const AgentState& x) const { return state_(x); }
  VectorXd leader(const AgentState& x0) const { return leader_(x0); }
  VectorXd disturbance(double t) const { return dist_(t); }

  int q() const { return q_; }
  int q0() const { return q0_; }
  int qw() const { return qw_; }

  bool is_builtin() const { return builtin_; }

private:
  std::function<VectorXd(const AgentState&)> state_, leader_;
  std::function<VectorXd(double)> dist_;
  int q_ = 0, q0_ = 0, qw_ = 0;
  bool builtin_ = false;
};

/// Weighted synchronization error of order k for agent i (1-based order):
///   e_i^k = -nu1 sum_j a_ij (xbar_i^k - xbar_j^k) - nu2 b_i0 (xbar_i^k - xbar_0^k)
VectorXd sync_error(int agent, int order, const std::vector<AgentState>& states,
                    const AgentState& leader, const Topology& topology,
                    const ControlParams& params, const FormationSpec& formation);

/// Stacked matrix form -(nu1 L + nu2 B) (x) I_p (xbar^k - 1 (x) xbar_0^k).
VectorXd global_sync_error(int order, const std::vector<AgentState>& states,
                           const AgentState& leader, const Topology& topology,
                           const ControlParams& params, const FormationSpec& formation);

struct StabilityError {
  VectorXd r;   // lambda_1 e^1 + ... + lambda_{n-1} e^{n-1} + e^n
  VectorXd rho; // lambda_1 e^2 + ... + lambda_{n-1} e^n
};

StabilityError stability_error(int agent, const std::vector<AgentState>& states,
                               const AgentState& leader, const Topology& topology,
                               const ControlParams& params, const FormationSpec& formation);

/// Agent-agent / agent-leader repulsion magnitude: 0 beyond psi, varpi/d at
/// or inside it. Distances below 1e-9 raise ZeroSeparation.
double potential_agent(const VectorXd& xi1, const VectorXd& xj1, double psi, double varpi);

/// Obstacle repulsion: 0 beyond R, [(R^2-d^2)/(d^2-L^2)]^2 on (L, R];
/// InnerRadiusBreach at or below L.
double potential_obstacle(const VectorXd& xi1, const VectorXd& center, double outer_radius,
                          double inner_radius);

/// The distributed control input for agent i under the active topology.
/// Repulsive terms act along the unit separation vector pointing away from
/// the neighbor/leader/obstacle.
VectorXd control_input(int agent, const std::vector<AgentState>& states,
                       const AgentState& leader, const Topology& topology,
                       const ControlParams& params, const FormationSpec& formation,
                       const ObstacleSet& obstacles, const NNBank& bank,
                       const BasisSet& bases, double t);

/// Leader-relative error stack E_i0 (all n orders, offset-shifted).
VectorXd leader_error_stack(int agent, const std::vector<AgentState>& states,
                            const AgentState& leader, const FormationSpec& formation);

}  // namespace swarmsync
