#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "swarmsync/analysis.hpp"
#include "swarmsync/controller.hpp"
#include "swarmsync/dynamics.hpp"
#include "swarmsync/graph.hpp"

namespace swarmsync {

struct NNGains {
  double g = 5.0, g0 = 5.0, gw = 5.0;
  double kappa = 0.1, kappa0 = 0.1, kappaw = 0.1;
};

/// Everything one deterministic run needs. Built by the config loader; all
/// invariants are checked by validate() before a run starts.
struct SimConfig {
  StateDims dims{3, 2};
  double horizon = 40.0;
  double step = 0.001;
  int stride = 1;
  std::uint64_t seed = 0;
  double init_perturbation = 0.0; // uniform position jitter radius, seeded

  std::vector<Topology> topologies;
  SwitchingSchedule schedule;
  double switch_period = 0.0; // > 0 when the schedule came from a period

  FormationSpec formation;
  ObstacleSet obstacles;

  double nu1 = 1.0, nu2 = 1.0;
  VectorXd poles; // xi_j > 0, length n-1
  double beta = 1.0;
  std::vector<double> c_gain_scalars; // per agent; c_i = c * [I_p ... I_p]
  double gamma0 = 1.0, gamma1 = 1.0, gamma2 = 1.0; // Gamma^k = gamma_k * I_p

  NNGains nn;

  // Empty source lists select the builtin 12-dimensional bases.
  std::vector<std::string> basis_state, basis_leader, basis_dist;

  DynamicsModel leader_model;
  std::vector<DynamicsModel> agent_models;
  std::vector<DisturbanceModel> disturbances; // one per agent

  VectorXd leader_init;
  std::vector<VectorXd> agent_init;

  int n_agents() const { return static_cast<int>(agent_models.size()); }
  ControlParams control_params() const; // assembles lambda_bar from poles
  BasisSet bases() const;
  HurwitzDesign hurwitz() const;

  /// Checks every load-time invariant; throws ValidationError with the
  /// violated invariant named.
  void validate() const;
};

struct TraceSample {
  double t = 0.0;
  int topology_id = 0;
  VectorXd leader;
  std::vector<VectorXd> agents;
  std::vector<VectorXd> controls;
  std::vector<VectorXd> sync_errors; // per agent, stacked e_i^1..e_i^n (n*p)
  std::vector<VectorXd> r;
  double V1 = 0, V2 = 0, V3 = 0, V4 = 0, V5 = 0;
  double V() const { return V1 + V2 + V3 + V4 + V5; }
  double delta1_norm = 0.0;
  double min_pair_sep = std::numeric_limits<double>::infinity();
  double min_leader_sep = std::numeric_limits<double>::infinity();
  double min_obstacle_dist = std::numeric_limits<double>::infinity();
  std::vector<double> weight_norms; // per agent: ||theta||, ||theta0||, ||thetaw||
};

struct SwitchEvent {
  double t = 0.0;
  int old_id = 0, new_id = 0;
  double V_old = 0.0, V_new = 0.0;
};

struct SimTrace {
  StateDims dims;
  int n_agents = 0;
  double step = 0.0;
  int stride = 1;
  std::vector<TraceSample> samples;
  std::vector<SwitchEvent> switches;
};

/// One classical RK4 step of x' = f(t, x).
VectorXd rk4_step(const std::function<VectorXd(double, const VectorXd&)>& f, double t,
                  const VectorXd& x, double h);

/// Joint closed-loop integrator: all agent states, the leader state, and the
/// NN weights advance together; the control is re-evaluated at every RK4
/// stage while the topology stays frozen within a step.
class Engine {
public:
  explicit Engine(const SimConfig& config);

  SimTrace simulate();

  // Exposed for stepwise tests.
  VectorXd joint_state() const { return y_; }
  void set_joint_state(const VectorXd& y) { y_ = y; }
  VectorXd derivative(double t, const VectorXd& y, int topo_id) const;
  VectorXd advance(double t, const VectorXd& y, int topo_id, double h) const;

  CompositeSnapshot snapshot(const VectorXd& y, int topo_id) const;
  CompositeV composite(const VectorXd& y, int topo_id) const;
  const GraphLyapunov& lyapunov(int topo_id) const { return lyaps_[topo_id]; }
  const HurwitzDesign& hurwitz() const { return hurwitz_; }
  const std::vector<NNBank>& banks() const { return banks_; }

private:
  void unpack(const VectorXd& y, std::vector<AgentState>& agents, AgentState& leader,
              std::vector<NNBank>& banks) const;
  TraceSample make_sample(double t, const VectorXd& y, int topo_id) const;

  SimConfig cfg_;
  ControlParams params_;
  BasisSet bases_;
  HurwitzDesign hurwitz_;
  std::vector<GraphMatrices> matrices_;
  std::vector<GraphLyapunov> lyaps_;
  mutable std::vector<NNBank> banks_;
  VectorXd y_;
  int np_ = 0, wsz_ = 0;
};

SimTrace simulate(const SimConfig& config);

struct Metrics {
  double max_control_norm = 0.0;
  double delta1_initial = 0.0;
  double delta1_final = 0.0;
  double ultimate_bound = 0.0; // max ||delta^1|| over the last 20% of the horizon
  double settling_time = 0.0;  // first time the trace enters and stays within it
  double min_pair_sep = std::numeric_limits<double>::infinity();
  double min_leader_sep = std::numeric_limits<double>::infinity();
  double min_obstacle_dist = std::numeric_limits<double>::infinity();
  std::vector<double> switch_jump_ratios; // V_new / V_old per switch
};

Metrics metrics(const SimTrace& trace);

}  // namespace swarmsync
