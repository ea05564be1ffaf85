#include "swarmsync/controller.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "swarmsync/expr.hpp"

namespace swarmsync {

namespace {

constexpr double kSeparationFloor = 1e-9;

void check_shapes(const std::vector<AgentState>& states, const AgentState& leader,
                  int n_agents) {
  if (static_cast<int>(states.size()) != n_agents)
    throw DimensionMismatch("controller: state count vs topology size");
  for (const auto& s : states)
    if (!(s.dims() == leader.dims()))
      throw DimensionMismatch("controller: heterogeneous state shapes");
}

void require_pd(const MatrixXd& M, const char* name) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (M + M.transpose()));
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError(std::string(name) + ": not positive definite");
}

}  // namespace

void FormationSpec::validate(int n_agents, StateDims dims) const {
  if (static_cast<int>(offsets.size()) != n_agents + 1)
    throw ValidationError("FormationSpec: need offsets for leader plus every follower");
  for (const auto& o : offsets)
    if (o.size() != dims.flat()) throw ValidationError("FormationSpec: offset length");
  if (pair_thresholds.rows() != n_agents || pair_thresholds.cols() != n_agents)
    throw ValidationError("FormationSpec: pair threshold matrix size");
  if ((pair_thresholds - pair_thresholds.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw ValidationError("FormationSpec: pair thresholds not symmetric");
  for (int i = 0; i < n_agents; ++i) {
    if (pair_thresholds(i, i) != 0.0)
      throw ValidationError("FormationSpec: pair threshold diagonal must be zero");
    for (int j = 0; j < n_agents; ++j)
      if (i != j && pair_thresholds(i, j) <= 0.0)
        throw ValidationError("FormationSpec: off-diagonal pair thresholds must be positive");
  }
  if (leader_thresholds.size() != n_agents || (leader_thresholds.array() <= 0.0).any())
    throw ValidationError("FormationSpec: leader thresholds must be positive");
  if (repulsion_strength <= 0.0)
    throw ValidationError("FormationSpec: repulsion strength must be positive");
}

void ObstacleSet::validate(int p) const {
  if (!(inner_radius > 0.0 && inner_radius < outer_radius))
    throw ValidationError("inner radius: need 0 < inner < outer");
  for (const auto& c : centers)
    if (c.size() != p) throw ValidationError("ObstacleSet: center dimension");
}

void ControlParams::validate(int n_agents, StateDims dims) const {
  if (nu1 <= 0.0 || nu2 <= 0.0) throw ValidationError("ControlParams: nu gains");
  if (lambda_bar.size() != dims.n - 1)
    throw ValidationError("ControlParams: lambda_bar length must be n-1");
  if (static_cast<int>(c_gain.size()) != n_agents)
    throw ValidationError("ControlParams: c_gain per agent");
  for (const auto& c : c_gain)
    if (c.rows() != dims.p || c.cols() != dims.flat())
      throw ValidationError("ControlParams: c_gain must be p x (n*p)");
  if (Gamma0.rows() != dims.p || Gamma1.rows() != dims.p || Gamma2.rows() != dims.p)
    throw ValidationError("ControlParams: Gamma size");
  require_pd(Gamma0, "Gamma0");
  require_pd(Gamma1, "Gamma1");
  require_pd(Gamma2, "Gamma2");
}

BasisSet BasisSet::builtin12() {
  BasisSet b;
  b.state_ = [](const AgentState& x) { return eval_state_basis(x); };
  b.leader_ = [](const AgentState& x0) { return eval_state_basis(x0); };
  b.dist_ = [](double t) { return eval_disturbance_basis(t); };
  b.q_ = b.q0_ = b.qw_ = 12;
  b.builtin_ = true;
  return b;
}

BasisSet BasisSet::user_defined(StateDims dims, std::vector<std::string> state_exprs,
                                std::vector<std::string> leader_exprs,
                                std::vector<std::string> disturbance_exprs) {
  BasisSet b;
  b.q_ = static_cast<int>(state_exprs.size());
  b.q0_ = static_cast<int>(leader_exprs.size());
  b.qw_ = static_cast<int>(disturbance_exprs.size());
  if (b.q_ < 1 || b.q0_ < 1 || b.qw_ < 1)
    throw ValidationError("BasisSet: every basis needs at least one entry");
  auto build = [dims](const std::vector<std::string>& srcs) {
    std::vector<ExprPtr> out;
    out.reserve(srcs.size());
    for (const auto& s : srcs) out.push_back(parse_expression(s, dims));
    return out;
  };
  auto state_parsed = build(state_exprs);
  auto leader_parsed = build(leader_exprs);
  const StateDims time_only{1, 1};
  std::vector<ExprPtr> dist_parsed;
  for (const auto& s : disturbance_exprs)
    dist_parsed.push_back(parse_expression(s, time_only));

  b.state_ = [state_parsed](const AgentState& x) {
    VectorXd phi(state_parsed.size());
    for (size_t k = 0; k < state_parsed.size(); ++k) phi(k) = state_parsed[k]->eval(x, 0.0);
    return phi;
  };
  b.leader_ = [leader_parsed](const AgentState& x0) {
    VectorXd phi(leader_parsed.size());
    for (size_t k = 0; k < leader_parsed.size(); ++k) phi(k) = leader_parsed[k]->eval(x0, 0.0);
    return phi;
  };
  b.dist_ = [dist_parsed](double t) {
    const AgentState dummy = AgentState::Zero(StateDims{1, 1});
    VectorXd phi(dist_parsed.size());
    for (size_t k = 0; k < dist_parsed.size(); ++k) phi(k) = dist_parsed[k]->eval(dummy, t);
    return phi;
  };
  return b;
}

VectorXd sync_error(int agent, int order, const std::vector<AgentState>& states,
                    const AgentState& leader, const Topology& topology,
                    const ControlParams& params, const FormationSpec& formation) {
  const int N = topology.n_agents();
  check_shapes(states, leader, N);
  const StateDims dims = leader.dims();
  if (order < 1 || order > dims.n) throw DimensionMismatch("sync_error: order");
  const int i = agent;
  const int off = (order - 1) * dims.p;
  auto shifted = [&](const AgentState& s, const VectorXd& psi) {
    return (s.flat().segment(off, dims.p) - psi.segment(off, dims.p)).eval();
  };
  const VectorXd xi = shifted(states[i], formation.offsets[i + 1]);
  VectorXd e = VectorXd::Zero(dims.p);
  for (int j = 0; j < N; ++j) {
    const double a = topology.adjacency(i, j);
    if (a > 0.0) e -= params.nu1 * a * (xi - shifted(states[j], formation.offsets[j + 1]));
  }
  const double b = topology.leader_weights(i);
  if (b > 0.0) e -= params.nu2 * b * (xi - shifted(leader, formation.offsets[0]));
  return e;
}

VectorXd global_sync_error(int order, const std::vector<AgentState>& states,
                           const AgentState& leader, const Topology& topology,
                           const ControlParams& params, const FormationSpec& formation) {
  const int N = topology.n_agents();
  check_shapes(states, leader, N);
  const StateDims dims = leader.dims();
  const int off = (order - 1) * dims.p;
  const GraphMatrices m = build_matrices(topology);
  const MatrixXd coupling = params.nu1 * m.L + params.nu2 * m.B;
  const VectorXd x0bar =
      leader.flat().segment(off, dims.p) - formation.offsets[0].segment(off, dims.p);
  VectorXd diff(N * dims.p);
  for (int i = 0; i < N; ++i)
    diff.segment(i * dims.p, dims.p) = states[i].flat().segment(off, dims.p) -
                                       formation.offsets[i + 1].segment(off, dims.p) - x0bar;
  VectorXd e(N * dims.p);
  for (int i = 0; i < N; ++i) {
    e.segment(i * dims.p, dims.p).setZero();
    for (int j = 0; j < N; ++j)
      e.segment(i * dims.p, dims.p) -= coupling(i, j) * diff.segment(j * dims.p, dims.p);
  }
  return e;
}

StabilityError stability_error(int agent, const std::vector<AgentState>& states,
                               const AgentState& leader, const Topology& topology,
                               const ControlParams& params, const FormationSpec& formation) {
  const StateDims dims = leader.dims();
  const int n = dims.n;
  if (params.lambda_bar.size() != n - 1)
    throw DimensionMismatch("stability_error: lambda_bar length");
  StabilityError out;
  out.r = VectorXd::Zero(dims.p);
  out.rho = VectorXd::Zero(dims.p);
  for (int k = 1; k <= n; ++k) {
    const VectorXd ek = sync_error(agent, k, states, leader, topology, params, formation);
    const double lam = (k < n) ? params.lambda_bar(k - 1) : 1.0;
    out.r += lam * ek;
    if (k >= 2) out.rho += params.lambda_bar(k - 2) * ek;
  }
  return out;
}

double potential_agent(const VectorXd& xi1, const VectorXd& xj1, double psi, double varpi) {
  const double d = (xi1 - xj1).norm();
  if (d < kSeparationFloor)
    throw ZeroSeparation("potential_agent: separation " + std::to_string(d));
  if (d > psi) return 0.0;
  return varpi / d;
}

double potential_obstacle(const VectorXd& xi1, const VectorXd& center, double outer_radius,
                          double inner_radius) {
  const double d = (xi1 - center).norm();
  if (d > outer_radius) return 0.0;
  if (d <= inner_radius)
    throw InnerRadiusBreach("potential_obstacle: distance " + std::to_string(d) +
                            " at or below inner radius " + std::to_string(inner_radius));
  const double num = outer_radius * outer_radius - d * d;
  const double den = d * d - inner_radius * inner_radius;
  const double ratio = num / den;
  return ratio * ratio;
}

VectorXd leader_error_stack(int agent, const std::vector<AgentState>& states,
                            const AgentState& leader, const FormationSpec& formation) {
  return (states[agent].flat() - formation.offsets[agent + 1]) -
         (leader.flat() - formation.offsets[0]);
}

VectorXd control_input(int agent, const std::vector<AgentState>& states,
                       const AgentState& leader, const Topology& topology,
                       const ControlParams& params, const FormationSpec& formation,
                       const ObstacleSet& obstacles, const NNBank& bank,
                       const BasisSet& bases, double t) {
  const int N = topology.n_agents();
  check_shapes(states, leader, N);
  const int i = agent;
  const GraphMatrices m = build_matrices(topology);
  const double degree_sum = m.D(i, i) + m.B(i, i);
  if (degree_sum <= 0.0)
    throw IsolatedAgent("control_input: agent " + std::to_string(i) +
                        " has no in-edge or leader link");

  const StabilityError se = stability_error(i, states, leader, topology, params, formation);
  VectorXd u = se.rho / degree_sum;
  u -= estimate(bank.theta_hat, bases.state(states[i]));
  u -= estimate(bank.thetaw_hat, bases.disturbance(t));
  u += estimate(bank.theta0_hat, bases.leader(leader));
  u += se.r;
  u -= params.c_gain[i] * leader_error_stack(i, states, leader, formation);

  const VectorXd pos_i = states[i].block(1);
  for (size_t c = 0; c < obstacles.centers.size(); ++c) {
    const double mag = potential_obstacle(pos_i, obstacles.centers[c],
                                          obstacles.outer_radius, obstacles.inner_radius);
    if (mag > 0.0) {
      const VectorXd sep = pos_i - obstacles.centers[c];
      u += params.Gamma0 * (mag * sep.normalized());
    }
  }
  for (int j = 0; j < N; ++j) {
    if (j == i) continue;
    const double mag = potential_agent(pos_i, states[j].block(1),
                                       formation.pair_thresholds(i, j),
                                       formation.repulsion_strength);
    if (mag > 0.0) {
      const VectorXd sep = pos_i - states[j].block(1);
      u += params.Gamma1 * (mag * sep.normalized());
    }
  }
  {
    const double mag = potential_agent(pos_i, leader.block(1), formation.leader_thresholds(i),
                                       formation.repulsion_strength);
    if (mag > 0.0) {
      const VectorXd sep = pos_i - leader.block(1);
      u += params.Gamma2 * (mag * sep.normalized());
    }
  }
  if (!u.allFinite()) throw NonFiniteState("control_input: non-finite input");
  return u;
}

}  // namespace swarmsync
