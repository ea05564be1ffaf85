#include "swarmsync/safety.hpp"

#include <cmath>

namespace swarmsync {

double barrier_value(const Barrier& barrier, const std::vector<AgentState>& states,
                     const AgentState& leader, const ObstacleSet& obstacles) {
  switch (barrier.kind) {
    case BarrierKind::Pair:
      return (states[barrier.i].block(1) - states[barrier.j].block(1)).norm() -
             barrier.threshold;
    case BarrierKind::Leader:
      return (states[barrier.i].block(1) - leader.block(1)).norm() - barrier.threshold;
    case BarrierKind::Obstacle:
      return (states[barrier.i].block(1) - obstacles.centers[barrier.obstacle]).norm() -
             barrier.threshold;
  }
  throw ValidationError("barrier_value: unreachable kind");
}

VectorXd PairSystem::drift(const VectorXd& joint) const {
  const StateDims d = dims();
  const int np = d.flat();
  if (joint.size() != 2 * np) throw DimensionMismatch("PairSystem::drift: joint size");
  const AgentState xi(d, joint.head(np));
  const AgentState xj(d, joint.tail(np));
  const VectorXd zero = VectorXd::Zero(d.p);
  VectorXd out(2 * np);
  // Open-loop drift: Brunovsky chains with u = w = 0 (Agent 5's channel
  // mask applies to u only, so the drift is unaffected).
  out.head(np) = follower_derivative(model_i, xi, zero, zero);
  out.tail(np) = follower_derivative(model_j, xj, zero, zero);
  return out;
}

MatrixXd PairSystem::input_channel_i() const {
  const StateDims d = dims();
  MatrixXd Fu = MatrixXd::Zero(2 * d.flat(), d.p);
  Fu.block((d.n - 1) * d.p, 0, d.p, d.p) = MatrixXd::Identity(d.p, d.p);
  return Fu;
}

namespace {

// Five-point central difference of g along direction v at x.
double directional(const std::function<double(const VectorXd&)>& g, const VectorXd& x,
                   const VectorXd& v, double eps) {
  const double n = v.norm();
  if (n < 1e-14) return 0.0;
  const VectorXd u = v / n;
  const double gp2 = g(x + 2.0 * eps * u);
  const double gp1 = g(x + eps * u);
  const double gm1 = g(x - eps * u);
  const double gm2 = g(x - 2.0 * eps * u);
  return n * (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * eps);
}

}  // namespace

LieChainReport lie_chain_check(const std::function<VectorXd(const VectorXd&)>& drift,
                               const MatrixXd& input_channel,
                               const std::function<double(const VectorXd&)>& barrier,
                               const VectorXd& x, int n_order, double step) {
  if (input_channel.rows() != x.size())
    throw DimensionMismatch("lie_chain_check: input channel rows");
  LieChainReport rep;
  // lie[v] evaluates L_{Fx}^v h as a function of the state.
  std::function<double(const VectorXd&)> lie = barrier;
  for (int v = 0; v < n_order; ++v) {
    double input_mag = 0.0;
    for (int c = 0; c < input_channel.cols(); ++c) {
      const double d = directional(lie, x, input_channel.col(c), step);
      input_mag += d * d;
    }
    rep.input_lie_magnitude.push_back(std::sqrt(input_mag));
    auto prev = lie;
    lie = [prev, drift, step](const VectorXd& y) {
      return directional(prev, y, drift(y), step);
    };
    const double val = lie(x);
    if (!std::isfinite(val))
      throw AdmissibilityViolation("lie_chain_check: non-finite Lie derivative");
    if (v == 0) rep.first_numeric = val;
    if (v == 1) rep.second_numeric = val;
  }
  return rep;
}

double pair_lie_first(const AgentState& xi, const AgentState& xj) {
  const VectorXd l = xi.block(1) - xj.block(1);
  const double s = l.norm();
  if (s < 1e-12) throw AdmissibilityViolation("pair_lie_first: coincident positions");
  return (l / s).dot(xi.block(2) - xj.block(2));
}

double pair_lie_second(const AgentState& xi, const AgentState& xj) {
  const VectorXd l = xi.block(1) - xj.block(1);
  const double s = l.norm();
  if (s < 1e-12) throw AdmissibilityViolation("pair_lie_second: coincident positions");
  const VectorXd n = l / s;
  const VectorXd dv = xi.block(2) - xj.block(2);
  const VectorXd tangential = dv - n * n.dot(dv);
  return tangential.squaredNorm() / s + n.dot(xi.block(3) - xj.block(3));
}

double gain_rule(const GainRuleInputs& in) {
  if (in.w_bound < 0.0 || in.rest_bound < 0.0 || in.drift_bound < 0.0 ||
      in.cross_bound < 0.0)
    throw ValidationError("gain_rule: negative bound");
  if (in.psi <= 0.0 || in.varpi <= 0.0)
    throw ValidationError("gain_rule: psi and varpi must be positive");
  const double denom = 2.0 * in.varpi - in.cross_bound * in.psi;
  if (denom <= 0.0)
    throw RuleInapplicable("gain_rule: 2*varpi <= cross_bound*psi (varpi too small for psi)");
  return (in.w_bound + in.rest_bound + in.drift_bound) * in.psi / denom;
}

GainRuleInputs estimate_bounds(const SimTrace& trace, int i, int j, const SimConfig& config,
                               int sample_stride) {
  if (trace.samples.empty()) throw ValidationError("estimate_bounds: empty trace");
  const StateDims dims = trace.dims;
  const int N = trace.n_agents;
  const ControlParams params = config.control_params();
  const BasisSet bases = config.bases();

  GainRuleInputs out;
  out.psi = config.formation.pair_thresholds(i, j);
  out.varpi = config.formation.repulsion_strength;
  out.w_bound = config.disturbances[i].bound() + config.disturbances[j].bound();

  PairSystem pair{config.agent_models[i], config.agent_models[j]};
  auto joint_drift = [&pair](const VectorXd& y) { return pair.drift(y); };
  const int np = dims.flat();
  auto pair_barrier = [&](const VectorXd& y) {
    return (y.head(dims.p) - y.segment(np, dims.p)).norm() - out.psi;
  };

  // One engine-equivalent bank per agent to re-evaluate controls; weights
  // are not recorded in the trace, so the non-repulsive split is measured
  // with the weight terms at their logged contribution: u_rest is
  // reconstructed as logged u minus the recomputed repulsive terms.
  for (size_t s = 0; s < trace.samples.size(); ++s) {
    const TraceSample& smp = trace.samples[s];
    std::vector<AgentState> states;
    states.reserve(N);
    for (int a = 0; a < N; ++a) states.emplace_back(dims, smp.agents[a]);
    const AgentState leader(dims, smp.leader);

    const VectorXd sep = states[i].block(1) - states[j].block(1);
    const double dist = sep.norm();
    if (dist < 1e-12) throw AdmissibilityViolation("estimate_bounds: coincident pair");
    const VectorXd n_ij = sep / dist;

    // Repulsive split per agent: obstacle + pairwise + leader channels.
    auto repulsive = [&](int a) {
      VectorXd rep = VectorXd::Zero(dims.p);
      const VectorXd pos = states[a].block(1);
      for (const auto& c : config.obstacles.centers) {
        const double mag = potential_obstacle(pos, c, config.obstacles.outer_radius,
                                              config.obstacles.inner_radius);
        if (mag > 0.0) rep += params.Gamma0 * (mag * (pos - c).normalized());
      }
      for (int b = 0; b < N; ++b) {
        if (b == a) continue;
        const double mag =
            potential_agent(pos, states[b].block(1), config.formation.pair_thresholds(a, b),
                            config.formation.repulsion_strength);
        if (mag > 0.0) rep += params.Gamma1 * (mag * (pos - states[b].block(1)).normalized());
      }
      const double mag =
          potential_agent(pos, leader.block(1), config.formation.leader_thresholds(a),
                          config.formation.repulsion_strength);
      if (mag > 0.0) rep += params.Gamma2 * (mag * (pos - leader.block(1)).normalized());
      return rep;
    };
    // Third-party agent-agent repulsion only (the pair's own term excluded).
    auto cross_terms = [&](int a, int other) {
      VectorXd acc = VectorXd::Zero(dims.p);
      const VectorXd pos = states[a].block(1);
      for (int b = 0; b < N; ++b) {
        if (b == a || b == other) continue;
        const double mag =
            potential_agent(pos, states[b].block(1), config.formation.pair_thresholds(a, b),
                            config.formation.repulsion_strength);
        if (mag > 0.0) acc += mag * (pos - states[b].block(1)).normalized();
      }
      return acc;
    };

    const VectorXd rest_i = smp.controls[i] - repulsive(i);
    const VectorXd rest_j = smp.controls[j] - repulsive(j);
    out.rest_bound = std::max(out.rest_bound, std::abs(n_ij.dot(rest_i - rest_j)));
    out.cross_bound =
        std::max(out.cross_bound, (cross_terms(i, j) - cross_terms(j, i)).norm());

    if (s % static_cast<size_t>(sample_stride) == 0) {
      VectorXd joint(2 * np);
      joint.head(np) = smp.agents[i];
      joint.tail(np) = smp.agents[j];
      std::function<double(const VectorXd&)> lie = pair_barrier;
      for (int v = 0; v < dims.n; ++v) {
        auto prev = lie;
        lie = [prev, joint_drift](const VectorXd& y) {
          return directional(prev, y, joint_drift(y), 1e-3);
        };
      }
      out.drift_bound = std::max(out.drift_bound, std::abs(lie(joint)));
    }
  }
  return out;
}

SafetyReport safety_monitor(const SimTrace& trace, const FormationSpec& formation,
                            const ObstacleSet& obstacles) {
  const int N = trace.n_agents;
  const int p = trace.dims.p;
  const int n_obs = static_cast<int>(obstacles.centers.size());
  SafetyReport rep;
  rep.min_pair_sep =
      MatrixXd::Constant(N, N, std::numeric_limits<double>::infinity());
  rep.min_leader_sep =
      VectorXd::Constant(N, std::numeric_limits<double>::infinity());
  rep.min_obstacle_dist =
      MatrixXd::Constant(N, std::max(n_obs, 1), std::numeric_limits<double>::infinity());

  for (const auto& s : trace.samples) {
    for (int i = 0; i < N; ++i) {
      const VectorXd pos_i = s.agents[i].head(p);
      for (int j = i + 1; j < N; ++j) {
        const double d = (pos_i - s.agents[j].head(p)).norm();
        if (d < rep.min_pair_sep(i, j)) {
          rep.min_pair_sep(i, j) = rep.min_pair_sep(j, i) = d;
        }
        const double margin = d - formation.pair_thresholds(i, j);
        if (margin < rep.worst.margin) {
          rep.worst = {"pair " + std::to_string(i + 1) + "-" + std::to_string(j + 1),
                       margin, s.t};
        }
      }
      const double dl = (pos_i - s.leader.head(p)).norm();
      rep.min_leader_sep(i) = std::min(rep.min_leader_sep(i), dl);
      const double lmargin = dl - formation.leader_thresholds(i);
      if (lmargin < rep.worst.margin)
        rep.worst = {"agent " + std::to_string(i + 1) + " vs leader", lmargin, s.t};
      for (int c = 0; c < n_obs; ++c) {
        const double dc = (pos_i - obstacles.centers[c]).norm();
        rep.min_obstacle_dist(i, c) = std::min(rep.min_obstacle_dist(i, c), dc);
        const double omargin = dc - obstacles.outer_radius;
        if (omargin < rep.worst.margin)
          rep.worst = {"agent " + std::to_string(i + 1) + " vs obstacle " +
                           std::to_string(c + 1),
                       omargin, s.t};
      }
    }
  }
  rep.all_safe = rep.worst.margin >= 0.0;
  return rep;
}

}  // namespace swarmsync
