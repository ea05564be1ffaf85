#include "swarmsync/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace swarmsync {

namespace {

bool on_grid(double t, double h) {
  const double k = t / h;
  return std::abs(k - std::round(k)) < 1e-6;
}

}  // namespace

ControlParams SimConfig::control_params() const {
  ControlParams p;
  p.nu1 = nu1;
  p.nu2 = nu2;
  p.lambda_bar = hurwitz().lambda_bar;
  const int N = n_agents();
  p.c_gain.reserve(N);
  for (int i = 0; i < N; ++i) {
    MatrixXd c(dims.p, dims.flat());
    for (int k = 0; k < dims.n; ++k)
      c.block(0, k * dims.p, dims.p, dims.p) =
        c_gain_scalars[i] * MatrixXd::Identity(dims.p, dims.p);
    p.c_gain.push_back(std::move(c));
  }
  p.Gamma0 = gamma0 * MatrixXd::Identity(dims.p, dims.p);
  p.Gamma1 = gamma1 * MatrixXd::Identity(dims.p, dims.p);
  p.Gamma2 = gamma2 * MatrixXd::Identity(dims.p, dims.p);
  return p;
}

BasisSet SimConfig::bases() const {
  if (basis_state.empty() && basis_leader.empty() && basis_dist.empty())
    return BasisSet::builtin12();
  return BasisSet::user_defined(dims, basis_state, basis_leader, basis_dist);
}

HurwitzDesign SimConfig::hurwitz() const { return hurwitz_from_poles(poles, beta); }

void SimConfig::validate() const {
  const int N = n_agents();
  if (N < 1) throw ValidationError("config: at least one follower required");
  if (dims.n < 2 || dims.p < 1) throw ValidationError("config: dims need n >= 2, p >= 1");
  if (!(horizon > 0.0)) throw ValidationError("config: horizon must be positive");
  if (!(step > 0.0 && step <= 0.01))
    throw ValidationError("config: step must satisfy 0 < h <= 0.01");
  if (stride < 1) throw ValidationError("config: stride must be >= 1");
  if (topologies.empty()) throw ValidationError("config: no topologies");
  for (const auto& t : topologies) {
    t.validate();
    if (t.n_agents() != N) throw ValidationError("config: topology size vs agent count");
  }
  schedule.validate(static_cast<int>(topologies.size()));
  for (double t : schedule.switch_times)
    if (!on_grid(t, step))
      throw ValidationError("config: switch time " + std::to_string(t) +
                            " not aligned to the step grid");
  if (switch_period > 0.0 && !on_grid(switch_period, step))
    throw ValidationError("config: step must divide the switching period");
  formation.validate(N, dims);
  obstacles.validate(dims.p);
  control_params().validate(N, dims); // also runs the Hurwitz construction
  if (static_cast<int>(c_gain_scalars.size()) != N)
    throw ValidationError("config: c_gain per agent");
  if (static_cast<int>(disturbances.size()) != N)
    throw ValidationError("config: one disturbance model per agent");
  for (const auto& d : disturbances)
    if (d.dimension() != dims.p) throw ValidationError("config: disturbance dimension");
  if (static_cast<int>(agent_init.size()) != N)
    throw ValidationError("config: initial state per agent");
  if (leader_init.size() != dims.flat())
    throw ValidationError("config: leader initial state length");
  for (const auto& x : agent_init)
    if (x.size() != dims.flat()) throw ValidationError("config: agent initial state length");
  for (const auto& m : agent_models)
    if (!(m.dims() == dims)) throw ValidationError("config: agent model dims");
  if (!(leader_model.dims() == dims)) throw ValidationError("config: leader model dims");

  // Initial separations strictly above thresholds (pre-perturbation).
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double sep = (agent_init[i].head(dims.p) - agent_init[j].head(dims.p)).norm();
      if (sep <= formation.pair_thresholds(i, j))
        throw ValidationError("initial separation: agents " + std::to_string(i + 1) + "," +
                              std::to_string(j + 1));
    }
    const double lsep = (agent_init[i].head(dims.p) - leader_init.head(dims.p)).norm();
    if (lsep <= formation.leader_thresholds(i))
      throw ValidationError("initial separation: agent " + std::to_string(i + 1) +
                            " vs leader");
    for (const auto& c : obstacles.centers) {
      const double osep = (agent_init[i].head(dims.p) - c).norm();
      if (osep <= obstacles.outer_radius)
        throw ValidationError("initial separation: agent " + std::to_string(i + 1) +
                              " vs obstacle");
    }
  }
}

VectorXd rk4_step(const std::function<VectorXd(double, const VectorXd&)>& f, double t,
                  const VectorXd& x, double h) {
  const VectorXd k1 = f(t, x);
  const VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const VectorXd k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Engine::Engine(const SimConfig& config)
    : cfg_(config),
      params_(config.control_params()),
      bases_(config.bases()),
      hurwitz_(config.hurwitz()) {
  cfg_.validate();
  const int N = cfg_.n_agents();
  np_ = cfg_.dims.flat();
  for (const auto& topo : cfg_.topologies) {
    if (!check_leader_rooted(topo))
      throw ValidationError("config: topology not leader-rooted");
    matrices_.push_back(build_matrices(topo));
    lyaps_.push_back(graph_lyapunov(topo, cfg_.nu1, cfg_.nu2));
  }
  for (int i = 0; i < N; ++i)
    banks_.push_back(NNBank::uniform(bases_.q(), bases_.q0(), bases_.qw(), cfg_.dims.p,
                                     cfg_.nn.g, cfg_.nn.g0, cfg_.nn.gw, cfg_.nn.kappa,
                                     cfg_.nn.kappa0, cfg_.nn.kappaw));
  wsz_ = (bases_.q() + bases_.q0() + bases_.qw()) * cfg_.dims.p;

  std::vector<VectorXd> init = cfg_.agent_init;
  if (cfg_.init_perturbation > 0.0) {
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> jitter(-cfg_.init_perturbation,
                                                  cfg_.init_perturbation);
    for (auto& x : init)
      for (int d = 0; d < cfg_.dims.p; ++d) x(d) += jitter(rng);
    // Perturbed positions must still clear every threshold.
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j)
        if ((init[i].head(cfg_.dims.p) - init[j].head(cfg_.dims.p)).norm() <=
            cfg_.formation.pair_thresholds(i, j))
          throw ValidationError("initial separation after perturbation");
      if ((init[i].head(cfg_.dims.p) - cfg_.leader_init.head(cfg_.dims.p)).norm() <=
          cfg_.formation.leader_thresholds(i))
        throw ValidationError("initial separation after perturbation (leader)");
    }
  }

  y_ = VectorXd::Zero(np_ + N * np_ + N * wsz_);
  y_.head(np_) = cfg_.leader_init;
  for (int i = 0; i < N; ++i) y_.segment(np_ * (1 + i), np_) = init[i];
  // Weights start at zero.
}

void Engine::unpack(const VectorXd& y, std::vector<AgentState>& agents, AgentState& leader,
                    std::vector<NNBank>& banks) const {
  const int N = cfg_.n_agents();
  leader = AgentState(cfg_.dims, y.head(np_));
  agents.clear();
  agents.reserve(N);
  for (int i = 0; i < N; ++i)
    agents.emplace_back(cfg_.dims, y.segment(np_ * (1 + i), np_));
  const int q = bases_.q(), q0 = bases_.q0(), qw = bases_.qw(), p = cfg_.dims.p;
  for (int i = 0; i < N; ++i) {
    const int base = np_ * (1 + N) + i * wsz_;
    banks[i].theta_hat = Eigen::Map<const MatrixXd>(y.data() + base, q, p);
    banks[i].theta0_hat = Eigen::Map<const MatrixXd>(y.data() + base + q * p, q0, p);
    banks[i].thetaw_hat = Eigen::Map<const MatrixXd>(y.data() + base + (q + q0) * p, qw, p);
  }
}

VectorXd Engine::derivative(double t, const VectorXd& y, int topo_id) const {
  const int N = cfg_.n_agents();
  const int q = bases_.q(), q0 = bases_.q0(), qw = bases_.qw(), p = cfg_.dims.p;
  const Topology& topo = cfg_.topologies[topo_id];
  const GraphMatrices& gm = matrices_[topo_id];
  const GraphLyapunov& gl = lyaps_[topo_id];

  std::vector<AgentState> agents;
  AgentState leader;
  unpack(y, agents, leader, banks_);

  VectorXd dy(y.size());
  dy.head(np_) = leader_derivative(cfg_.leader_model, leader, t);

  const VectorXd phi0 = bases_.leader(leader);
  const VectorXd phiw = bases_.disturbance(t);
  for (int i = 0; i < N; ++i) {
    const VectorXd u = control_input(i, agents, leader, topo, params_, cfg_.formation,
                                     cfg_.obstacles, banks_[i], bases_, t);
    const VectorXd w = cfg_.disturbances[i].signal(t);
    dy.segment(np_ * (1 + i), np_) =
        follower_derivative(cfg_.agent_models[i], agents[i], u, w);

    const StabilityError se =
        stability_error(i, agents, leader, topo, params_, cfg_.formation);
    const double degree_sum = gm.D(i, i) + gm.B(i, i);
    const TuningDerivatives td =
        tuning_derivatives(banks_[i], bases_.state(agents[i]), phi0, phiw, se.r,
                           gl.P(i, i), degree_sum);
    const int base = np_ * (1 + N) + i * wsz_;
    Eigen::Map<MatrixXd>(dy.data() + base, q, p) = td.dtheta;
    Eigen::Map<MatrixXd>(dy.data() + base + q * p, q0, p) = td.dtheta0;
    Eigen::Map<MatrixXd>(dy.data() + base + (q + q0) * p, qw, p) = td.dthetaw;
  }
  return dy;
}

VectorXd Engine::advance(double t, const VectorXd& y, int topo_id, double h) const {
  return rk4_step([this, topo_id](double tt, const VectorXd& yy) {
    return derivative(tt, yy, topo_id);
  }, t, y, h);
}

CompositeSnapshot Engine::snapshot(const VectorXd& y, int topo_id) const {
  const int N = cfg_.n_agents();
  const int n = cfg_.dims.n, p = cfg_.dims.p;
  const Topology& topo = cfg_.topologies[topo_id];
  std::vector<AgentState> agents;
  AgentState leader;
  unpack(y, agents, leader, banks_);

  CompositeSnapshot snap;
  snap.r = VectorXd::Zero(N * p);
  snap.E1 = MatrixXd::Zero(N * p, n - 1);
  for (int k = 1; k <= n - 1; ++k)
    snap.E1.col(k - 1) = global_sync_error(k, agents, leader, topo, params_, cfg_.formation);
  for (int i = 0; i < N; ++i) {
    const StabilityError se =
        stability_error(i, agents, leader, topo, params_, cfg_.formation);
    snap.r.segment(i * p, p) = se.r;
  }
  // Diagnostic mode: true weights unknown, use the estimates themselves.
  for (int i = 0; i < N; ++i) {
    snap.theta_err.push_back(banks_[i].theta_hat);
    snap.theta0_err.push_back(banks_[i].theta0_hat);
    snap.thetaw_err.push_back(banks_[i].thetaw_hat);
  }
  return snap;
}

CompositeV Engine::composite(const VectorXd& y, int topo_id) const {
  return composite_V(snapshot(y, topo_id), lyaps_[topo_id], hurwitz_.P1, banks_);
}

TraceSample Engine::make_sample(double t, const VectorXd& y, int topo_id) const {
  const int N = cfg_.n_agents();
  const int n = cfg_.dims.n, p = cfg_.dims.p;
  const Topology& topo = cfg_.topologies[topo_id];
  std::vector<AgentState> agents;
  AgentState leader;
  unpack(y, agents, leader, banks_);

  TraceSample s;
  s.t = t;
  s.topology_id = topo_id;
  s.leader = leader.flat();
  for (int i = 0; i < N; ++i) s.agents.push_back(agents[i].flat());
  for (int i = 0; i < N; ++i)
    s.controls.push_back(control_input(i, agents, leader, topo, params_, cfg_.formation,
                                       cfg_.obstacles, banks_[i], bases_, t));
  for (int i = 0; i < N; ++i) {
    VectorXd e(n * p);
    for (int k = 1; k <= n; ++k)
      e.segment((k - 1) * p, p) =
          sync_error(i, k, agents, leader, topo, params_, cfg_.formation);
    s.sync_errors.push_back(std::move(e));
    s.r.push_back(stability_error(i, agents, leader, topo, params_, cfg_.formation).r);
  }
  const CompositeV v = composite_V(snapshot(y, topo_id), lyaps_[topo_id], hurwitz_.P1, banks_);
  s.V1 = v.V1; s.V2 = v.V2; s.V3 = v.V3; s.V4 = v.V4; s.V5 = v.V5;

  double d1 = 0.0;
  for (int i = 0; i < N; ++i) {
    const VectorXd delta = (agents[i].block(1) - cfg_.formation.offsets[i + 1].head(p)) -
                           (leader.block(1) - cfg_.formation.offsets[0].head(p));
    d1 += delta.squaredNorm();
  }
  s.delta1_norm = std::sqrt(d1);

  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j)
      s.min_pair_sep =
          std::min(s.min_pair_sep, (agents[i].block(1) - agents[j].block(1)).norm());
    s.min_leader_sep =
        std::min(s.min_leader_sep, (agents[i].block(1) - leader.block(1)).norm());
    for (const auto& c : cfg_.obstacles.centers)
      s.min_obstacle_dist = std::min(s.min_obstacle_dist, (agents[i].block(1) - c).norm());
  }
  for (int i = 0; i < N; ++i) {
    s.weight_norms.push_back(banks_[i].theta_hat.norm());
    s.weight_norms.push_back(banks_[i].theta0_hat.norm());
    s.weight_norms.push_back(banks_[i].thetaw_hat.norm());
  }
  return s;
}

SimTrace Engine::simulate() {
  SimTrace trace;
  trace.dims = cfg_.dims;
  trace.n_agents = cfg_.n_agents();
  trace.step = cfg_.step;
  trace.stride = cfg_.stride;

  const double t0 = cfg_.schedule.switch_times.front();
  const double h = cfg_.step;
  const long steps = std::lround(cfg_.horizon / h);
  if (std::abs(steps * h - cfg_.horizon) > 1e-6 * h)
    throw ValidationError("simulate: horizon not a multiple of the step");

  VectorXd y = y_;
  int prev_id = active_index(cfg_.schedule, t0).first;
  trace.samples.push_back(make_sample(t0, y, prev_id));

  for (long k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const int id = active_index(cfg_.schedule, t).first;
    if (id != prev_id) {
      SwitchEvent ev;
      ev.t = t;
      ev.old_id = prev_id;
      ev.new_id = id;
      ev.V_old = composite(y, prev_id).total();
      ev.V_new = composite(y, id).total();
      trace.switches.push_back(ev);
      prev_id = id;
    }
    y = advance(t, y, id, h);
    if (!y.allFinite())
      throw NonFiniteState("simulate: divergence at t = " + std::to_string(t + h));
    if ((k + 1) % cfg_.stride == 0 || k + 1 == steps)
      trace.samples.push_back(make_sample(t + h, y, active_index(cfg_.schedule, t + h).first));
  }
  y_ = y;
  return trace;
}

SimTrace simulate(const SimConfig& config) { return Engine(config).simulate(); }

Metrics metrics(const SimTrace& trace) {
  if (trace.samples.empty()) throw ValidationError("metrics: empty trace");
  Metrics m;
  for (const auto& s : trace.samples) {
    for (const auto& u : s.controls) m.max_control_norm = std::max(m.max_control_norm, u.norm());
    m.min_pair_sep = std::min(m.min_pair_sep, s.min_pair_sep);
    m.min_leader_sep = std::min(m.min_leader_sep, s.min_leader_sep);
    m.min_obstacle_dist = std::min(m.min_obstacle_dist, s.min_obstacle_dist);
  }
  m.delta1_initial = trace.samples.front().delta1_norm;
  m.delta1_final = trace.samples.back().delta1_norm;

  const double t_end = trace.samples.back().t;
  const double t_start = trace.samples.front().t;
  const double tail_start = t_end - 0.2 * (t_end - t_start);
  for (const auto& s : trace.samples)
    if (s.t >= tail_start) m.ultimate_bound = std::max(m.ultimate_bound, s.delta1_norm);

  m.settling_time = t_start;
  for (auto it = trace.samples.rbegin(); it != trace.samples.rend(); ++it) {
    if (it->delta1_norm > m.ultimate_bound * (1.0 + 1e-12)) {
      m.settling_time = it->t;
      break;
    }
  }
  for (const auto& ev : trace.switches)
    m.switch_jump_ratios.push_back(ev.V_old > 0.0 ? ev.V_new / ev.V_old : 1.0);
  return m;
}

}  // namespace swarmsync
