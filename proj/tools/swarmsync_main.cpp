#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "swarmsync/config.hpp"
#include "swarmsync/safety.hpp"
#include "swarmsync/trace_io.hpp"

namespace fs = std::filesystem;
using namespace swarmsync;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitSafety = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int stride = 0;           // 0 = keep config value
  double horizon_override = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

LoadedConfig load(const CommonArgs& args) {
  LoadedConfig cfg = parse_config(args.config_path);
  if (args.stride > 0) cfg.sim.stride = args.stride;
  if (args.horizon_override > 0.0) {
    cfg.sim.horizon = args.horizon_override;
    if (cfg.sim.switch_period > 0.0)
      cfg.sim.schedule = SwitchingSchedule::periodic(
          0.0, cfg.sim.horizon, cfg.sim.switch_period,
          static_cast<int>(cfg.sim.topologies.size()));
  }
  if (args.seed_set) cfg.sim.seed = args.seed;
  cfg.sim.validate();
  return cfg;
}

int run_simulate(const CommonArgs& args) {
  const LoadedConfig cfg = load(args);
  fs::create_directories(args.out_dir);
  const SimTrace trace = simulate(cfg.sim);
  const Metrics m = metrics(trace);

  write_trace_csv(trace, (fs::path(args.out_dir) / "trace.csv").string());
  write_switches_csv(trace, (fs::path(args.out_dir) / "switches.csv").string());
  write_plot_script(trace, "trace.csv", (fs::path(args.out_dir) / "plot.gp").string());

  std::ofstream mf(fs::path(args.out_dir) / "metrics.txt");
  mf << "max_control_norm=" << m.max_control_norm << "\n"
     << "delta1_initial=" << m.delta1_initial << "\n"
     << "delta1_final=" << m.delta1_final << "\n"
     << "ultimate_bound=" << m.ultimate_bound << "\n"
     << "settling_time=" << m.settling_time << "\n"
     << "min_pair_sep=" << m.min_pair_sep << "\n"
     << "min_leader_sep=" << m.min_leader_sep << "\n"
     << "min_obstacle_dist=" << m.min_obstacle_dist << "\n";
  for (size_t s = 0; s < m.switch_jump_ratios.size(); ++s)
    mf << "switch_jump_ratio_" << s << "=" << m.switch_jump_ratios[s] << "\n";

  std::cout << "trace: " << trace.samples.size() << " samples, "
            << trace.switches.size() << " switches; ||delta1|| "
            << m.delta1_initial << " -> " << m.delta1_final
            << "; max ||u|| = " << m.max_control_norm << "\n";
  return kExitOk;
}

int run_analyze(const CommonArgs& args, const std::string& trace_path,
                bool export_matrices) {
  const LoadedConfig cfg = load(args);
  const SimConfig& sim = cfg.sim;
  fs::create_directories(args.out_dir);

  const HurwitzDesign hw = sim.hurwitz();
  const BasisSet bases = sim.bases();
  const NNBank bank = NNBank::uniform(bases.q(), bases.q0(), bases.qw(), sim.dims.p,
                                      sim.nn.g, sim.nn.g0, sim.nn.gw, sim.nn.kappa,
                                      sim.nn.kappa0, sim.nn.kappaw);
  const GainExtremes gains = gain_extremes(bank, hw.P1);
  const DwellTimeReport dwell =
      dwell_time_report(sim.topologies, sim.nu1, sim.nu2, hw.lambda_bar, gains);

  double kappa_max = cfg.analysis.kappa_max;
  if (kappa_max < 0.0) {
    kappa_max = 0.0;
    for (const auto& t : sim.topologies)
      kappa_max = std::max(kappa_max, algebraic_connectivity(t));
  }
  const std::vector<double> iotas =
      iota_weights(sim.topologies, cfg.analysis.gamma, kappa_max);

  // Envelope bounds for the K report: measured from a trace when given,
  // otherwise the config-supplied estimates.
  double phi_n = 0.0, phi_nw = 0.0, phi_n0 = 0.0;
  double theta_n = 0.0, theta_nw = 0.0, theta_n0 = 0.0;
  double cE0 = cfg.analysis.cE0;
  if (!trace_path.empty()) {
    const SimTrace trace = read_trace_csv(trace_path);
    const ControlParams params = sim.control_params();
    for (const auto& s : trace.samples) {
      const AgentState leader(trace.dims, s.leader);
      phi_n0 = std::max(phi_n0, bases.leader(leader).norm());
      phi_nw = std::max(phi_nw, bases.disturbance(s.t).norm());
      for (int i = 0; i < trace.n_agents; ++i) {
        const AgentState x(trace.dims, s.agents[i]);
        phi_n = std::max(phi_n, bases.state(x).norm());
        theta_n = std::max(theta_n, s.weight_norms[3 * i]);
        theta_n0 = std::max(theta_n0, s.weight_norms[3 * i + 1]);
        theta_nw = std::max(theta_nw, s.weight_norms[3 * i + 2]);
        const VectorXd E0 = (s.agents[i] - sim.formation.offsets[i + 1]) -
                            (s.leader - sim.formation.offsets[0]);
        cE0 = std::max(cE0, (params.c_gain[i] * E0).norm());
      }
    }
  }

  std::ofstream rf(fs::path(args.out_dir) / "analysis.txt");
  std::ofstream sf(fs::path(args.out_dir) / "analysis.kv");
  rf << "Dwell-time report\n=================\n";
  rf << "rho0 = " << dwell.rho0 << (dwell.rho0 > 0 ? "" : "  (not positive)") << "\n";
  rf << "mu = " << dwell.mu << "\n";
  if (dwell.conclusive)
    rf << "tau_a* = " << dwell.tau_star << " s\n";
  else
    rf << "tau_a* = inconclusive (requires 0 < rho0 < 1)\n";
  sf << "rho0=" << dwell.rho0 << "\nmu=" << dwell.mu << "\n"
     << "conclusive=" << (dwell.conclusive ? 1 : 0) << "\n";
  if (dwell.conclusive) sf << "tau_star=" << dwell.tau_star << "\n";
  for (const auto& e : dwell.per_topology) {
    rf << "  topology " << e.id << ": 1/2 min_eig(Q) = " << e.half_min_eig_Q
       << ", coupling term = " << e.coupling_term << ", rho_sigma = " << e.rho_sigma
       << ", s2 = " << e.s2 << ", iota = " << iotas[e.id] << "\n";
    sf << "rho_sigma_" << e.id << "=" << e.rho_sigma << "\n";
    sf << "s2_" << e.id << "=" << e.s2 << "\n";
  }

  rf << "\nK-matrix report (per topology)\n==============================\n";
  for (size_t s = 0; s < sim.topologies.size(); ++s) {
    const Topology& topo = sim.topologies[s];
    const GraphMatrices gm = build_matrices(topo);
    const GraphLyapunov gl = graph_lyapunov(topo, sim.nu1, sim.nu2);
    KMatrixInputs in;
    in.beta = sim.beta;
    in.kappa = sim.nn.kappa;
    in.kappaw = sim.nn.kappaw;
    in.kappa0 = sim.nn.kappa0;
    in.p_max = gl.P.diagonal().maxCoeff();
    in.a_max = Eigen::JacobiSVD<MatrixXd>(topo.adjacency).singularValues().maxCoeff();
    in.db_min = (gm.D + gm.B).diagonal().minCoeff();
    in.q_min = gl.q_min_eig;
    in.coupling_max = Eigen::JacobiSVD<MatrixXd>(sim.nu1 * gm.L + sim.nu2 * gm.B)
                          .singularValues()
                          .maxCoeff();
    in.p1_max = Eigen::JacobiSVD<MatrixXd>(hw.P1).singularValues().maxCoeff();
    in.delta_fro = hw.companion.norm();
    in.lambda_norm = hw.lambda_bar.norm();
    in.phi_n = phi_n;
    in.phi_nw = phi_nw;
    in.phi_n0 = phi_n0;
    in.theta_n = theta_n;
    in.theta_nw = theta_nw;
    in.theta_n0 = theta_n0;
    in.cE0 = cE0;
    in.residual_tm_tn = cfg.analysis.residual_tm_tn;
    const KMatrixReport rep = k_matrix_report(in);
    rf << "topology " << s << ": sylvester_ok = " << (rep.sylvester_ok ? "yes" : "no");
    if (!rep.sylvester_ok) rf << " (minor " << rep.failing_minor << ")";
    rf << ", B_d = " << rep.B_d << ", mu1 = " << rep.mu1 << ", g = " << rep.g
       << ", gamma = (" << rep.gamma1 << ", " << rep.gamma2 << ", " << rep.gamma3 << ")\n";
    sf << "sylvester_ok_" << s << "=" << (rep.sylvester_ok ? 1 : 0) << "\n";
    sf << "B_d_" << s << "=" << rep.B_d << "\n";

    if (export_matrices) {
      const std::string base = (fs::path(args.out_dir) / ("topology_" + std::to_string(s))).string();
      write_matrix_csv(gm.D, base + "_D.csv");
      write_matrix_csv(gm.L, base + "_L.csv");
      write_matrix_csv(gm.B, base + "_B.csv");
      write_matrix_csv(sim.nu1 * gm.L + sim.nu2 * gm.B, base + "_coupling.csv");
      write_matrix_csv(gl.P, base + "_P.csv");
      write_matrix_csv(gl.Q, base + "_Q.csv");
    }
  }
  std::cout << "analysis written to " << args.out_dir << " (rho0 = " << dwell.rho0
            << ", mu = " << dwell.mu << ")\n";
  return kExitOk;
}

int run_check_safety(const CommonArgs& args, const std::string& trace_path) {
  const LoadedConfig cfg = load(args);
  const SimTrace trace = read_trace_csv(trace_path);
  const SafetyReport rep = safety_monitor(trace, cfg.sim.formation, cfg.sim.obstacles);
  fs::create_directories(args.out_dir);
  std::ofstream f(fs::path(args.out_dir) / "safety.txt");
  f << "all_safe=" << (rep.all_safe ? 1 : 0) << "\n";
  f << "worst=" << rep.worst.label << "\n";
  f << "worst_margin=" << rep.worst.margin << "\n";
  f << "worst_time=" << rep.worst.time << "\n";
  std::cout << (rep.all_safe ? "SAFE" : "VIOLATION") << ": worst margin "
            << rep.worst.margin << " (" << rep.worst.label << " at t=" << rep.worst.time
            << ")\n";
  return rep.all_safe ? kExitOk : kExitSafety;
}

int run_gain_rule(const CommonArgs& args, const std::string& trace_path) {
  const LoadedConfig cfg = load(args);
  const SimTrace trace = read_trace_csv(trace_path);
  fs::create_directories(args.out_dir);
  std::ofstream f(fs::path(args.out_dir) / "gain_rule.txt");
  const int N = trace.n_agents;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const GainRuleInputs in = estimate_bounds(trace, i, j, cfg.sim);
      f << "pair " << i + 1 << "-" << j + 1 << ": w=" << in.w_bound
        << " E=" << in.rest_bound << " D=" << in.drift_bound << " R=" << in.cross_bound;
      try {
        const double gmin = gain_rule(in);
        f << " -> Gamma1 > " << gmin << "\n";
      } catch (const RuleInapplicable&) {
        f << " -> rule inapplicable (2*varpi <= R*psi)\n";
      }
    }
  std::cout << "gain-rule recommendations written to " << args.out_dir << "\n";
  return kExitOk;
}

int run_sweep(const std::vector<std::string>& configs, const std::string& out_dir) {
  if (configs.empty()) {
    std::cerr << "swarmsync: E_CONFIG: sweep needs at least one config\n";
    return kExitConfig;
  }
  unsigned threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("SWARMSYNC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) threads = static_cast<unsigned>(v);
  }
  threads = std::min<unsigned>(threads, configs.size());

  std::atomic<size_t> next{0};
  std::atomic<int> worst{kExitOk};
  auto worker = [&]() {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= configs.size()) return;
      CommonArgs args;
      args.config_path = configs[k];
      args.out_dir = (fs::path(out_dir) / fs::path(configs[k]).stem()).string();
      int code;
      try {
        code = run_simulate(args);
      } catch (const ParseError&) {
        code = kExitConfig;
      } catch (const ValidationError&) {
        code = kExitConfig;
      } catch (const NonFiniteState&) {
        code = kExitDivergence;
      } catch (const InnerRadiusBreach&) {
        code = kExitSafety;
      }
      int cur = worst.load();
      while (code > cur && !worst.compare_exchange_weak(cur, code)) {}
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multi-agent formation-control simulator and analyzer"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string trace_path;
  bool export_matrices = false;
  std::vector<std::string> sweep_configs;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    if (needs_config)
      sub->add_option("--config,-c", args.config_path, "config file")->required();
    sub->add_option("--out,-o", args.out_dir, "output directory");
    sub->add_option("--stride", args.stride, "trace decimation stride");
    sub->add_option("--horizon-override", args.horizon_override, "override horizon [s]");
    sub->add_option("--seed", args.seed, "override seed")
        ->each([&](const std::string&) { args.seed_set = true; });
  };

  CLI::App* sim = app.add_subcommand("simulate", "run one closed-loop simulation");
  add_common(sim);
  CLI::App* ana = app.add_subcommand("analyze", "dwell-time and K-matrix reports");
  add_common(ana);
  ana->add_option("--trace", trace_path, "trace CSV for envelope measurement");
  ana->add_flag("--export-matrices", export_matrices, "write graph matrices as CSV");
  CLI::App* chk = app.add_subcommand("check-safety", "verdict over a recorded trace");
  add_common(chk);
  chk->add_option("--trace", trace_path, "trace CSV")->required();
  CLI::App* gr = app.add_subcommand("gain-rule", "minimum repulsion gains from a trace");
  add_common(gr);
  gr->add_option("--trace", trace_path, "trace CSV")->required();
  CLI::App* sw = app.add_subcommand("sweep", "run several configs in parallel");
  sw->add_option("--configs", sweep_configs, "config files")->required();
  sw->add_option("--out,-o", args.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(args);
    if (ana->parsed()) return run_analyze(args, trace_path, export_matrices);
    if (chk->parsed()) return run_check_safety(args, trace_path);
    if (gr->parsed()) return run_gain_rule(args, trace_path);
    if (sw->parsed()) return run_sweep(sweep_configs, args.out_dir);
  } catch (const ParseError& e) {
    std::cerr << "swarmsync: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "swarmsync: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonFiniteState& e) {
    std::cerr << "swarmsync: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const InnerRadiusBreach& e) {
    std::cerr << "swarmsync: " << e.what() << "\n";
    return kExitSafety;
  } catch (const Error& e) {
    std::cerr << "swarmsync: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
