#include "swarmsync/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swarmsync {

using nlohmann::json;

namespace {

VectorXd to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v(k) = j[k].get<double>();
  return v;
}

MatrixXd to_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a 2D array");
  const size_t rows = j.size(), cols = j[0].size();
  MatrixXd m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ParseError(what + ": ragged rows");
    for (size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json from_vector(const VectorXd& v) {
  json j = json::array();
  for (int k = 0; k < v.size(); ++k) j.push_back(v(k));
  return j;
}

json from_matrix(const MatrixXd& m) {
  json j = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    j.push_back(row);
  }
  return j;
}

DynamicsModel parse_model(const json& j, StateDims dims, bool leader,
                          const std::string& what) {
  const std::string kind = j.at("model").get<std::string>();
  if (kind == "builtin-leader") {
    if (!leader) throw ValidationError(what + ": builtin-leader used for a follower");
    return DynamicsModel::builtin(ModelKind::BuiltinLeader);
  }
  if (kind.rfind("builtin-", 0) == 0) {
    const int id = std::stoi(kind.substr(8));
    if (id < 1 || id > 5) throw ValidationError(what + ": unknown builtin model " + kind);
    static constexpr ModelKind kKinds[5] = {ModelKind::BuiltinAgent1, ModelKind::BuiltinAgent2,
                                            ModelKind::BuiltinAgent3, ModelKind::BuiltinAgent4,
                                            ModelKind::BuiltinAgent5};
    DynamicsModel m = DynamicsModel::builtin(kKinds[id - 1]);
    if (id == 5 && j.value("verbatim_input", false)) m.set_input_channel(1, false);
    return m;
  }
  if (kind == "user") {
    std::vector<std::string> exprs = j.at("exprs").get<std::vector<std::string>>();
    return DynamicsModel::user_defined(dims, exprs);
  }
  throw ValidationError(what + ": unknown model kind '" + kind + "'");
}

json serialize_model(const DynamicsModel& m) {
  json j;
  switch (m.kind()) {
    case ModelKind::BuiltinLeader: j["model"] = "builtin-leader"; break;
    case ModelKind::BuiltinAgent1: j["model"] = "builtin-1"; break;
    case ModelKind::BuiltinAgent2: j["model"] = "builtin-2"; break;
    case ModelKind::BuiltinAgent3: j["model"] = "builtin-3"; break;
    case ModelKind::BuiltinAgent4: j["model"] = "builtin-4"; break;
    case ModelKind::BuiltinAgent5:
      j["model"] = "builtin-5";
      if (!m.input_mask()[0]) j["verbatim_input"] = true;
      break;
    case ModelKind::UserDefined:
      j["model"] = "user";
      j["exprs"] = m.sources();
      break;
  }
  return j;
}

DisturbanceModel parse_disturbance(const json& j, int p, const std::string& what) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return DisturbanceModel::zero(p);
  if (kind == "default") return default_disturbance(p);
  if (kind == "sinusoidal-mix") {
    std::vector<std::vector<SinusoidTerm>> terms;
    for (const auto& axis : j.at("terms")) {
      std::vector<SinusoidTerm> ts;
      for (const auto& t : axis)
        ts.push_back(SinusoidTerm{t.at(0).get<double>(), t.at(1).get<double>(),
                                  t.at(2).get<double>()});
      terms.push_back(std::move(ts));
    }
    if (static_cast<int>(terms.size()) != p)
      throw ValidationError(what + ": sinusoidal-mix needs one term list per axis");
    return DisturbanceModel::sinusoidal_mix(std::move(terms), j.at("bound").get<double>());
  }
  if (kind == "user")
    return DisturbanceModel::user_defined(p, j.at("exprs").get<std::vector<std::string>>(),
                                          j.at("bound").get<double>());
  throw ValidationError(what + ": unknown disturbance kind '" + kind + "'");
}

json serialize_disturbance(const DisturbanceModel& m) {
  json j;
  switch (m.kind()) {
    case DisturbanceKind::Zero:
      j["kind"] = "zero";
      break;
    case DisturbanceKind::SinusoidalMix: {
      j["kind"] = "sinusoidal-mix";
      json terms = json::array();
      for (const auto& axis : m.terms()) {
        json a = json::array();
        for (const auto& t : axis) a.push_back({t.amplitude, t.omega, t.phase});
        terms.push_back(a);
      }
      j["terms"] = terms;
      j["bound"] = m.bound();
      break;
    }
    case DisturbanceKind::UserDefined:
      j["kind"] = "user";
      j["exprs"] = m.sources();
      j["bound"] = m.bound();
      break;
  }
  return j;
}

LoadedConfig parse_json(const json& root, const std::string& origin) {
  LoadedConfig out;
  SimConfig& cfg = out.sim;
  try {
    cfg.dims.n = root.value("n", 3);
    cfg.dims.p = root.value("p", 2);
    cfg.horizon = root.at("horizon").get<double>();
    cfg.step = root.at("step").get<double>();
    cfg.stride = root.value("stride", 1);
    cfg.seed = root.value("seed", 0);
    cfg.init_perturbation = root.value("initial_perturbation", 0.0);

    for (const auto& jt : root.at("topologies")) {
      Topology t;
      t.adjacency = to_matrix(jt.at("adjacency"), "topology adjacency");
      t.leader_weights = to_vector(jt.at("leader_weights"), "topology leader_weights");
      cfg.topologies.push_back(std::move(t));
    }
    const int N = static_cast<int>(root.at("agents").size());

    const auto& js = root.at("schedule");
    if (js.contains("period")) {
      cfg.switch_period = js.at("period").get<double>();
      cfg.schedule = SwitchingSchedule::periodic(0.0, cfg.horizon, cfg.switch_period,
                                                 static_cast<int>(cfg.topologies.size()));
    } else {
      cfg.switch_period = 0.0;
      cfg.schedule.switch_times = js.at("switch_times").get<std::vector<double>>();
      cfg.schedule.topology_ids = js.at("topology_ids").get<std::vector<int>>();
    }

    const auto& jc = root.at("control");
    cfg.nu1 = jc.value("nu1", 1.0);
    cfg.nu2 = jc.value("nu2", 1.0);
    cfg.poles = to_vector(jc.at("poles"), "control poles");
    cfg.beta = jc.value("beta", 1.0);
    if (jc.contains("c_gain") && jc.at("c_gain").is_array())
      cfg.c_gain_scalars = jc.at("c_gain").get<std::vector<double>>();
    else
      cfg.c_gain_scalars.assign(N, jc.value("c_gain", 0.5));
    cfg.gamma0 = jc.value("gamma0", 1.0);
    cfg.gamma1 = jc.value("gamma1", 1.0);
    cfg.gamma2 = jc.value("gamma2", 1.0);

    const auto& jf = root.at("formation");
    cfg.formation.repulsion_strength = jf.value("varpi", 1.0);
    if (jf.contains("offsets")) {
      for (const auto& o : jf.at("offsets"))
        cfg.formation.offsets.push_back(to_vector(o, "formation offsets"));
    } else {
      for (const auto& o : jf.at("position_offsets")) {
        VectorXd full = VectorXd::Zero(cfg.dims.flat());
        full.head(cfg.dims.p) = to_vector(o, "formation position_offsets");
        cfg.formation.offsets.push_back(std::move(full));
      }
    }
    if (jf.contains("pair_thresholds"))
      cfg.formation.pair_thresholds = to_matrix(jf.at("pair_thresholds"), "pair_thresholds");
    else {
      const double psi = jf.at("pair_threshold").get<double>();
      cfg.formation.pair_thresholds = MatrixXd::Constant(N, N, psi);
      cfg.formation.pair_thresholds.diagonal().setZero();
    }
    if (jf.contains("leader_thresholds"))
      cfg.formation.leader_thresholds =
          to_vector(jf.at("leader_thresholds"), "leader_thresholds");
    else
      cfg.formation.leader_thresholds =
          VectorXd::Constant(N, jf.at("leader_threshold").get<double>());

    if (root.contains("obstacles")) {
      const auto& jo = root.at("obstacles");
      for (const auto& c : jo.value("centers", json::array()))
        cfg.obstacles.centers.push_back(to_vector(c, "obstacle center"));
      cfg.obstacles.outer_radius = jo.value("outer_radius", 1.0);
      cfg.obstacles.inner_radius = jo.value("inner_radius", 0.5);
    }

    if (root.contains("nn")) {
      const auto& jn = root.at("nn");
      cfg.nn.g = jn.value("G", 5.0);
      cfg.nn.g0 = jn.value("G0", 5.0);
      cfg.nn.gw = jn.value("Gw", 5.0);
      cfg.nn.kappa = jn.value("kappa", 0.1);
      cfg.nn.kappa0 = jn.value("kappa0", 0.1);
      cfg.nn.kappaw = jn.value("kappaw", 0.1);
    }

    if (root.contains("basis")) {
      const auto& jb = root.at("basis");
      cfg.basis_state = jb.at("state").get<std::vector<std::string>>();
      cfg.basis_leader = jb.at("leader").get<std::vector<std::string>>();
      cfg.basis_dist = jb.at("disturbance").get<std::vector<std::string>>();
    }

    cfg.leader_model = parse_model(root.at("leader"), cfg.dims, true, "leader");
    for (const auto& ja : root.at("agents"))
      cfg.agent_models.push_back(parse_model(ja, cfg.dims, false, "agent"));

    if (root.contains("disturbances")) {
      for (const auto& jd : root.at("disturbances"))
        cfg.disturbances.push_back(parse_disturbance(jd, cfg.dims.p, "disturbances"));
    } else if (root.contains("disturbance")) {
      for (int i = 0; i < N; ++i)
        cfg.disturbances.push_back(
            parse_disturbance(root.at("disturbance"), cfg.dims.p, "disturbance"));
    } else {
      for (int i = 0; i < N; ++i) cfg.disturbances.push_back(DisturbanceModel::zero(cfg.dims.p));
    }

    const auto& ji = root.at("initial");
    cfg.leader_init = to_vector(ji.at("leader"), "initial leader");
    for (const auto& x : ji.at("agents"))
      cfg.agent_init.push_back(to_vector(x, "initial agents"));

    if (root.contains("analysis")) {
      const auto& ja = root.at("analysis");
      out.analysis.gamma = ja.value("gamma", 1.0);
      out.analysis.kappa_max = ja.value("kappa_max", -1.0);
      out.analysis.cE0 = ja.value("cE0", 0.0);
      out.analysis.residual_tm_tn = ja.value("residual", 0.0);
    }
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  cfg.validate();
  return out;
}

}  // namespace

LoadedConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

LoadedConfig parse_config_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return parse_json(root, origin);
}

std::string serialize_config(const LoadedConfig& loaded) {
  const SimConfig& cfg = loaded.sim;
  json root;
  root["n"] = cfg.dims.n;
  root["p"] = cfg.dims.p;
  root["horizon"] = cfg.horizon;
  root["step"] = cfg.step;
  root["stride"] = cfg.stride;
  root["seed"] = cfg.seed;
  root["initial_perturbation"] = cfg.init_perturbation;

  root["topologies"] = json::array();
  for (const auto& t : cfg.topologies)
    root["topologies"].push_back(
        {{"adjacency", from_matrix(t.adjacency)},
         {"leader_weights", from_vector(t.leader_weights)}});

  if (cfg.switch_period > 0.0)
    root["schedule"] = {{"period", cfg.switch_period}};
  else
    root["schedule"] = {{"switch_times", cfg.schedule.switch_times},
                        {"topology_ids", cfg.schedule.topology_ids}};

  root["control"] = {{"nu1", cfg.nu1},         {"nu2", cfg.nu2},
                     {"poles", from_vector(cfg.poles)}, {"beta", cfg.beta},
                     {"c_gain", cfg.c_gain_scalars},    {"gamma0", cfg.gamma0},
                     {"gamma1", cfg.gamma1},   {"gamma2", cfg.gamma2}};

  json jf;
  jf["varpi"] = cfg.formation.repulsion_strength;
  jf["offsets"] = json::array();
  for (const auto& o : cfg.formation.offsets) jf["offsets"].push_back(from_vector(o));
  jf["pair_thresholds"] = from_matrix(cfg.formation.pair_thresholds);
  jf["leader_thresholds"] = from_vector(cfg.formation.leader_thresholds);
  root["formation"] = jf;

  json jo;
  jo["centers"] = json::array();
  for (const auto& c : cfg.obstacles.centers) jo["centers"].push_back(from_vector(c));
  jo["outer_radius"] = cfg.obstacles.outer_radius;
  jo["inner_radius"] = cfg.obstacles.inner_radius;
  root["obstacles"] = jo;

  root["nn"] = {{"G", cfg.nn.g},         {"G0", cfg.nn.g0},
                {"Gw", cfg.nn.gw},       {"kappa", cfg.nn.kappa},
                {"kappa0", cfg.nn.kappa0}, {"kappaw", cfg.nn.kappaw}};

  if (!cfg.basis_state.empty())
    root["basis"] = {{"state", cfg.basis_state},
                     {"leader", cfg.basis_leader},
                     {"disturbance", cfg.basis_dist}};

  root["leader"] = serialize_model(cfg.leader_model);
  root["agents"] = json::array();
  for (const auto& m : cfg.agent_models) root["agents"].push_back(serialize_model(m));

  root["disturbances"] = json::array();
  for (const auto& d : cfg.disturbances)
    root["disturbances"].push_back(serialize_disturbance(d));

  json ji;
  ji["leader"] = from_vector(cfg.leader_init);
  ji["agents"] = json::array();
  for (const auto& x : cfg.agent_init) ji["agents"].push_back(from_vector(x));
  root["initial"] = ji;

  root["analysis"] = {{"gamma", loaded.analysis.gamma},
                      {"kappa_max", loaded.analysis.kappa_max},
                      {"cE0", loaded.analysis.cE0},
                      {"residual", loaded.analysis.residual_tm_tn}};
  return root.dump(2);
}

}  // namespace swarmsync
