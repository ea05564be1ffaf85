#include "swarmsync/trace_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace swarmsync {

namespace {

std::vector<std::string> header_columns(const SimTrace& trace) {
  const int N = trace.n_agents, n = trace.dims.n, p = trace.dims.p;
  std::vector<std::string> cols = {"t", "topology_id", "delta1_norm"};
  auto block_cols = [&](const std::string& prefix) {
    for (int k = 1; k <= n; ++k)
      for (int d = 1; d <= p; ++d)
        cols.push_back(prefix + "_k" + std::to_string(k) + "_d" + std::to_string(d));
  };
  block_cols("x0");
  for (int i = 1; i <= N; ++i) {
    const std::string a = "a" + std::to_string(i);
    block_cols(a + "_x");
    for (int d = 1; d <= p; ++d) cols.push_back(a + "_u_d" + std::to_string(d));
    block_cols(a + "_e");
    for (int d = 1; d <= p; ++d) cols.push_back(a + "_r_d" + std::to_string(d));
  }
  for (const char* v : {"V1", "V2", "V3", "V4", "V5", "V"}) cols.push_back(v);
  cols.push_back("min_pair_sep");
  cols.push_back("min_leader_sep");
  cols.push_back("min_obstacle_dist");
  for (int i = 1; i <= N; ++i) {
    const std::string a = "a" + std::to_string(i);
    cols.push_back(a + "_wn_theta");
    cols.push_back(a + "_wn_theta0");
    cols.push_back(a + "_wn_thetaw");
  }
  return cols;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("write_trace_csv: cannot open " + path);
  f << std::setprecision(17);
  const auto cols = header_columns(trace);
  // Shape comment so a reader can reconstruct dimensions.
  f << "# swarmsync trace n=" << trace.dims.n << " p=" << trace.dims.p
    << " agents=" << trace.n_agents << " step=" << trace.step
    << " stride=" << trace.stride << "\n";
  for (size_t c = 0; c < cols.size(); ++c) f << cols[c] << (c + 1 < cols.size() ? "," : "\n");
  for (const auto& s : trace.samples) {
    f << s.t << "," << s.topology_id << "," << s.delta1_norm;
    for (int k = 0; k < s.leader.size(); ++k) f << "," << s.leader(k);
    for (int i = 0; i < trace.n_agents; ++i) {
      for (int k = 0; k < s.agents[i].size(); ++k) f << "," << s.agents[i](k);
      for (int k = 0; k < s.controls[i].size(); ++k) f << "," << s.controls[i](k);
      for (int k = 0; k < s.sync_errors[i].size(); ++k) f << "," << s.sync_errors[i](k);
      for (int k = 0; k < s.r[i].size(); ++k) f << "," << s.r[i](k);
    }
    f << "," << s.V1 << "," << s.V2 << "," << s.V3 << "," << s.V4 << "," << s.V5 << ","
      << s.V();
    f << "," << s.min_pair_sep << "," << s.min_leader_sep << "," << s.min_obstacle_dist;
    for (double w : s.weight_norms) f << "," << w;
    f << "\n";
  }
}

SimTrace read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("read_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("# swarmsync trace", 0) != 0)
    throw ParseError("read_trace_csv: missing shape comment in " + path);

  SimTrace trace;
  {
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      auto eat = [&tok](const char* key) -> const char* {
        const std::string k = std::string(key) + "=";
        return tok.rfind(k, 0) == 0 ? tok.c_str() + k.size() : nullptr;
      };
      if (const char* v = eat("n")) trace.dims.n = std::stoi(v);
      else if (const char* v = eat("p")) trace.dims.p = std::stoi(v);
      else if (const char* v = eat("agents")) trace.n_agents = std::stoi(v);
      else if (const char* v = eat("step")) trace.step = std::stod(v);
      else if (const char* v = eat("stride")) trace.stride = std::stoi(v);
    }
  }
  if (trace.dims.n < 1 || trace.dims.p < 1 || trace.n_agents < 1)
    throw ParseError("read_trace_csv: bad shape comment");
  if (!std::getline(f, line)) throw ParseError("read_trace_csv: missing header");

  const int N = trace.n_agents, np = trace.dims.flat(), p = trace.dims.p;
  const size_t expected = 3 + np + static_cast<size_t>(N) * (np + p + np + p) + 6 + 3 +
                          static_cast<size_t>(N) * 3;
  int lineno = 2;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != expected)
      throw ParseError("read_trace_csv: line " + std::to_string(lineno) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(expected));
    size_t c = 0;
    auto next = [&]() { return std::stod(cells[c++]); };
    TraceSample s;
    s.t = next();
    s.topology_id = static_cast<int>(next());
    s.delta1_norm = next();
    s.leader.resize(np);
    for (int k = 0; k < np; ++k) s.leader(k) = next();
    for (int i = 0; i < N; ++i) {
      VectorXd x(np), u(p), e(np), r(p);
      for (int k = 0; k < np; ++k) x(k) = next();
      for (int k = 0; k < p; ++k) u(k) = next();
      for (int k = 0; k < np; ++k) e(k) = next();
      for (int k = 0; k < p; ++k) r(k) = next();
      s.agents.push_back(std::move(x));
      s.controls.push_back(std::move(u));
      s.sync_errors.push_back(std::move(e));
      s.r.push_back(std::move(r));
    }
    s.V1 = next(); s.V2 = next(); s.V3 = next(); s.V4 = next(); s.V5 = next();
    next(); // total V, derived
    s.min_pair_sep = next();
    s.min_leader_sep = next();
    s.min_obstacle_dist = next();
    for (int i = 0; i < 3 * N; ++i) s.weight_norms.push_back(next());
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

void write_switches_csv(const SimTrace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("write_switches_csv: cannot open " + path);
  f << std::setprecision(17);
  f << "t,old_id,new_id,V_old,V_new,ratio\n";
  for (const auto& ev : trace.switches)
    f << ev.t << "," << ev.old_id << "," << ev.new_id << "," << ev.V_old << "," << ev.V_new
      << "," << (ev.V_old > 0.0 ? ev.V_new / ev.V_old : 1.0) << "\n";
}

void write_plot_script(const SimTrace& trace, const std::string& trace_csv,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("write_plot_script: cannot open " + path);
  const int N = trace.n_agents, n = trace.dims.n, p = trace.dims.p;
  const int leader_col0 = 4; // 1-based gnuplot column of x0_k1_d1
  auto agent_col0 = [&](int i) { return leader_col0 + n * p + i * (2 * n * p + 2 * p); };
  f << "# gnuplot script; run: gnuplot " << path << "\n";
  f << "set datafile separator ','\n";
  f << "set key outside\n";
  f << "set terminal pngcairo size 1100,800\n";
  f << "set output 'positions.png'\n";
  f << "set multiplot layout 2,1\n";
  for (int d = 0; d < std::min(p, 2); ++d) {
    f << "set title 'position component " << d + 1 << "'\n";
    f << "set xlabel 't [s]'\n";
    f << "plot '" << trace_csv << "' using 1:" << leader_col0 + d
      << " with lines lw 2 title 'leader'";
    for (int i = 0; i < N; ++i)
      f << ", '' using 1:" << agent_col0(i) + d << " with lines title 'agent " << i + 1
        << "'";
    f << "\n";
  }
  f << "unset multiplot\n";
  f << "set output 'errors.png'\n";
  f << "set multiplot layout 2,1\n";
  for (int d = 0; d < std::min(p, 2); ++d) {
    f << "set title 'leader-relative position error, component " << d + 1 << "'\n";
    f << "set xlabel 't [s]'\n";
    f << "plot ";
    for (int i = 0; i < N; ++i) {
      // (x_i - psi_i) - (x_0 - psi_0) differs from x_i - x_0 by a constant;
      // plot the raw difference, which shows the same convergence shape.
      f << (i ? ", '" : "'") << trace_csv << "' using 1:($" << agent_col0(i) + d << "-$"
        << leader_col0 + d << ") with lines title 'agent " << i + 1 << "'";
    }
    f << "\n";
  }
  f << "unset multiplot\n";
}

void write_matrix_csv(const MatrixXd& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("write_matrix_csv: cannot open " + path);
  f << std::setprecision(17);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) f << m(i, j) << (j + 1 < m.cols() ? "," : "\n");
}

}  // namespace swarmsync
