#include "swarmsync/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Eigenvalues>

namespace swarmsync {

void Topology::validate() const {
  const int N = n_agents();
  if (adjacency.rows() != N || adjacency.cols() != N)
    throw DimensionMismatch("Topology: adjacency must be N x N with N = leader_weights size");
  if (!adjacency.allFinite() || !leader_weights.allFinite())
    throw ValidationError("Topology: non-finite weight");
  if ((adjacency.array() < 0.0).any() || (leader_weights.array() < 0.0).any())
    throw ValidationError("Topology: negative weight");
  for (int i = 0; i < N; ++i)
    if (adjacency(i, i) != 0.0) throw ValidationError("Topology: nonzero self-weight a_ii");
}

void SwitchingSchedule::validate(int topology_count) const {
  if (switch_times.empty() || switch_times.size() != topology_ids.size())
    throw ValidationError("SwitchingSchedule: times and ids must be nonempty and equal length");
  for (size_t s = 1; s < switch_times.size(); ++s)
    if (switch_times[s] <= switch_times[s - 1])
      throw ValidationError("SwitchingSchedule: switch times not strictly increasing");
  for (int id : topology_ids)
    if (id < 0 || id >= topology_count)
      throw ValidationError("SwitchingSchedule: topology id out of range");
}

SwitchingSchedule SwitchingSchedule::periodic(double t0, double horizon, double period,
                                              int topology_count) {
  if (period <= 0.0) throw ValidationError("SwitchingSchedule: period must be positive");
  SwitchingSchedule sched;
  int k = 0;
  for (double t = t0; t < t0 + horizon; t += period, ++k) {
    sched.switch_times.push_back(t0 + k * period);
    sched.topology_ids.push_back(k % topology_count);
  }
  return sched;
}

GraphMatrices build_matrices(const Topology& topology) {
  topology.validate();
  const int N = topology.n_agents();
  GraphMatrices m;
  m.D = MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) m.D(i, i) = topology.adjacency.row(i).sum();
  m.L = m.D - topology.adjacency;
  m.B = topology.leader_weights.asDiagonal();
  return m;
}

bool check_leader_rooted(const Topology& topology) {
  topology.validate();
  const int N = topology.n_agents();
  std::vector<char> reached(N, 0);
  std::queue<int> frontier;
  for (int i = 0; i < N; ++i)
    if (topology.leader_weights(i) > 0.0) {
      reached[i] = 1;
      frontier.push(i);
    }
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int i = 0; i < N; ++i)
      if (!reached[i] && topology.adjacency(i, j) > 0.0) { // i listens to j
        reached[i] = 1;
        frontier.push(i);
      }
  }
  return std::all_of(reached.begin(), reached.end(), [](char c) { return c != 0; });
}

MatrixXd coupling_matrix(const Topology& topology, double nu1, double nu2) {
  if (nu1 <= 0.0 || nu2 <= 0.0)
    throw ValidationError("coupling_matrix: nu1 and nu2 must be positive");
  const GraphMatrices m = build_matrices(topology);
  const MatrixXd coupling = nu1 * m.L + nu2 * m.B;
  const double inf_norm = coupling.cwiseAbs().rowwise().sum().maxCoeff();
  const double det = coupling.fullPivLu().determinant();
  const double tol =
      1e-12 * std::pow(std::max(inf_norm, 1e-300), topology.n_agents());
  if (std::abs(det) <= tol)
    throw SingularCoupling("coupling_matrix: |det| = " + std::to_string(std::abs(det)) +
                           " below tolerance " + std::to_string(tol));
  return coupling;
}

GraphLyapunov graph_lyapunov(const Topology& topology, double nu1, double nu2) {
  const MatrixXd coupling = coupling_matrix(topology, nu1, nu2);
  const int N = topology.n_agents();
  GraphLyapunov g;
  g.q = coupling.partialPivLu().solve(VectorXd::Ones(N));
  if ((g.q.array() <= 0.0).any())
    throw NonPositiveQ("graph_lyapunov: q has a non-positive entry");
  g.P = (1.0 / g.q.array()).matrix().asDiagonal();
  g.Q = g.P * coupling + coupling.transpose() * g.P;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(g.Q);
  g.q_min_eig = eig.eigenvalues().minCoeff();
  g.q_max_eig = eig.eigenvalues().maxCoeff();
  if (g.q_min_eig <= 0.0)
    throw NonPositiveQ("graph_lyapunov: Q min eigenvalue " + std::to_string(g.q_min_eig));
  return g;
}

std::pair<int, int> active_index(const SwitchingSchedule& schedule, double t) {
  if (schedule.switch_times.empty())
    throw ValidationError("active_index: empty schedule");
  if (t < schedule.switch_times.front())
    throw ValidationError("active_index: t before schedule start");
  // Last interval start <= t; id constant on [t_s, t_{s+1}).
  const auto it = std::upper_bound(schedule.switch_times.begin(),
                                   schedule.switch_times.end(), t);
  const int idx = static_cast<int>(it - schedule.switch_times.begin()) - 1;
  // Switch instants in (t0, t]: starts of all intervals after the first
  // whose start time is <= t.
  return {schedule.topology_ids[idx], idx};
}

double algebraic_connectivity(const Topology& topology) {
  const GraphMatrices m = build_matrices(topology);
  const MatrixXd sym = 0.5 * (m.L + m.L.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  if (topology.n_agents() < 2) return 0.0;
  return eig.eigenvalues()(1);
}

}  // namespace swarmsync
