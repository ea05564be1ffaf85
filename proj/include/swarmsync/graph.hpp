#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swarmsync/errors.hpp"

namespace swarmsync {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One communication topology over N followers plus the leader couplings.
/// adjacency(i,j) = a_ij is the weight on the edge j -> i (agent i listens
/// to agent j); leader_weights(i) = b_i0 couples follower i to the leader.
struct Topology {
  MatrixXd adjacency;      // N x N, nonnegative, zero diagonal
  VectorXd leader_weights; // length N, nonnegative

  int n_agents() const { return static_cast<int>(leader_weights.size()); }
  void validate() const;
};

/// Piecewise-constant switching signal: topology_ids[s] is active on
/// [switch_times[s], switch_times[s+1]). switch_times[0] is the start time.
struct SwitchingSchedule {
  std::vector<double> switch_times;
  std::vector<int> topology_ids;

  void validate(int topology_count) const;

  /// Convenience constructor for a periodic round-robin schedule covering
  /// [t0, horizon] with the given period.
  static SwitchingSchedule periodic(double t0, double horizon, double period,
                                    int topology_count);
};

/// q, P, Q of the graph Lyapunov equation (Lemma 3): q solves
/// (nu1 L + nu2 B) q = 1, P = diag(1/q_i), Q = P£ + £^T P.
struct GraphLyapunov {
  VectorXd q;
  MatrixXd P;
  MatrixXd Q;
  double q_min_eig = 0.0; // smallest eigenvalue of Q (symmetric)
  double q_max_eig = 0.0;
};

/// D = diag(row sums of A), L = D - A, B = diag(b_i0).
struct GraphMatrices {
  MatrixXd D;
  MatrixXd L;
  MatrixXd B;
};

GraphMatrices build_matrices(const Topology& topology);

/// True iff every follower is reachable from the leader through the
/// augmented edge set {(0,i): b_i0 > 0} u {(j,i): a_ij > 0}.
bool check_leader_rooted(const Topology& topology);

/// £ = nu1 L + nu2 B. Throws SingularCoupling when |det| falls below the
/// scale-aware tolerance 1e-12 * ||£||_inf^N.
MatrixXd coupling_matrix(const Topology& topology, double nu1, double nu2);

/// Solves the graph Lyapunov equation for the given topology. Throws
/// NonPositiveQ when q has a non-positive entry or Q is not positive definite.
GraphLyapunov graph_lyapunov(const Topology& topology, double nu1, double nu2);

/// Active topology id at time t together with the number of switch
/// instants in (t0, t]. Right-continuous in t.
std::pair<int, int> active_index(const SwitchingSchedule& schedule, double t);

/// Second-smallest eigenvalue of the symmetrized Laplacian (L + L^T)/2.
/// Diagnostic only; not a controller input.
double algebraic_connectivity(const Topology& topology);

}  // namespace swarmsync
