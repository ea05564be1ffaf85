#pragma once

#include <vector>

#include "swarmsync/graph.hpp"
#include "swarmsync/nn.hpp"

namespace swarmsync {

/// Hurwitz coefficient design from positive real poles xi_j:
/// s^{n-1} + lambda_{n-1} s^{n-2} + ... + lambda_1 = prod_j (s + xi_j),
/// with the companion matrix Delta and P1 solving
/// Delta^T P1 + P1 Delta = -beta I.
struct HurwitzDesign {
  VectorXd poles;
  VectorXd lambda_bar; // lambda_1 ... lambda_{n-1}
  MatrixXd companion;  // Delta
  MatrixXd P1;
  double beta = 1.0;
};

HurwitzDesign hurwitz_from_poles(const VectorXd& poles, double beta);

/// kron(A, B) for the vectorized Lyapunov solve; exposed for reuse in tests.
MatrixXd kronecker(const MatrixXd& A, const MatrixXd& B);

/// Per-mode decay rate
///   rho_sigma = 1/2 sv_min(Q) - sv_max(P) sv_max(A) / sv_min(D+B) * ||lambda_bar||
/// and the worst case rho0 = min over topologies.
struct DecayRate {
  std::vector<double> per_topology;
  double rho0 = 0.0;
  bool positive = false;
};

DecayRate decay_rate(const std::vector<Topology>& topologies, double nu1, double nu2,
                     const VectorXd& lambda_bar);

/// Singular-value extremes of the adaptation gains and P1, shared across
/// topologies.
struct GainExtremes {
  double g_min = 1.0, g_max = 1.0;
  double g0_min = 1.0, g0_max = 1.0;
  double gw_min = 1.0, gw_max = 1.0;
  double p1_min = 1.0, p1_max = 1.0;
};

GainExtremes gain_extremes(const NNBank& bank, const MatrixXd& P1);

/// mu = max over ordered topology pairs of sv_max(zeta^a) / sv_min(eta^b),
/// with eta/zeta the diagonal sandwich matrices built from halved extremes
/// of P, P1 and inverse-gain extremes of G, G0*, Gw. Always >= 1.
double jump_factor(const std::vector<GraphLyapunov>& lyap_per_topology,
                   const GainExtremes& gains);

/// tau_a^* = -ln(mu) / ln(1 - rho0); requires mu >= 1 and rho0 in (0, 1).
double min_dwell_time(double mu, double rho0);

struct DwellTimeEntry {
  int id = 0;
  double half_min_eig_Q = 0.0;
  double coupling_term = 0.0; // sv_max(P) sv_max(A) / sv_min(D+B) * ||lambda||
  double s2 = 0.0;            // algebraic connectivity (diagnostic)
  double rho_sigma = 0.0;
};

struct DwellTimeReport {
  double rho0 = 0.0;
  double mu = 1.0;
  double tau_star = 0.0;
  bool conclusive = false; // true iff 0 < rho0 < 1 and mu >= 1
  std::vector<DwellTimeEntry> per_topology;
};

DwellTimeReport dwell_time_report(const std::vector<Topology>& topologies, double nu1,
                                  double nu2, const VectorXd& lambda_bar,
                                  const GainExtremes& gains);

/// Inputs for the 5x5 stability matrix K and the ultimate-bound radius B_d.
/// Graph quantities come from the active topology; the Phi/Theta envelope
/// bounds are measured over a simulated trace (Assumption-style constants
/// are existential, so measured envelopes are used instead).
struct KMatrixInputs {
  double beta = 1.0, kappa = 1.0, kappaw = 1.0, kappa0 = 1.0;
  double p_max = 1.0;        // sv_max(P)
  double a_max = 0.0;        // sv_max(A)
  double db_min = 1.0;       // sv_min(D+B)
  double q_min = 2.0;        // sv_min(Q)
  double coupling_max = 1.0; // sv_max(nu1 L + nu2 B)
  double p1_max = 0.0;       // sv_max(P1)
  double delta_fro = 0.0;    // ||Delta||_F
  double lambda_norm = 0.0;  // ||lambda_bar||
  double phi_n = 0.0, phi_nw = 0.0, phi_n0 = 0.0;
  double theta_n = 0.0, theta_nw = 0.0, theta_n0 = 0.0;
  double cE0 = 0.0;           // envelope estimate of the c E_0 coupling
  double residual_tm_tn = 0.0; // user residual bound standing in for T_M + T_N
};

struct KMatrixReport {
  MatrixXd K;           // 5 x 5 symmetric
  bool sylvester_ok = false;
  int failing_minor = 0; // 1-based index of the first non-positive minor, 0 if none
  VectorXd omega;        // length 5
  double omega_norm1 = 0.0;
  double k_min_sv = 0.0;
  double B_d = 0.0;
  double g = 0.0, gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0;
  double mu1 = 0.0, mu2 = 0.0, h_term = 0.0, Lambda = 0.0;
};

KMatrixReport k_matrix_report(const KMatrixInputs& in);

/// Snapshot of everything the composite Lyapunov function needs. Weight
/// error blocks hold theta - theta_hat when true weights are known
/// (synthetic-truth mode) and theta_hat itself in diagnostic mode.
struct CompositeSnapshot {
  VectorXd r;   // N*p
  MatrixXd E1;  // N*p x (n-1)
  std::vector<MatrixXd> theta_err, theta0_err, thetaw_err; // per agent
};

struct CompositeV {
  double V1 = 0, V2 = 0, V3 = 0, V4 = 0, V5 = 0;
  double total() const { return V1 + V2 + V3 + V4 + V5; }
};

CompositeV composite_V(const CompositeSnapshot& snap, const GraphLyapunov& gl,
                       const MatrixXd& P1, const std::vector<NNBank>& banks);

/// Norm vector z = (||E1||_F, ||theta~||_F, ||thetaw~||_F, ||theta0~||_F, ||r||).
VectorXd z_vector(const CompositeSnapshot& snap);

/// Connectivity-quality weights iota^sigma = 1 / (1 + gamma (kappa_max - s2)).
/// Diagnostic only; kappa_max is user-supplied (defaults to the max s2).
std::vector<double> iota_weights(const std::vector<Topology>& topologies, double gamma,
                                 double kappa_max);

}  // namespace swarmsync
