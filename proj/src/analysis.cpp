#include "swarmsync/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace swarmsync {

namespace {

double sv_max(const MatrixXd& M) {
  return Eigen::JacobiSVD<MatrixXd>(M).singularValues().maxCoeff();
}

double sv_min(const MatrixXd& M) {
  return Eigen::JacobiSVD<MatrixXd>(M).singularValues().minCoeff();
}

}  // namespace

MatrixXd kronecker(const MatrixXd& A, const MatrixXd& B) {
  MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

HurwitzDesign hurwitz_from_poles(const VectorXd& poles, double beta) {
  const int m = static_cast<int>(poles.size());
  if (m < 1) throw ValidationError("hurwitz_from_poles: need at least one pole");
  if (beta <= 0.0) throw ValidationError("hurwitz_from_poles: beta must be positive");
  for (int j = 0; j < m; ++j)
    if (!(poles(j) > 0.0))
      throw NonPositivePole("hurwitz_from_poles: pole " + std::to_string(poles(j)));

  // Expand prod_j (s + xi_j); coeffs[k] multiplies s^k.
  VectorXd coeffs = VectorXd::Zero(m + 1);
  coeffs(0) = 1.0;
  int degree = 0;
  for (int j = 0; j < m; ++j) {
    VectorXd next = VectorXd::Zero(m + 1);
    for (int k = 0; k <= degree; ++k) {
      next(k + 1) += coeffs(k);
      next(k) += coeffs(k) * poles(j);
    }
    coeffs = next;
    ++degree;
  }

  HurwitzDesign d;
  d.poles = poles;
  d.beta = beta;
  d.lambda_bar = coeffs.head(m); // lambda_k = coefficient of s^{k-1}
  d.companion = MatrixXd::Zero(m, m);
  for (int k = 0; k + 1 < m; ++k) d.companion(k, k + 1) = 1.0;
  d.companion.row(m - 1) = -d.lambda_bar.transpose();

  // Vectorized Lyapunov solve: (I (x) Delta^T + Delta^T (x) I) vec(P1) = -beta vec(I).
  const MatrixXd I = MatrixXd::Identity(m, m);
  const MatrixXd DT = d.companion.transpose();
  const MatrixXd M = kronecker(I, DT) + kronecker(DT, I);
  const MatrixXd rhs = -beta * I;
  const VectorXd vec_rhs = Eigen::Map<const VectorXd>(rhs.data(), m * m);
  const VectorXd vec_p = M.partialPivLu().solve(vec_rhs);
  d.P1 = Eigen::Map<const MatrixXd>(vec_p.data(), m, m);
  d.P1 = 0.5 * (d.P1 + d.P1.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(d.P1);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("hurwitz_from_poles: P1 not positive definite");
  return d;
}

DecayRate decay_rate(const std::vector<Topology>& topologies, double nu1, double nu2,
                     const VectorXd& lambda_bar) {
  if (topologies.empty()) throw ValidationError("decay_rate: no topologies");
  DecayRate out;
  const double lam_norm = lambda_bar.norm();
  for (const auto& topo : topologies) {
    const GraphMatrices m = build_matrices(topo);
    const GraphLyapunov gl = graph_lyapunov(topo, nu1, nu2);
    const double p_max = sv_max(gl.P);
    const double a_max = sv_max(topo.adjacency);
    const double db_min = sv_min(m.D + m.B);
    const double coupling = (a_max > 0.0) ? p_max * a_max / db_min * lam_norm : 0.0;
    out.per_topology.push_back(0.5 * gl.q_min_eig - coupling);
  }
  out.rho0 = *std::min_element(out.per_topology.begin(), out.per_topology.end());
  out.positive = out.rho0 > 0.0;
  return out;
}

GainExtremes gain_extremes(const NNBank& bank, const MatrixXd& P1) {
  GainExtremes e;
  e.g_min = sv_min(bank.G());
  e.g_max = sv_max(bank.G());
  e.g0_min = sv_min(bank.G0());
  e.g0_max = sv_max(bank.G0());
  e.gw_min = sv_min(bank.Gw());
  e.gw_max = sv_max(bank.Gw());
  e.p1_min = sv_min(P1);
  e.p1_max = sv_max(P1);
  return e;
}

double jump_factor(const std::vector<GraphLyapunov>& lyap_per_topology,
                   const GainExtremes& gains) {
  if (lyap_per_topology.empty()) throw ValidationError("jump_factor: no topologies");
  double zeta_max = 0.0;
  double eta_min = std::numeric_limits<double>::infinity();
  for (const auto& gl : lyap_per_topology) {
    const double p_min = gl.P.diagonal().minCoeff();
    const double p_max = gl.P.diagonal().maxCoeff();
    const double eta[5] = {0.5 * p_min, 0.5 / gains.g_max, 0.5 / gains.g0_max,
                           0.5 / gains.gw_max, 0.5 * gains.p1_min};
    const double zeta[5] = {0.5 * p_max, 0.5 / gains.g_min, 0.5 / gains.g0_min,
                            0.5 / gains.gw_min, 0.5 * gains.p1_max};
    eta_min = std::min(eta_min, *std::min_element(eta, eta + 5));
    zeta_max = std::max(zeta_max, *std::max_element(zeta, zeta + 5));
  }
  return zeta_max / eta_min;
}

double min_dwell_time(double mu, double rho0) {
  if (mu < 1.0) throw ValidationError("min_dwell_time: mu must be >= 1");
  if (!(rho0 > 0.0 && rho0 < 1.0))
    throw InvalidDecayRate("min_dwell_time: rho0 = " + std::to_string(rho0) +
                           " outside (0, 1)");
  return -std::log(mu) / std::log(1.0 - rho0);
}

DwellTimeReport dwell_time_report(const std::vector<Topology>& topologies, double nu1,
                                  double nu2, const VectorXd& lambda_bar,
                                  const GainExtremes& gains) {
  DwellTimeReport rep;
  std::vector<GraphLyapunov> lyaps;
  const double lam_norm = lambda_bar.norm();
  for (size_t s = 0; s < topologies.size(); ++s) {
    const auto& topo = topologies[s];
    const GraphMatrices m = build_matrices(topo);
    const GraphLyapunov gl = graph_lyapunov(topo, nu1, nu2);
    DwellTimeEntry e;
    e.id = static_cast<int>(s);
    e.half_min_eig_Q = 0.5 * gl.q_min_eig;
    const double a_max = sv_max(topo.adjacency);
    e.coupling_term =
        (a_max > 0.0) ? sv_max(gl.P) * a_max / sv_min(m.D + m.B) * lam_norm : 0.0;
    e.rho_sigma = e.half_min_eig_Q - e.coupling_term;
    e.s2 = algebraic_connectivity(topo);
    rep.per_topology.push_back(e);
    lyaps.push_back(gl);
  }
  rep.rho0 = rep.per_topology.front().rho_sigma;
  for (const auto& e : rep.per_topology) rep.rho0 = std::min(rep.rho0, e.rho_sigma);
  rep.mu = jump_factor(lyaps, gains);
  rep.conclusive = rep.rho0 > 0.0 && rep.rho0 < 1.0 && rep.mu >= 1.0;
  rep.tau_star = rep.conclusive ? min_dwell_time(rep.mu, rep.rho0) : 0.0;
  return rep;
}

KMatrixReport k_matrix_report(const KMatrixInputs& in) {
  KMatrixReport r;
  const double pa = in.p_max * in.a_max;
  r.h_term = pa / in.db_min * in.lambda_norm;
  r.gamma1 = -0.5 * in.phi_n * pa;
  r.gamma2 = -0.5 * in.phi_nw * pa;
  r.gamma3 = -0.5 * in.phi_n0 * pa;
  r.mu1 = 0.5 * in.q_min - r.h_term;
  r.mu2 = 0.5 * in.cE0 * in.q_min;
  r.g = -0.5 * (pa / in.db_min * in.delta_fro * in.lambda_norm + in.p1_max);
  r.Lambda = in.p_max * in.coupling_max * in.residual_tm_tn + r.mu2;

  r.K = MatrixXd::Zero(5, 5);
  r.K(0, 0) = 0.5 * in.beta;
  r.K(1, 1) = in.kappa;
  r.K(2, 2) = in.kappaw;
  r.K(3, 3) = in.kappa0;
  r.K(4, 4) = r.mu1;
  r.K(0, 4) = r.K(4, 0) = r.g;
  r.K(1, 4) = r.K(4, 1) = r.gamma1;
  r.K(2, 4) = r.K(4, 2) = r.gamma2;
  r.K(3, 4) = r.K(4, 3) = r.gamma3;

  r.sylvester_ok = true;
  for (int k = 1; k <= 5; ++k) {
    const double minor = r.K.topLeftCorner(k, k).determinant();
    if (minor <= 0.0) {
      r.sylvester_ok = false;
      r.failing_minor = k;
      break;
    }
  }

  r.omega = VectorXd::Zero(5);
  r.omega(1) = in.kappa * in.theta_n;
  r.omega(2) = in.kappaw * in.theta_nw;
  r.omega(3) = in.kappa0 * in.theta_n0;
  r.omega(4) = r.Lambda;
  r.omega_norm1 = r.omega.lpNorm<1>();
  r.k_min_sv = sv_min(r.K);
  r.B_d = (r.k_min_sv > 0.0) ? r.omega_norm1 / r.k_min_sv
                             : std::numeric_limits<double>::infinity();
  return r;
}

CompositeV composite_V(const CompositeSnapshot& snap, const GraphLyapunov& gl,
                       const MatrixXd& P1, const std::vector<NNBank>& banks) {
  const int N = static_cast<int>(banks.size());
  if (gl.P.rows() != N) throw DimensionMismatch("composite_V: P size vs agent count");
  if (snap.r.size() % N != 0) throw DimensionMismatch("composite_V: r size");
  const int p = static_cast<int>(snap.r.size()) / N;
  CompositeV v;
  for (int i = 0; i < N; ++i)
    v.V1 += 0.5 * gl.P(i, i) * snap.r.segment(i * p, p).squaredNorm();
  for (int i = 0; i < N; ++i) {
    const auto& bank = banks[i];
    v.V2 += 0.5 * (snap.theta_err[i].transpose() *
                   bank.G().llt().solve(snap.theta_err[i]))
                      .trace();
    v.V3 += 0.5 * (snap.theta0_err[i].transpose() *
                   bank.G0().llt().solve(snap.theta0_err[i]))
                      .trace();
    v.V4 += 0.5 * (snap.thetaw_err[i].transpose() *
                   bank.Gw().llt().solve(snap.thetaw_err[i]))
                      .trace();
  }
  v.V5 = 0.5 * (snap.E1 * P1 * snap.E1.transpose()).trace();
  return v;
}

VectorXd z_vector(const CompositeSnapshot& snap) {
  double th = 0.0, th0 = 0.0, thw = 0.0;
  for (const auto& m : snap.theta_err) th += m.squaredNorm();
  for (const auto& m : snap.theta0_err) th0 += m.squaredNorm();
  for (const auto& m : snap.thetaw_err) thw += m.squaredNorm();
  VectorXd z(5);
  z << snap.E1.norm(), std::sqrt(th), std::sqrt(thw), std::sqrt(th0), snap.r.norm();
  return z;
}

std::vector<double> iota_weights(const std::vector<Topology>& topologies, double gamma,
                                 double kappa_max) {
  if (gamma <= 0.0) throw ValidationError("iota_weights: gamma must be positive");
  std::vector<double> out;
  for (const auto& topo : topologies)
    out.push_back(1.0 / (1.0 + gamma * (kappa_max - algebraic_connectivity(topo))));
  return out;
}

}  // namespace swarmsync
