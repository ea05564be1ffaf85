#include "swarmsync/nn.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace swarmsync {

VectorXd eval_state_basis(const AgentState& x) {
  if (x.dims().n != 3 || x.dims().p != 2)
    throw DimensionMismatch("eval_state_basis: builtin basis requires n=3, p=2");
  VectorXd phi(12);
  phi(0) = 1.0;
  phi.segment(1, 6) = x.flat();
  for (int k = 0; k < 5; ++k) phi(7 + k) = x.flat()(k) * x.flat()(k);
  return phi;
}

VectorXd eval_disturbance_basis(double t) {
  const double s = std::sin(t), c = std::cos(t), e = std::exp(-t);
  VectorXd phi(12);
  phi << 1.0, s, c, std::sin(2.0 * t), std::cos(2.0 * t), std::sin(3.0 * t),
      std::cos(3.0 * t), s * s, c * c, s * c, e, t * e;
  return phi;
}

VectorXd estimate(const MatrixXd& weights, const VectorXd& basis) {
  if (weights.rows() != basis.size())
    throw DimensionMismatch("estimate: weights " + std::to_string(weights.rows()) + "x" +
                            std::to_string(weights.cols()) + " vs basis " +
                            std::to_string(basis.size()));
  return weights.transpose() * basis;
}

namespace {

void require_spd(const MatrixXd& G, const char* name) {
  if (G.rows() != G.cols()) throw DimensionMismatch(std::string(name) + ": gain not square");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + G.cwiseAbs().maxCoeff()))
    throw ValidationError(std::string(name) + ": gain not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError(std::string(name) + ": gain not positive definite");
}

}  // namespace

NNBank::NNBank(int q, int q0, int qw, int p, MatrixXd G, MatrixXd G0, MatrixXd Gw,
               double kappa, double kappa0, double kappaw)
    : theta_hat(MatrixXd::Zero(q, p)),
      theta0_hat(MatrixXd::Zero(q0, p)),
      thetaw_hat(MatrixXd::Zero(qw, p)),
      G_(std::move(G)),
      G0_(std::move(G0)),
      Gw_(std::move(Gw)),
      kappa_(kappa),
      kappa0_(kappa0),
      kappaw_(kappaw) {
  if (G_.rows() != q || G0_.rows() != q0 || Gw_.rows() != qw)
    throw DimensionMismatch("NNBank: gain size vs basis count");
  require_spd(G_, "G");
  require_spd(G0_, "G0");
  require_spd(Gw_, "Gw");
  if (kappa_ <= 0.0 || kappa0_ <= 0.0 || kappaw_ <= 0.0)
    throw ValidationError("NNBank: kappas must be positive");
}

NNBank NNBank::uniform(int q, int q0, int qw, int p, double g, double g0, double gw,
                       double kappa, double kappa0, double kappaw) {
  return NNBank(q, q0, qw, p, g * MatrixXd::Identity(q, q),
                g0 * MatrixXd::Identity(q0, q0), gw * MatrixXd::Identity(qw, qw), kappa,
                kappa0, kappaw);
}

void NNBank::require_finite() const {
  if (!theta_hat.allFinite() || !theta0_hat.allFinite() || !thetaw_hat.allFinite())
    throw NonFiniteState("NNBank: non-finite weight entry");
}

TuningDerivatives tuning_derivatives(const NNBank& bank, const VectorXd& phi,
                                     const VectorXd& phi0, const VectorXd& phiw,
                                     const VectorXd& r, double p_i, double degree_sum) {
  if (phi.size() != bank.theta_hat.rows() || phi0.size() != bank.theta0_hat.rows() ||
      phiw.size() != bank.thetaw_hat.rows() || r.size() != bank.theta_hat.cols())
    throw DimensionMismatch("tuning_derivatives: basis/error sizes");
  if (p_i <= 0.0) throw ValidationError("tuning_derivatives: p_i must be positive");
  if (degree_sum < 0.0) throw ValidationError("tuning_derivatives: negative degree sum");
  const double scale = p_i * degree_sum;
  TuningDerivatives d;
  d.dtheta = -bank.G() * (phi * r.transpose() * scale + bank.kappa() * bank.theta_hat);
  d.dtheta0 = bank.G0() * (phi0 * r.transpose() * scale - bank.kappa0() * bank.theta0_hat);
  d.dthetaw = -bank.Gw() * (phiw * r.transpose() * scale + bank.kappaw() * bank.thetaw_hat);
  return d;
}

}  // namespace swarmsync
