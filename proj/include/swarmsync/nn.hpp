#pragma once

#include <array>

#include "swarmsync/state.hpp"

namespace swarmsync {

enum class BasisKind { State12, Disturbance12, Leader12, UserDefined };

/// Fixed basis for a linear-in-parameters approximator.
struct BasisSpec {
  BasisKind kind = BasisKind::State12;
  int dimension = 12;
};

/// 12-entry state basis (n = 3, p = 2): constant, the six state components
/// in paper order, then the squares of the first five components.
VectorXd eval_state_basis(const AgentState& x);

/// 12-entry time basis: [1, sin t, cos t, sin 2t, cos 2t, sin 3t, cos 3t,
/// sin^2 t, cos^2 t, sin t cos t, e^-t, t e^-t].
VectorXd eval_disturbance_basis(double t);

/// theta_hat^T phi.
VectorXd estimate(const MatrixXd& weights, const VectorXd& basis);

/// Per-agent estimator bank: weights for the agent drift, the local copy of
/// the leader drift, and the disturbance, with their adaptation gains.
class NNBank {
public:
  NNBank() = default;

  /// Gains must be symmetric positive definite (checked via eigenvalues);
  /// kappas positive. Weights start at zero.
  NNBank(int q, int q0, int qw, int p, MatrixXd G, MatrixXd G0, MatrixXd Gw,
         double kappa, double kappa0, double kappaw);

  /// Convenience: scalar gains g * I.
  static NNBank uniform(int q, int q0, int qw, int p, double g, double g0, double gw,
                        double kappa, double kappa0, double kappaw);

  MatrixXd theta_hat;   // q  x p, agent drift estimate
  MatrixXd theta0_hat;  // q0 x p, this agent's copy of the leader estimate
  MatrixXd thetaw_hat;  // qw x p, disturbance estimate

  const MatrixXd& G() const { return G_; }
  const MatrixXd& G0() const { return G0_; }
  const MatrixXd& Gw() const { return Gw_; }
  double kappa() const { return kappa_; }
  double kappa0() const { return kappa0_; }
  double kappaw() const { return kappaw_; }

  void require_finite() const;

private:
  MatrixXd G_, G0_, Gw_;
  double kappa_ = 0.0, kappa0_ = 0.0, kappaw_ = 0.0;
};

struct TuningDerivatives {
  MatrixXd dtheta;
  MatrixXd dtheta0;
  MatrixXd dthetaw;
};

/// Right-hand sides of the three tuning laws. The agent and disturbance
/// laws carry a leading minus, the leader law a leading plus with leakage
/// subtracted inside the bracket:
///   dtheta   = -G  [phi   r^T p_i (d_i + b_i0) + kappa  theta  ]
///   dtheta0  = +G0 [phi0  r^T p_i (d_i + b_i0) - kappa0 theta0 ]
///   dthetaw  = -Gw [phiw  r^T p_i (d_i + b_i0) + kappaw thetaw ]
TuningDerivatives tuning_derivatives(const NNBank& bank, const VectorXd& phi,
                                     const VectorXd& phi0, const VectorXd& phiw,
                                     const VectorXd& r, double p_i, double degree_sum);

}  // namespace swarmsync
