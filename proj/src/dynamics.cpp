#include "swarmsync/dynamics.hpp"

#include <cmath>

namespace swarmsync {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Heterogeneous follower models and the leader model, per printed
// coefficients; each acts identically on the two axes (d = 1, 2).
double agent1_axis(double v, double a) {
  return -v * std::sin(v) - std::cos(a) * std::cos(a) - 0.1 * v * v - 0.05 * a * a;
}

double agent2_axis(double v, double a) {
  return -v * v + 0.01 * a - 0.01 * v * v * v - 0.1 * a * a - 0.1 * v;
}

double agent3_axis(double v, double a) {
  return v + std::sin(a) - 0.05 * v * v - 0.05 * a * a;
}

double agent4_axis(double q, double v, double a) {
  const double m = q + v - 1.0;
  return -3.0 * m * m * (q + v + a - 1.0) - v - a + 0.5 * std::sin(kTwoPi * q) +
         std::cos(kTwoPi * q);
}

double agent5_axis1(double q, double v, double a) {
  return -v - 0.05 * a * a + q;
}

double agent5_axis2(double v, double a) { return -v - 0.05 * a * a; }

double leader_axis(double q, double v, double a) {
  const double m = q + v - 1.0;
  return -v - 2.0 * a + 1.0 + 3.0 * std::sin(kTwoPi * q) -
         (1.0 / 3.0) * m * m * (q + 4.0 * v + 3.0 * a - 1.0);
}

void require_32(const StateDims& d, const char* who) {
  if (d.n != 3 || d.p != 2)
    throw DimensionMismatch(std::string(who) + ": builtin models require n=3, p=2");
}

}  // namespace

DynamicsModel DynamicsModel::builtin(ModelKind kind) {
  if (kind == ModelKind::UserDefined)
    throw ValidationError("DynamicsModel::builtin: kind is user-defined");
  DynamicsModel m;
  m.kind_ = kind;
  m.dims_ = StateDims{3, 2};
  m.input_mask_.assign(2, true);
  return m;
}

DynamicsModel DynamicsModel::user_defined(StateDims dims,
                                          const std::vector<std::string>& component_exprs) {
  if (static_cast<int>(component_exprs.size()) != dims.p)
    throw DimensionMismatch("DynamicsModel: need one expression per component");
  DynamicsModel m;
  m.kind_ = ModelKind::UserDefined;
  m.dims_ = dims;
  for (const auto& src : component_exprs) m.exprs_.push_back(parse_expression(src, dims));
  m.sources_ = component_exprs;
  m.input_mask_.assign(dims.p, true);
  return m;
}

void DynamicsModel::set_input_channel(int component, bool enabled) {
  if (component < 1 || component > static_cast<int>(input_mask_.size()))
    throw DimensionMismatch("set_input_channel: component out of range");
  input_mask_[component - 1] = enabled;
}

VectorXd DynamicsModel::drift(const AgentState& x, double t) const {
  if (!(x.dims() == dims_)) throw DimensionMismatch("DynamicsModel::drift: state shape");
  VectorXd out(dims_.p);
  switch (kind_) {
    case ModelKind::UserDefined:
      for (int d = 0; d < dims_.p; ++d) out(d) = exprs_[d]->eval(x, t);
      return out;
    case ModelKind::BuiltinAgent1:
      require_32(dims_, "agent 1");
      for (int d = 1; d <= 2; ++d)
        out(d - 1) = agent1_axis(x.component(2, d), x.component(3, d));
      return out;
    case ModelKind::BuiltinAgent2:
      require_32(dims_, "agent 2");
      for (int d = 1; d <= 2; ++d)
        out(d - 1) = agent2_axis(x.component(2, d), x.component(3, d));
      return out;
    case ModelKind::BuiltinAgent3:
      require_32(dims_, "agent 3");
      for (int d = 1; d <= 2; ++d)
        out(d - 1) = agent3_axis(x.component(2, d), x.component(3, d));
      return out;
    case ModelKind::BuiltinAgent4:
      require_32(dims_, "agent 4");
      for (int d = 1; d <= 2; ++d)
        out(d - 1) = agent4_axis(x.component(1, d), x.component(2, d), x.component(3, d));
      return out;
    case ModelKind::BuiltinAgent5:
      require_32(dims_, "agent 5");
      out(0) = agent5_axis1(x.component(1, 1), x.component(2, 1), x.component(3, 1));
      out(1) = agent5_axis2(x.component(2, 2), x.component(3, 2));
      return out;
    case ModelKind::BuiltinLeader:
      require_32(dims_, "leader");
      for (int d = 1; d <= 2; ++d)
        out(d - 1) = leader_axis(x.component(1, d), x.component(2, d), x.component(3, d));
      return out;
  }
  throw ValidationError("DynamicsModel::drift: unreachable kind");
}

DisturbanceModel DisturbanceModel::zero(int p) {
  DisturbanceModel m;
  m.kind_ = DisturbanceKind::Zero;
  m.p_ = p;
  m.bound_ = 0.0;
  return m;
}

DisturbanceModel DisturbanceModel::sinusoidal_mix(
    std::vector<std::vector<SinusoidTerm>> terms, double bound) {
  if (bound < 0.0) throw ValidationError("DisturbanceModel: negative bound");
  DisturbanceModel m;
  m.kind_ = DisturbanceKind::SinusoidalMix;
  m.p_ = static_cast<int>(terms.size());
  m.terms_ = std::move(terms);
  m.bound_ = bound;
  return m;
}

DisturbanceModel DisturbanceModel::user_defined(int p, const std::vector<std::string>& exprs,
                                                double bound) {
  if (static_cast<int>(exprs.size()) != p)
    throw DimensionMismatch("DisturbanceModel: need one expression per axis");
  DisturbanceModel m;
  m.kind_ = DisturbanceKind::UserDefined;
  m.p_ = p;
  m.bound_ = bound;
  const StateDims time_only{1, 1}; // expressions over t only; x[*][*] rejected by bounds
  for (const auto& src : exprs) m.exprs_.push_back(parse_expression(src, time_only));
  m.sources_ = exprs;
  return m;
}

VectorXd DisturbanceModel::signal(double t) const {
  VectorXd w = VectorXd::Zero(p_);
  switch (kind_) {
    case DisturbanceKind::Zero:
      return w;
    case DisturbanceKind::SinusoidalMix:
      for (int d = 0; d < p_; ++d)
        for (const auto& term : terms_[d])
          w(d) += term.amplitude * std::sin(term.omega * t + term.phase);
      break;
    case DisturbanceKind::UserDefined: {
      const AgentState dummy = AgentState::Zero(StateDims{1, 1});
      for (int d = 0; d < p_; ++d) w(d) = exprs_[d]->eval(dummy, t);
      break;
    }
  }
  if (w.norm() > bound_ * (1.0 + 1e-12) + 1e-300)
    throw BoundViolation("disturbance: ||w(" + std::to_string(t) + ")|| = " +
                         std::to_string(w.norm()) + " exceeds declared bound " +
                         std::to_string(bound_));
  return w;
}

DisturbanceModel default_disturbance(int p) {
  constexpr double kHalfPi = 1.5707963267948966;
  std::vector<std::vector<SinusoidTerm>> terms(
      p, {SinusoidTerm{0.1, 1.0, 0.0}, SinusoidTerm{0.05, 2.0, kHalfPi}});
  return DisturbanceModel::sinusoidal_mix(std::move(terms), 0.15 * std::sqrt(double(p)));
}

VectorXd follower_derivative(const DynamicsModel& model, const AgentState& x,
                             const VectorXd& u, const VectorXd& w) {
  const StateDims d = model.dims();
  if (!(x.dims() == d)) throw DimensionMismatch("follower_derivative: state shape");
  if (u.size() != d.p || w.size() != d.p)
    throw DimensionMismatch("follower_derivative: input dimension");
  VectorXd dx(d.flat());
  dx.head((d.n - 1) * d.p) = x.flat().tail((d.n - 1) * d.p);
  VectorXd top = model.drift(x, 0.0) + w;
  for (int c = 0; c < d.p; ++c)
    if (model.input_mask()[c]) top(c) += u(c);
  dx.tail(d.p) = top;
  return dx;
}

VectorXd leader_derivative(const DynamicsModel& model, const AgentState& x0, double t) {
  const StateDims d = model.dims();
  if (!(x0.dims() == d)) throw DimensionMismatch("leader_derivative: state shape");
  VectorXd dx(d.flat());
  dx.head((d.n - 1) * d.p) = x0.flat().tail((d.n - 1) * d.p);
  dx.tail(d.p) = model.drift(x0, t);
  return dx;
}

}  // namespace swarmsync
