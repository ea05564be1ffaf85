#pragma once

#include <Eigen/Dense>

#include "swarmsync/errors.hpp"

namespace swarmsync {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Shape of a chain-of-integrators state: n derivative orders, each of
/// physical dimension p. Order 1 is position, order 2 velocity, and so on.
struct StateDims {
  int n = 0;
  int p = 0;

  int flat() const { return n * p; }
  bool operator==(const StateDims&) const = default;
};

/// Stacked state of one agent: n blocks of dimension p, stored flat with
/// block k occupying entries [(k-1)*p, k*p).
class AgentState {
public:
  AgentState() = default;

  AgentState(StateDims dims, VectorXd flat) : dims_(dims), x_(std::move(flat)) {
    if (x_.size() != dims_.flat())
      throw DimensionMismatch("AgentState: expected " + std::to_string(dims_.flat()) +
                              " entries, got " + std::to_string(x_.size()));
    if (!x_.allFinite()) throw NonFiniteState("AgentState: non-finite entry");
  }

  static AgentState Zero(StateDims dims) {
    return AgentState(dims, VectorXd::Zero(dims.flat()));
  }

  const StateDims& dims() const { return dims_; }
  const VectorXd& flat() const { return x_; }

  /// Block for derivative order k (1-based: k=1 is position).
  Eigen::VectorBlock<const VectorXd> block(int order) const {
    check_order(order);
    return x_.segment((order - 1) * dims_.p, dims_.p);
  }

  Eigen::VectorBlock<VectorXd> block(int order) {
    check_order(order);
    return x_.segment((order - 1) * dims_.p, dims_.p);
  }

  /// Component access in paper order: entry d of the order-k block (both 1-based).
  double component(int order, int d) const {
    check_order(order);
    if (d < 1 || d > dims_.p) throw DimensionMismatch("AgentState: component index");
    return x_((order - 1) * dims_.p + (d - 1));
  }

private:
  void check_order(int order) const {
    if (order < 1 || order > dims_.n)
      throw DimensionMismatch("AgentState: order " + std::to_string(order) +
                              " outside 1.." + std::to_string(dims_.n));
  }

  StateDims dims_;
  VectorXd x_;
};

}  // namespace swarmsync
