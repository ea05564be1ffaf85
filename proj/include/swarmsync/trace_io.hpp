#pragma once

#include <string>

#include "swarmsync/sim.hpp"

namespace swarmsync {

/// Fixed column order (documented in the README):
/// t, topology_id, delta1_norm,
/// leader state x0_k{K}_d{D} (K = 1..n outer, D = 1..p inner),
/// per agent I: state aI_x_k{K}_d{D}, control aI_u_d{D},
///             sync errors aI_e_k{K}_d{D}, stability error aI_r_d{D},
/// V1..V5, V, min_pair_sep, min_leader_sep, min_obstacle_dist,
/// per agent I: aI_wn_theta, aI_wn_theta0, aI_wn_thetaw.
void write_trace_csv(const SimTrace& trace, const std::string& path);

SimTrace read_trace_csv(const std::string& path);

/// Switch instants with the composite Lyapunov value on both sides.
void write_switches_csv(const SimTrace& trace, const std::string& path);

/// Gnuplot script reproducing position plots and leader-relative error
/// plots from the trace CSV.
void write_plot_script(const SimTrace& trace, const std::string& trace_csv,
                       const std::string& path);

void write_matrix_csv(const MatrixXd& m, const std::string& path);

}  // namespace swarmsync
