#pragma once

#include <functional>

#include <Eigen/Dense>

#include "coldcc/channels.hpp"

// Johnson's log-derivative propagator with fixed steps in two zones.

namespace coldcc::propagator {

struct PropagationGrid {
  double R_start = 4.1;
  double zone_boundary = 24.0;
  double R_max = 450.0;
  double step_inner = 0.01;
  double step_outer = 0.1;

  void validate() const;
  PropagationGrid halved() const;
  /// Number of steps actually taken in each zone (rounded up to an even count).
  int inner_steps() const;
  int outer_steps() const;
};

struct PropagationOptions {
  /// Diagonal of Y at R_start; a large value imposes a hard wall there.
  double initial_log_derivative = 1e8;
  /// Track the number of eigenvalues of Y passing through -infinity, i.e.
  /// the number of bound states below E for a box closed at R_max.
  bool count_nodes = false;
};

struct PropagationResult {
  Eigen::MatrixXd Y;  ///< log-derivative Psi' Psi^-1 at R_max, bohr^-1
  int node_count = 0;
};

/// Writes Q(R) = 2 mu (E - W(R)) (bohr^-2) into the preallocated matrix.
using QFiller = std::function<void(double R, Eigen::MatrixXd& Q)>;

/// Propagates the regular solution of Psi'' = -Q Psi from R_start to R_max.
/// Throws NumericalError on a singular step.
PropagationResult propagate(int n, const QFiller& fill_Q, const PropagationGrid& grid,
                            const PropagationOptions& options = {});

PropagationResult propagate(const channels::CouplingMatrix& W, const PropagationGrid& grid, double E_total_K,
                            const PropagationOptions& options = {});

}  // namespace coldcc::propagator
