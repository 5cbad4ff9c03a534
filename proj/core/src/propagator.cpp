#include "coldcc/propagator.hpp"

#include <cmath>

#include <fmt/format.h>

#include "coldcc/error.hpp"

namespace coldcc::propagator {

namespace {

int even_steps(double length, double h) {
  int n = static_cast<int>(std::ceil(length / h - 1e-9));
  if (n < 2) n = 2;
  return n + n % 2;
}

int negative_pivots(const Eigen::MatrixXd& M) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  int count = 0;
  for (Eigen::Index i = 0; i < ldlt.vectorD().size(); ++i)
    if (ldlt.vectorD()(i) < 0) ++count;
  return count;
}

class Stepper {
 public:
  Stepper(int n, const QFiller& fill, bool count)
      : fill_(fill), count_(count), I_(Eigen::MatrixXd::Identity(n, n)), A_(n, n), Q_(n, n), U_(n, n) {}

  // One Johnson zone over [a, b]: Simpson weights 1, 4, 2, ..., 4, 1 with the
  // odd-point correction U = (I + h^2 Q / 6)^-1 Q.
  void zone(Eigen::MatrixXd& Y, double a, double b, int steps) {
    const double h = (b - a) / steps;
    fill_(a, Q_);
    Y.noalias() -= (h / 3.0) * Q_;
    for (int i = 1; i <= steps; ++i) {
      A_ = I_ + h * Y;
      if (count_) nodes += negative_pivots(A_);
      lu_.compute(A_);
      const double rcond = lu_.rcond();
      if (!(rcond > 1e-14))
        throw NumericalError(fmt::format("singular log-derivative step at R = {:.4f} bohr (step too large?)", a + (i - 1) * h));
      Y = (I_ - lu_.inverse()) / h;

      const double R = (i == steps) ? b : a + i * h;
      fill_(R, Q_);
      if (i % 2 == 1) {
        A_ = I_ + (h * h / 6.0) * Q_;
        if (count_) nodes -= negative_pivots(A_);
        lu_.compute(A_);
        U_.noalias() = lu_.solve(Q_);
        Y.noalias() -= (4.0 * h / 3.0) * U_;
      } else {
        Y.noalias() -= ((i == steps ? 1.0 : 2.0) * h / 3.0) * Q_;
      }
    }
    Y = 0.5 * (Y + Y.transpose()).eval();
    if (!Y.allFinite()) throw NumericalError("log-derivative propagation produced non-finite values");
  }

  int nodes = 0;

 private:
  const QFiller& fill_;
  bool count_;
  Eigen::MatrixXd I_, A_, Q_, U_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

void PropagationGrid::validate() const {
  if (!(R_start > 0 && R_start < zone_boundary && zone_boundary < R_max))
    throw ConfigError("propagation grid must satisfy 0 < R_start < zone_boundary < R_max");
  if (!(step_inner > 0 && step_outer > 0)) throw ConfigError("propagation steps must be positive");
}

PropagationGrid PropagationGrid::halved() const {
  PropagationGrid g = *this;
  g.step_inner *= 0.5;
  g.step_outer *= 0.5;
  return g;
}

int PropagationGrid::inner_steps() const { return even_steps(zone_boundary - R_start, step_inner); }
int PropagationGrid::outer_steps() const { return even_steps(R_max - zone_boundary, step_outer); }

PropagationResult propagate(int n, const QFiller& fill_Q, const PropagationGrid& grid,
                            const PropagationOptions& options) {
  grid.validate();
  if (!(options.initial_log_derivative > 0)) throw ConfigError("initial log-derivative must be positive");
  PropagationResult result;
  result.Y = Eigen::MatrixXd::Identity(n, n) * options.initial_log_derivative;
  Stepper stepper(n, fill_Q, options.count_nodes);
  stepper.zone(result.Y, grid.R_start, grid.zone_boundary, grid.inner_steps());
  stepper.zone(result.Y, grid.zone_boundary, grid.R_max, grid.outer_steps());
  result.node_count = stepper.nodes;
  return result;
}

PropagationResult propagate(const channels::CouplingMatrix& W, const PropagationGrid& grid, double E_total_K,
                            const PropagationOptions& options) {
  const QFiller fill = [&W, E_total_K](double R, Eigen::MatrixXd& Q) { W.fill_Q(R, E_total_K, Q); };
  return propagate(W.size(), fill, grid, options);
}

}  // namespace coldcc::propagator
