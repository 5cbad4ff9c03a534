#include "coldcc/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "coldcc/angmom.hpp"
#include "coldcc/error.hpp"
#include "coldcc/numerics.hpp"
#include "coldcc/units.hpp"

namespace coldcc::scatter {

namespace {

constexpr double kBohr2ToCm2 = units::kBohrToCm * units::kBohrToCm;

bool is_level(const AngularChannel& c, const LevelRef& l) { return c.v == l.v && c.N == l.N && c.J == l.J; }

std::vector<int> level_channels(const ScatteringResult& r, const LevelRef& l) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < r.open_channels.size(); ++i)
    if (is_level(r.open_channels[i], l)) idx.push_back(static_cast<int>(i));
  return idx;
}

std::complex<double> t_element(const ScatteringResult& r, int b, int a) {
  return (a == b ? 1.0 : 0.0) - r.S(b, a);
}

}  // namespace

double ScatteringResult::unitarity_defect() const {
  const auto n = S.rows();
  return (S.adjoint() * S - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double ScatteringResult::symmetry_defect() const { return (S - S.transpose()).cwiseAbs().maxCoeff(); }

double ScatteringResult::K_symmetry_defect() const { return (K - K.transpose()).cwiseAbs().maxCoeff(); }

ScatteringResult match(const Eigen::MatrixXd& Y, const std::vector<AngularChannel>& chans, double R, double E_total_K,
                       double mu) {
  const auto n = static_cast<Eigen::Index>(chans.size());
  if (Y.rows() != n || Y.cols() != n) throw Error("match: log-derivative matrix does not fit the channel list");
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n), Fp = Eigen::VectorXd::Zero(n), G(n), Gp(n);
  std::vector<Eigen::Index> open;
  ScatteringResult out;
  out.E_total_K = E_total_K;
  std::vector<double> ks;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = chans[i];
    const double e = 2.0 * mu * units::to_hartree(E_total_K - c.threshold_K);
    if (e > 0) {
      const double k = std::sqrt(e);
      const double sk = std::sqrt(k);
      const auto f = numerics::riccati_j(c.L, k * R);
      const auto g = numerics::riccati_n(c.L, k * R);
      F(i) = f.value / sk;
      Fp(i) = f.derivative * sk;
      G(i) = g.value / sk;
      Gp(i) = g.derivative * sk;
      open.push_back(i);
      ks.push_back(k);
      out.open_channels.push_back(c);
    } else {
      const double kappa = std::sqrt(-e);
      G(i) = 1.0;
      Gp(i) = kappa * numerics::decaying_log_derivative(c.L, kappa * R);
    }
  }
  if (open.empty()) throw NumericalError(fmt::format("below all thresholds at E = {} K", E_total_K));
  const auto no = static_cast<Eigen::Index>(open.size());

  // (Y G - G') K = F' - Y F over the open columns.
  Eigen::MatrixXd lhs = Y * G.asDiagonal();
  lhs.diagonal() -= Gp;
  Eigen::MatrixXd rhs(n, no);
  for (Eigen::Index j = 0; j < no; ++j) {
    rhs.col(j) = -Y.col(open[j]) * F(open[j]);
    rhs(open[j], j) += Fp(open[j]);
  }
  const Eigen::MatrixXd Kfull = lhs.partialPivLu().solve(rhs);
  out.K.resize(no, no);
  for (Eigen::Index i = 0; i < no; ++i) out.K.row(i) = Kfull.row(open[i]);
  out.k = Eigen::Map<Eigen::VectorXd>(ks.data(), no);

  const Eigen::MatrixXcd iK = std::complex<double>(0.0, 1.0) * out.K.cast<std::complex<double>>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(no, no);
  // S = (I + iK)(I - iK)^-1, solved from the right: S^T = (I - iK)^-T (I + iK)^T.
  out.S = (I - iK).transpose().partialPivLu().solve((I + iK).transpose()).transpose();
  if (!out.S.allFinite()) throw NumericalError("S matrix is not finite");
  return out;
}

ScatteringResult solve_block(const channels::CouplingMatrix& W, const propagator::PropagationGrid& grid,
                             double E_total_K, const propagator::PropagationOptions& options) {
  auto prop = propagator::propagate(W, grid, E_total_K, options);
  const auto& T = W.asymptotic_transform();
  const Eigen::MatrixXd Y = T.transpose() * prop.Y * T;
  auto res = match(0.5 * (Y + Y.transpose()), W.asymptotic_channels(), grid.R_max, E_total_K, W.reduced_mass_au());
  res.jtot = W.jtot();
  res.parity = W.parity();
  res.node_count = prop.node_count;
  return res;
}

double EnergySolution::max_unitarity_defect() const {
  double d = 0.0;
  for (const auto& b : blocks) d = std::max(d, b.unitarity_defect());
  return d;
}

double EnergySolution::max_symmetry_defect() const {
  double d = 0.0;
  for (const auto& b : blocks) d = std::max(d, b.symmetry_defect());
  return d;
}

ScatteringProblem::ScatteringProblem(std::shared_ptr<const molecule::MolecularStructure> structure,
                                     std::shared_ptr<const pes::VibronicCouplingTable> table,
                                     ScatteringSettings settings)
    : structure_(std::move(structure)), table_(std::move(table)), settings_(std::move(settings)) {
  settings_.grid.validate();
  if (!(settings_.reduced_mass_amu > 0)) throw ConfigError("collision reduced mass must be positive");
  if (settings_.L_max < 0) throw ConfigError("L_max must be non-negative");
}

bool ScatteringProblem::block_exists(int jtot, Parity parity) const {
  try {
    channels::build_basis(jtot, parity, channels::BasisLimits{structure_->limits(), settings_.L_max});
    return true;
  } catch (const Error&) {
    return false;
  }
}

const channels::CouplingMatrix& ScatteringProblem::block(int jtot, Parity parity) const {
  std::lock_guard lock(mutex_);
  auto& slot = blocks_[{jtot, parity == Parity::even ? 0 : 1}];
  if (!slot)
    slot = std::make_unique<channels::CouplingMatrix>(*structure_, *table_, jtot, parity, settings_.L_max,
                                                      settings_.reduced_mass_amu, settings_.convention);
  return *slot;
}

double ScatteringProblem::level_energy(const LevelRef& level) const {
  const auto& b = structure_->block(level.J);
  for (Eigen::Index k = 0; k < b.eigenvalues.size(); ++k) {
    const auto& s = structure_->vib_rot_states()[b.states[b.dominant[k]]];
    if (s.v == level.v && s.N == level.N) return b.eigenvalues(k);
  }
  throw Error(fmt::format("no molecular level v={} N={} J={}", level.v, level.N, level.J));
}

ScatteringResult ScatteringProblem::solve_block(int jtot, Parity parity, double E_total_K) const {
  return scatter::solve_block(block(jtot, parity), settings_.grid, E_total_K, settings_.options);
}

EnergySolution ScatteringProblem::solve(double E_collision_K, const StateRef& entrance,
                                        const std::vector<StateRef>& tracked) const {
  if (!(E_collision_K > 0)) throw ConfigError("collision energy must be positive");
  if (std::abs(entrance.M) > entrance.J) throw ConfigError("entrance projection exceeds J");
  EnergySolution sol;
  sol.E_collision_K = E_collision_K;
  sol.entrance = entrance;
  sol.E_total_K = level_energy(entrance.level()) + E_collision_K;

  const auto& sel = settings_.jtot;
  const auto& lim = structure_->limits();
  const int natural_cap = settings_.L_max + lim.N_max + molecule::kElectronSpin;
  const int cap = sel.jtot_max > 0 ? sel.jtot_max : natural_cap;
  std::vector<Parity> parities = {Parity::even, Parity::odd};
  if (settings_.parity) parities = {*settings_.parity};

  std::vector<StateRef> watch = {entrance};
  for (const auto& t : tracked)
    if (std::find(watch.begin(), watch.end(), t) == watch.end()) watch.push_back(t);
  std::vector<double> previous;
  bool have_previous = false;

  for (int jtot = sel.jtot_min; jtot <= cap; ++jtot) {
    bool added = false;
    for (Parity p : parities) {
      if (!block_exists(jtot, p)) continue;
      const auto& W = block(jtot, p);
      const bool has_entrance = std::any_of(W.asymptotic_channels().begin(), W.asymptotic_channels().end(),
                                            [&](const AngularChannel& c) { return is_level(c, entrance.level()); });
      if (!has_entrance) continue;
      sol.blocks.push_back(scatter::solve_block(W, settings_.grid, sol.E_total_K, settings_.options));
      added = true;
    }
    if (!added) continue;
    sol.jtot_max_used = jtot;

    std::vector<double> current;
    for (const auto& s : watch) current.push_back(sigma_M(sol, entrance, s));
    double change = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      const double old = have_previous ? previous[i] : 0.0;
      if (current[i] > 0) change = std::max(change, std::abs(current[i] - old) / current[i]);
    }
    sol.jtot_tail = change;
    previous = std::move(current);
    have_previous = true;
    if (sel.automatic && jtot >= entrance.J + 1 && change < sel.tolerance) break;
  }
  if (sol.blocks.empty()) throw NumericalError("no scattering block contains the entrance level");
  sol.jtot_converged = sol.jtot_tail < sel.tolerance;
  return sol;
}

double sigma_M(const EnergySolution& sol, const StateRef& from, const StateRef& to) {
  using Key = std::tuple<int, int, int, int>;
  std::map<Key, std::complex<double>> amp;
  double k = 0.0;
  bool from_open = false;
  for (const auto& r : sol.blocks) {
    const auto in = level_channels(r, from.level());
    if (in.empty()) continue;
    from_open = true;
    k = r.k(in.front());
    const auto out = level_channels(r, to.level());
    const int jt = r.jtot;
    for (int a : in) {
      const int L = r.open_channels[a].L;
      for (int b : out) {
        const int Lp = r.open_channels[b].L;
        const auto T = t_element(r, b, a);
        for (int ML = -L; ML <= L; ++ML) {
          const int M = from.M + ML;
          if (std::abs(M) > jt) continue;
          const int MLp = M - to.M;
          if (std::abs(MLp) > Lp) continue;
          const double cg = angmom::clebsch(from.J, from.M, L, ML, jt, M) * angmom::clebsch(to.J, to.M, Lp, MLp, jt, M);
          if (cg != 0.0) amp[{L, ML, Lp, MLp}] += cg * T;
        }
      }
    }
  }
  if (!from_open) throw Error("sigma_M: entrance level is closed");
  double sum = 0.0;
  for (const auto& [key, a] : amp) sum += std::norm(a);
  return std::numbers::pi / (k * k) * sum * kBohr2ToCm2;
}

double sigma_level(const EnergySolution& sol, const LevelRef& from, const LevelRef& to) {
  double k = 0.0, sum = 0.0;
  bool from_open = false;
  for (const auto& r : sol.blocks) {
    const auto in = level_channels(r, from);
    if (in.empty()) continue;
    from_open = true;
    k = r.k(in.front());
    const auto out = level_channels(r, to);
    double block_sum = 0.0;
    for (int a : in)
      for (int b : out) block_sum += std::norm(t_element(r, b, a));
    sum += (2.0 * r.jtot + 1.0) * block_sum;
  }
  if (!from_open) throw Error("sigma_level: entrance level is closed");
  return std::numbers::pi / (k * k * (2.0 * from.J + 1.0)) * sum * kBohr2ToCm2;
}

std::vector<LevelRef> open_levels(const EnergySolution& sol) {
  std::set<LevelRef> levels;
  for (const auto& r : sol.blocks)
    for (const auto& c : r.open_channels) levels.insert({c.v, c.N, c.J});
  return {levels.begin(), levels.end()};
}

double detailed_balance_defect(const EnergySolution& sol) {
  const auto levels = open_levels(sol);
  auto wavevector = [&](const LevelRef& l) {
    for (const auto& r : sol.blocks) {
      const auto idx = level_channels(r, l);
      if (!idx.empty()) return r.k(idx.front());
    }
    return 0.0;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t f = i + 1; f < levels.size(); ++f) {
      const double ki = wavevector(levels[i]), kf = wavevector(levels[f]);
      const double lhs = ki * ki * (2.0 * levels[i].J + 1.0) * sigma_level(sol, levels[i], levels[f]);
      const double rhs = kf * kf * (2.0 * levels[f].J + 1.0) * sigma_level(sol, levels[f], levels[i]);
      const double scale = std::max(lhs, rhs);
      if (scale > 0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  return worst;
}

double rate_constant(double sigma_cm2, double E_collision_K, double reduced_mass_amu) {
  const double mu = reduced_mass_amu * units::kAmuToElectronMass;
  const double v = std::sqrt(2.0 * units::to_hartree(E_collision_K) / mu) * units::kAuVelocityToCmPerS;
  return v * sigma_cm2;
}

std::pair<double, int> scattering_length_at(const ScatteringProblem& problem, const LevelRef& entrance,
                                            double E_collision_K, bool count_nodes) {
  const Parity parity = channels::channel_parity(entrance.N, 0);
  const auto& W = problem.block(entrance.J, parity);
  auto options = problem.settings().options;
  options.count_nodes = count_nodes;
  const double E = problem.level_energy(entrance) + E_collision_K;
  const auto r = scatter::solve_block(W, problem.settings().grid, E, options);
  for (std::size_t i = 0; i < r.open_channels.size(); ++i) {
    const auto& c = r.open_channels[i];
    if (is_level(c, entrance) && c.L == 0) {
      const auto ii = static_cast<Eigen::Index>(i);
      return {-r.K(ii, ii) / r.k(ii), r.node_count};
    }
  }
  throw Error("scattering length: entrance s-wave channel is not open");
}

ScatteringLength scattering_length(const ScatteringProblem& problem, const LevelRef& entrance,
                                   const std::vector<double>& energies_K) {
  if (energies_K.size() < 2) throw Error("scattering length extrapolation needs at least two energies");
  ScatteringLength out{};
  std::vector<double> k2;
  const double mu = problem.settings().reduced_mass_amu * units::kAmuToElectronMass;
  for (double E : energies_K) {
    const double k = std::sqrt(2.0 * mu * units::to_hartree(E));
    out.k.push_back(k);
    k2.push_back(k * k);
    out.a_of_k.push_back(scattering_length_at(problem, entrance, E, false).first);
  }
  const auto fit = numerics::linear_fit(k2, out.a_of_k);
  out.a_bohr = fit.intercept;
  out.effective_range_term = fit.slope;
  out.fit_rms = fit.rms_residual;
  if (!std::isfinite(out.a_bohr)) throw NumericalError("scattering length extrapolation did not converge");
  return out;
}

}  // namespace coldcc::scatter
