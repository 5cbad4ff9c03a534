#include "coldcc/pes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "coldcc/error.hpp"
#include "coldcc/numerics.hpp"
#include "coldcc/units.hpp"

namespace coldcc::pes {

double Taper::operator()(double R) const {
  if (R <= start_bohr) return 1.0;
  if (R >= end_bohr) return 0.0;
  // quintic smoothstep, C2 at both ends
  const double t = (R - start_bohr) / (end_bohr - start_bohr);
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double tang_toennies_damping(int n, double x) {
  if (x < 1.0) {
    // direct tail sum; the closed form cancels catastrophically here
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= x / k;
    double tail = 0.0;
    for (int k = n + 1; k < n + 40; ++k) {
      term *= x / k;
      tail += term;
    }
    return std::exp(-x) * tail;
  }
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= n; ++k) {
    term *= x / k;
    sum += term;
  }
  return 1.0 - std::exp(-x) * sum;
}

ModelSurfaceParameters default_model_parameters() {
  ModelSurfaceParameters p;
  p.components = {
      {0, 2.9842e10, 0.5, 3.47, 3.0e6, 0.25},
      {2, 1.19368e10, 0.75, 3.47, 3.0e5, 0.25},
  };
  return p;
}

InteractionSurface::InteractionSurface(std::vector<SurfaceTerm> terms, double r_reference, Taper taper,
                                       double lambda_scale)
    : terms_(std::move(terms)), r_reference_(r_reference), taper_(taper), lambda_(lambda_scale) {
  for (const auto& t : terms_)
    if (t.legendre < 0 || t.legendre % 2 != 0)
      throw ConfigError(fmt::format("surface term with Legendre order {}: only even orders are allowed", t.legendre));
  if (!(lambda_ >= 0)) throw ConfigError("surface scaling factor must be non-negative");
  if (!(taper_.end_bohr > taper_.start_bohr) || taper_.start_bohr <= 0)
    throw ConfigError("surface taper must satisfy 0 < start < end");
}

InteractionSurface InteractionSurface::model(const ModelSurfaceParameters& params, Taper taper) {
  std::vector<SurfaceTerm> terms;
  const double r0 = params.r_reference_bohr;
  for (const auto& c : params.components) {
    if (c.range_inv_bohr <= 0) throw ConfigError("surface range parameter b must be positive");
    const double A = c.repulsion_K, b = c.range_inv_bohr, C6 = c.dispersion_K;
    const double alpha = c.repulsion_slope, beta = c.dispersion_slope;
    terms.push_back({c.legendre, [A, b](double R) { return A * std::exp(-b * R); },
                     [alpha, r0](double r) { return 1.0 + alpha * (r - r0); }});
    terms.push_back({c.legendre,
                     [C6, b](double R) {
                       const double R3 = R * R * R;
                       return -C6 * tang_toennies_damping(6, b * R) / (R3 * R3);
                     },
                     [beta, r0](double r) { return 1.0 + beta * (r - r0); }});
  }
  return InteractionSurface(std::move(terms), r0, taper);
}

InteractionSurface InteractionSurface::from_file(const std::filesystem::path& path, int legendre_max, Taper taper) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open surface grid file '{}'", path.string()));
  if (legendre_max < 0 || legendre_max % 2 != 0) throw ConfigError("legendre_max must be even and non-negative");

  std::map<double, std::map<double, std::map<double, double>>> grid;  // R -> r -> theta -> V
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double R, r, theta, V;
    if (!(ls >> R)) continue;
    if (!(ls >> r >> theta >> V))
      throw ConfigError(fmt::format("{}:{}: expected four columns R r theta V", path.string(), line_no));
    grid[R][r][theta * std::numbers::pi / 180.0] = V;
  }
  if (grid.size() < 4) throw ConfigError(fmt::format("{}: need at least four R values", path.string()));

  std::vector<double> Rs, rs, thetas;
  for (const auto& [R, sub] : grid) Rs.push_back(R);
  for (const auto& [r, sub] : grid.begin()->second) rs.push_back(r);
  for (const auto& [th, v] : grid.begin()->second.begin()->second) thetas.push_back(th);
  const int n_leg = legendre_max / 2 + 1;
  if (static_cast<int>(thetas.size()) < n_leg)
    throw ConfigError(fmt::format("{}: {} angles cannot determine {} Legendre components", path.string(),
                                  thetas.size(), n_leg));

  Eigen::MatrixXd design(thetas.size(), n_leg);
  for (std::size_t a = 0; a < thetas.size(); ++a)
    for (int l = 0; l < n_leg; ++l) design(a, l) = numerics::legendre(2 * l, std::cos(thetas[a]));
  const auto qr = design.colPivHouseholderQr();

  // coeff[j][l][i]: component l at (R_i, r_j)
  std::vector<std::vector<std::vector<double>>> coeff(rs.size(), std::vector<std::vector<double>>(n_leg));
  for (const auto& [R, by_r] : grid) {
    if (by_r.size() != rs.size()) throw ConfigError(fmt::format("{}: R = {} lacks some r values", path.string(), R));
    std::size_t j = 0;
    for (const auto& [r, by_theta] : by_r) {
      if (r != rs[j] || by_theta.size() != thetas.size())
        throw ConfigError(fmt::format("{}: irregular grid at R = {}, r = {}", path.string(), R, r));
      Eigen::VectorXd values(thetas.size());
      std::size_t a = 0;
      for (const auto& [th, V] : by_theta) {
        if (th != thetas[a]) throw ConfigError(fmt::format("{}: irregular angles at R = {}, r = {}", path.string(), R, r));
        values(a++) = V;
      }
      const Eigen::VectorXd c = qr.solve(values);
      for (int l = 0; l < n_leg; ++l) coeff[j][l].push_back(c(l));
      ++j;
    }
  }

  std::vector<SurfaceTerm> terms;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    auto profile = [rs, j](double r) {
      double p = 1.0;
      for (std::size_t m = 0; m < rs.size(); ++m)
        if (m != j) p *= (r - rs[m]) / (rs[j] - rs[m]);
      return p;
    };
    for (int l = 0; l < n_leg; ++l) {
      auto spline = std::make_shared<numerics::CubicSpline>(Rs, coeff[j][l]);
      const double R_last = Rs.back();
      const double V_last = coeff[j][l].back();
      terms.push_back({2 * l,
                       [spline, R_last, V_last](double R) {
                         if (R <= R_last) return (*spline)(R);
                         const double x = R_last / R;
                         return V_last * x * x * x * x * x * x;
                       },
                       profile});
    }
  }
  // Reference distance: middle of the r grid (only used for rigid evaluation defaults).
  return InteractionSurface(std::move(terms), rs[rs.size() / 2], taper);
}

double InteractionSurface::component(int legendre, double R, double r) const {
  double sum = 0.0;
  for (const auto& t : terms_)
    if (t.legendre == legendre) sum += t.shape(R) * t.profile(r);
  return lambda_ * taper_(R) * sum;
}

double InteractionSurface::evaluate(double R, double r, double theta) const {
  const double x = std::cos(theta);
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.shape(R) * t.profile(r) * numerics::legendre(t.legendre, x);
  return lambda_ * taper_(R) * sum;
}

InteractionSurface InteractionSurface::scaled(double factor) const {
  if (!(factor >= 0)) throw ConfigError("surface scaling factor must be non-negative");
  return InteractionSurface(terms_, r_reference_, taper_, lambda_ * factor);
}

std::vector<int> InteractionSurface::legendre_orders() const {
  std::vector<int> out;
  for (const auto& t : terms_) out.push_back(t.legendre);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double InteractionSurface::well_depth(double R_lo, double R_hi) const {
  const double r = r_reference_;
  auto at_theta = [&](double theta) {
    // coarse scan then Brent refinement in R
    double best_R = R_lo, best_V = evaluate(R_lo, r, theta);
    for (double R = R_lo; R <= R_hi; R += 0.05) {
      const double V = evaluate(R, r, theta);
      if (V < best_V) best_V = V, best_R = R;
    }
    const auto [Rm, Vm] = numerics::minimize([&](double R) { return evaluate(R, r, theta); },
                                             std::max(R_lo, best_R - 0.05), std::min(R_hi, best_R + 0.05));
    return std::min(Vm, best_V);
  };
  double best_theta = 0.0, best = at_theta(0.0);
  for (int k = 1; k <= 90; ++k) {
    const double th = k * std::numbers::pi / 180.0;
    const double V = at_theta(th);
    if (V < best) best = V, best_theta = th;
  }
  const double step = std::numbers::pi / 180.0;
  const auto [th, V] = numerics::minimize(at_theta, std::max(0.0, best_theta - step),
                                          std::min(std::numbers::pi / 2, best_theta + step));
  return std::min(best, V);
}

VibronicCouplingTable::VibronicCouplingTable(const InteractionSurface& surface,
                                             std::vector<molecule::VibRotState> states,
                                             std::vector<Eigen::MatrixXd> profile_matrices)
    : surface_(surface), states_(std::move(states)), profiles_(std::move(profile_matrices)) {
  if (profiles_.size() != surface_.terms().size())
    throw Error("vibronic table: one profile matrix per surface term required");
  for (const auto& p : profiles_)
    if (p.rows() != static_cast<Eigen::Index>(states_.size()) || p.cols() != p.rows())
      throw Error("vibronic table: profile matrix dimension does not match the state list");
}

double VibronicCouplingTable::entry(int v, int N, int vp, int Np, int legendre, double R) const {
  auto index = [&](int vv, int NN) {
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (states_[i].v == vv && states_[i].N == NN) return static_cast<Eigen::Index>(i);
    throw Error(fmt::format("vibronic table has no state v={} N={}", vv, NN));
  };
  const auto i = index(v, N), j = index(vp, Np);
  double sum = 0.0;
  for (std::size_t t = 0; t < profiles_.size(); ++t) {
    const auto& term = surface_.terms()[t];
    if (term.legendre == legendre) sum += term.shape(R) * profiles_[t](i, j);
  }
  return surface_.lambda_scale() * surface_.taper()(R) * sum;
}

namespace {

struct AverageResult {
  std::vector<Eigen::MatrixXd> profiles;
  double max_norm_error = 0.0;
};

AverageResult gauss_hermite_average(const InteractionSurface& surface,
                                    const std::vector<molecule::VibRotState>& states, double r0, double width,
                                    int nodes) {
  const auto rule = numerics::gauss_hermite(nodes);
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<double> r(nodes), w(nodes);
  for (int k = 0; k < nodes; ++k) {
    const double x = rule.nodes[k];
    r[k] = r0 + width * x;
    w[k] = width * rule.scaled_weights[k];
  }
  Eigen::MatrixXd chi(n, nodes);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < nodes; ++k) chi(i, k) = (*states[i].wavefunction)(r[k]);

  AverageResult out;
  for (Eigen::Index i = 0; i < n; ++i) {
    double norm = 0.0;
    for (int k = 0; k < nodes; ++k) norm += w[k] * chi(i, k) * chi(i, k);
    out.max_norm_error = std::max(out.max_norm_error, std::abs(norm - 1.0));
  }
  for (const auto& term : surface.terms()) {
    Eigen::VectorXd pw(nodes);
    for (int k = 0; k < nodes; ++k) pw(k) = w[k] * term.profile(r[k]);
    Eigen::MatrixXd P = chi * pw.asDiagonal() * chi.transpose();
    out.profiles.push_back(0.5 * (P + P.transpose()));
  }
  return out;
}

}  // namespace

VibronicCouplingTable vibrational_average(const InteractionSurface& surface,
                                          const molecule::MolecularStructure& structure,
                                          const molecule::DiatomModel& model, int quadrature_nodes) {
  const auto& states = structure.vib_rot_states();
  const auto n = static_cast<Eigen::Index>(states.size());
  const double r0 = structure.equilibrium_r0();

  if (structure.mode() == molecule::RotorMode::rigid) {
    std::vector<Eigen::MatrixXd> profiles;
    for (const auto& term : surface.terms()) profiles.push_back(Eigen::MatrixXd::Constant(n, n, term.profile(r0)));
    return VibronicCouplingTable(surface, states, std::move(profiles));
  }

  if (quadrature_nodes < 2) throw ConfigError("quadrature node count must be at least 2");
  for (const auto& s : states) {
    if (!s.wavefunction) throw Error("vibrating structure lacks radial wavefunctions");
    const double norm = s.wavefunction->overlap(*s.wavefunction);
    if (std::abs(norm - 1.0) > 1e-10)
      throw NumericalError(fmt::format("radial wavefunction v={} N={} is not normalised (norm {})", s.v, s.N, norm));
  }

  // Harmonic width of the ground vibrational state from the curvature at r0.
  const double dr = 1e-3;
  const double curvature =
      (model.potential(r0 + dr) - 2.0 * model.potential(r0) + model.potential(r0 - dr)) / (dr * dr);
  const double mu = model.reduced_mass_amu * units::kAmuToElectronMass;
  const double omega = std::sqrt(units::to_hartree(curvature) / mu);
  const double width = 1.0 / std::sqrt(mu * omega);

  auto base = gauss_hermite_average(surface, states, r0, width, quadrature_nodes);
  auto fine = gauss_hermite_average(surface, states, r0, width, 2 * quadrature_nodes);
  if (base.max_norm_error > 1e-8)
    throw NumericalError(
        fmt::format("vibrational quadrature does not reproduce wavefunction norms (error {:.3e})", base.max_norm_error));
  double change = 0.0;
  for (std::size_t t = 0; t < base.profiles.size(); ++t) {
    const double scale = std::max(fine.profiles[t].cwiseAbs().maxCoeff(), 1e-300);
    change = std::max(change, (fine.profiles[t] - base.profiles[t]).cwiseAbs().maxCoeff() / scale);
  }
  if (change > 1e-8)
    throw NumericalError(fmt::format(
        "vibrational quadrature not converged: doubling {} nodes changes entries by {:.3e}", quadrature_nodes, change));
  VibronicCouplingTable table(surface, states, std::move(base.profiles));
  table.quadrature_check = change;
  return table;
}

}  // namespace coldcc::pes
