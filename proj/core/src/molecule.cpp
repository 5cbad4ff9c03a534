#include "coldcc/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "coldcc/angmom.hpp"
#include "coldcc/error.hpp"
#include "coldcc/units.hpp"

namespace coldcc::molecule {

namespace {

constexpr int S = kElectronSpin;

// <S || T^2(S) || S> for S = 1, from <1 1| T^2_0 |1 1> = (3 - 2) / sqrt(6).
double spin_quadrupole_reduced() {
  return (1.0 / std::sqrt(6.0)) / angmom::wigner3j(S, 2, S, -S, 0, S);
}

}  // namespace

DiatomPotential::DiatomPotential(MorsePotential morse) : form_(morse) {}

DiatomPotential::DiatomPotential(TabulatedPotential table) : form_(std::move(table)) {
  const auto& t = std::get<TabulatedPotential>(form_);
  if (t.r_bohr.size() < 4 || t.r_bohr.size() != t.energy_K.size())
    throw ConfigError("tabulated diatom potential needs at least 4 matching (r, V) points");
  spline_ = numerics::CubicSpline(t.r_bohr, t.energy_K);
}

double DiatomPotential::operator()(double r) const {
  if (const auto* m = morse()) {
    const double e = 1.0 - std::exp(-m->range_inv_bohr * (r - m->r0_bohr));
    return m->well_depth_K * (e * e - 1.0);
  }
  return spline_(r);
}

double DiatomPotential::asymptote_K() const {
  if (morse()) return 0.0;
  return tabulated()->energy_K.back();
}

double DiatomPotential::minimum_position() const {
  if (const auto* m = morse()) return m->r0_bohr;
  const auto& t = *tabulated();
  const auto it = std::min_element(t.energy_K.begin(), t.energy_K.end());
  const auto i = static_cast<std::size_t>(it - t.energy_K.begin());
  if (i == 0 || i + 1 == t.r_bohr.size())
    throw ConfigError("tabulated diatom potential has its minimum at the table edge");
  const double a = t.r_bohr[i - 1];
  const double b = t.r_bohr[i + 1];
  return numerics::find_root([this](double r) { return spline_.derivative(r); }, a, b);
}

void DiatomModel::validate() const {
  if (!(reduced_mass_amu > 0)) throw ConfigError("diatom reduced mass must be positive");
  if (!(equilibrium_r0_bohr > 0)) throw ConfigError("diatom equilibrium distance must be positive");
  if (!(grid.r_max_bohr > grid.r_min_bohr) || grid.r_min_bohr <= 0 || grid.points < 16)
    throw ConfigError("diatom radial grid must satisfy 0 < r_min < r_max with at least 16 points");
  if (!std::isfinite(fine_structure.lambda_ss_K) || !std::isfinite(fine_structure.gamma_sr_K))
    throw ConfigError("fine-structure constants must be finite");
  if (const auto* m = potential.morse()) {
    if (!(m->well_depth_K > 0) || !(m->range_inv_bohr > 0))
      throw ConfigError("Morse well depth and range parameter must be positive");
  }
  const double rmin = potential.minimum_position();
  if (std::abs(rmin - equilibrium_r0_bohr) > 1e-8)
    throw ConfigError(fmt::format("equilibrium distance {} bohr is not the potential minimum ({} bohr)",
                                  equilibrium_r0_bohr, rmin));
  if (rmin <= grid.r_min_bohr || rmin >= grid.r_max_bohr)
    throw ConfigError("potential minimum lies outside the radial grid");
}

double DiatomModel::rigid_rotational_constant_K() const {
  const double mu = reduced_mass_amu * units::kAmuToElectronMass;
  return units::to_kelvin(1.0 / (2.0 * mu * equilibrium_r0_bohr * equilibrium_r0_bohr));
}

MorsePotential calibrate_morse(double gap_K, double zpe_K, double r0, double mu_amu) {
  // E_v = w (v + 1/2) - x (v + 1/2)^2 with x = w^2 / (4 De):
  //   gap = w - 2x,  zpe = w/2 - x/4.
  const double x = (zpe_K - 0.5 * gap_K) * 4.0 / 3.0;
  if (!(x > 0)) throw ConfigError("Morse calibration needs zero-point energy above half the fundamental gap");
  const double omega = gap_K + 2.0 * x;
  const double De = omega * omega / (4.0 * x);
  const double mu = mu_amu * units::kAmuToElectronMass;
  const double a = units::to_hartree(omega) / std::sqrt(2.0 * units::to_hartree(De) / mu);
  return {De, a, r0};
}

DiatomModel default_oxygen17_model() {
  const double mu = units::kMassOxygen17 / 2.0;
  const double r0 = 2.282;
  // Spin-spin and spin-rotation constants of ground-state O2 (microwave
  // spectroscopy): lambda = 59501.3 MHz, gamma = -252.59 MHz scaled by the
  // 16/17 mass ratio for the heavier isotopologue.
  const FineStructureConstants fs{59501.3 * units::kMHzToKelvin, -252.59 * (16.0 / 17.0) * units::kMHzToKelvin};
  return DiatomModel{mu, DiatomPotential(calibrate_morse(2175.0, 1100.0, r0, mu)), fs, r0, RadialGrid{}};
}

RadialFunction::RadialFunction(double r_min, double step, std::vector<double> samples)
    : r_min_(r_min), step_(step), samples_(std::move(samples)) {}

double RadialFunction::operator()(double r) const {
  const double x = (r - r_min_) / step_;
  const double sin_pix = std::sin(std::numbers::pi * x);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double d = x - static_cast<double>(i);
    if (std::abs(d) < 1e-12) return samples_[i] / std::sqrt(step_);
    // sin(pi (x - i)) = (-1)^i sin(pi x)
    const double s = (i % 2 == 0 ? sin_pix : -sin_pix) / (std::numbers::pi * d);
    sum += samples_[i] * s;
  }
  return sum / std::sqrt(step_);
}

int RadialFunction::interior_nodes(double relative_floor) const {
  double peak = 0.0;
  for (double s : samples_) peak = std::max(peak, std::abs(s));
  int nodes = 0;
  int last_sign = 0;
  for (double s : samples_) {
    if (std::abs(s) < relative_floor * peak) continue;
    const int sign = s > 0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++nodes;
    last_sign = sign;
  }
  return nodes;
}

double RadialFunction::overlap(const RadialFunction& other) const {
  if (other.samples_.size() != samples_.size() || other.step_ != step_ || other.r_min_ != r_min_)
    throw Error("radial functions live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) sum += samples_[i] * other.samples_[i];
  return sum;
}

std::vector<RadialState> solve_radial(const DiatomModel& model, int N, int n_levels) {
  if (n_levels < 1) throw Error("solve_radial: n_levels must be at least 1");
  const auto& g = model.grid;
  const int n = g.points;
  if (n_levels > n) throw NumericalError("insufficient bound states: more levels requested than grid points");
  const double h = (g.r_max_bohr - g.r_min_bohr) / (n - 1);
  const double mu = model.reduced_mass_amu * units::kAmuToElectronMass;

  // Sinc-DVR kinetic energy on a uniform grid.
  Eigen::MatrixXd H(n, n);
  const double t0 = 1.0 / (2.0 * mu * h * h);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double d = i - j;
      const double t = t0 * ((i - j) % 2 == 0 ? 2.0 : -2.0) / (d * d);
      H(i, j) = t;
      H(j, i) = t;
    }
    const double r = g.r_min_bohr + i * h;
    H(i, i) = t0 * std::numbers::pi * std::numbers::pi / 3.0 + units::to_hartree(model.potential(r)) +
              N * (N + 1.0) / (2.0 * mu * r * r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) throw NumericalError("radial eigensolver failed");

  const double asymptote = model.potential.asymptote_K();
  std::vector<RadialState> states;
  for (int v = 0; v < n_levels; ++v) {
    const double E = units::to_kelvin(solver.eigenvalues()(v));
    if (!(E < asymptote))
      throw NumericalError(fmt::format("insufficient bound states: N={} supports fewer than {} levels", N, n_levels));
    std::vector<double> samples(solver.eigenvectors().col(v).data(), solver.eigenvectors().col(v).data() + n);
    double peak = 0.0;
    for (double s : samples) peak = std::max(peak, std::abs(s));
    // Sign convention: the first significant lobe (inner turning point side) is positive.
    const auto first = std::find_if(samples.begin(), samples.end(), [&](double s) { return std::abs(s) > 1e-3 * peak; });
    if (*first < 0)
      for (double& s : samples) s = -s;
    states.push_back({v, N, E, RadialFunction(g.r_min_bohr, h, std::move(samples))});
  }
  return states;
}

double spin_rotation_element(const FineStructureConstants& c, int N, int J) {
  return 0.5 * c.gamma_sr_K * (J * (J + 1.0) - N * (N + 1.0) - S * (S + 1.0));
}

double spin_spin_element(const FineStructureConstants& c, int N, int Np, int J) {
  const double sixj = angmom::wigner6j(J, S, Np, 2, N, S);
  if (sixj == 0.0) return 0.0;
  const double phase = ((Np + S + J) % 2 == 0) ? 1.0 : -1.0;
  return (2.0 / 3.0) * c.lambda_ss_K * std::sqrt(6.0) * phase * sixj *
         angmom::reduced_spherical_harmonic(N, 2, Np) * spin_quadrupole_reduced();
}

Eigen::MatrixXd fine_structure_block(const FineStructureConstants& c, double B, int J, std::span<const int> N_list) {
  const auto n = static_cast<Eigen::Index>(N_list.size());
  for (int N : N_list) {
    if (N < 0 || std::abs(N - J) > S || J > N + S)
      throw Error(fmt::format("fine_structure_block: N={} cannot couple with S=1 to J={}", N, J));
    if ((N - N_list.front()) % 2 != 0) throw Error("fine_structure_block: N list mixes parities");
  }
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int N = N_list[i];
    for (Eigen::Index j = 0; j < n; ++j) H(i, j) = spin_spin_element(c, N, N_list[j], J);
    H(i, i) += B * N * (N + 1.0) + spin_rotation_element(c, N, J);
  }
  return 0.5 * (H + H.transpose());
}

const char* to_string(RotorMode mode) { return mode == RotorMode::rigid ? "rigid" : "vibrating"; }

MolecularStructure::MolecularStructure(RotorMode mode, LevelLimits limits, FineStructureConstants constants,
                                       std::vector<VibRotState> states, double r0)
    : mode_(mode), limits_(limits), constants_(constants), r0_(r0), states_(std::move(states)) {
  const auto n = static_cast<Eigen::Index>(states_.size());
  overlaps_ = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && states_[i].wavefunction && states_[j].wavefunction)
        overlaps_(i, j) = states_[i].wavefunction->overlap(*states_[j].wavefunction);
      else if (i != j)
        overlaps_(i, j) = states_[i].v == states_[j].v ? 1.0 : 0.0;

  int J_max = 0;
  for (const auto& s : states_) J_max = std::max(J_max, s.N + S);
  for (int J = 0; J <= J_max; ++J) {
    JBlock b;
    b.J = J;
    for (int i = 0; i < static_cast<int>(states_.size()); ++i)
      if (angmom::triangle(states_[i].N, S, J)) b.states.push_back(i);
    if (b.states.empty()) continue;
    const auto m = static_cast<Eigen::Index>(b.states.size());
    b.hamiltonian.resize(m, m);
    for (Eigen::Index p = 0; p < m; ++p) {
      const auto& a = states_[b.states[p]];
      for (Eigen::Index q = 0; q < m; ++q) {
        const auto& c = states_[b.states[q]];
        b.hamiltonian(p, q) = spin_spin_element(constants_, a.N, c.N, J) * overlaps_(b.states[p], b.states[q]);
      }
      b.hamiltonian(p, p) += a.energy_K + spin_rotation_element(constants_, a.N, J);
    }
    b.hamiltonian = 0.5 * (b.hamiltonian + b.hamiltonian.transpose()).eval();
    blocks_.emplace(J, std::move(b));
  }

  // Energy zero: the lowest J = 1 level (v = 0, N = 0 dominated).
  if (!blocks_.count(1)) throw Error("molecular basis has no J = 1 level");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks_.at(1).hamiltonian, Eigen::EigenvaluesOnly);
    ground_K_ = es.eigenvalues()(0);
  }
  for (auto& [J, b] : blocks_) {
    b.hamiltonian.diagonal().array() -= ground_K_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.hamiltonian);
    if (es.info() != Eigen::Success) throw NumericalError("molecular eigensolver failed");
    b.eigenvalues = es.eigenvalues();
    b.eigenvectors = es.eigenvectors();
    b.dominant.resize(b.states.size());
    for (Eigen::Index k = 0; k < b.eigenvectors.cols(); ++k) {
      Eigen::Index imax = 0;
      b.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
      if (b.eigenvectors(imax, k) < 0) b.eigenvectors.col(k) *= -1.0;
      b.dominant[k] = static_cast<int>(imax);
    }
  }
}

int MolecularStructure::state_index(int v, int N) const {
  for (int i = 0; i < static_cast<int>(states_.size()); ++i)
    if (states_[i].v == v && states_[i].N == N) return i;
  return -1;
}

double MolecularStructure::overlap(int i, int j) const { return overlaps_(i, j); }

const MolecularStructure::JBlock& MolecularStructure::block(int J) const {
  const auto it = blocks_.find(J);
  if (it == blocks_.end()) throw Error(fmt::format("no molecular levels with J={}", J));
  return it->second;
}

std::vector<int> MolecularStructure::J_values() const {
  std::vector<int> out;
  for (const auto& [J, b] : blocks_) out.push_back(J);
  return out;
}

std::vector<RoVibLevel> MolecularStructure::levels() const {
  std::vector<RoVibLevel> out;
  for (const auto& [J, b] : blocks_) {
    for (Eigen::Index k = 0; k < b.eigenvalues.size(); ++k) {
      const auto& s = states_[b.states[b.dominant[k]]];
      const double w = b.eigenvectors(b.dominant[k], k);
      out.push_back({s.v, s.N, J, b.eigenvalues(k), w * w, s.wavefunction});
    }
  }
  std::sort(out.begin(), out.end(), [](const RoVibLevel& a, const RoVibLevel& b) {
    return std::tie(a.v, a.N, a.J, a.energy_K) < std::tie(b.v, b.N, b.J, b.energy_K);
  });
  return out;
}

MolecularStructure molecular_levels(const DiatomModel& model, LevelLimits limits, RotorMode mode) {
  model.validate();
  if (limits.N_max < 0 || limits.N_max % 2 != 0) throw ConfigError("N_max must be a non-negative even integer");
  if (limits.v_max < 0) throw ConfigError("v_max must be non-negative");
  if (limits.v_max > 0 && (limits.N_max_excited < 0 || limits.N_max_excited % 2 != 0))
    throw ConfigError("N_max for excited vibrational levels must be a non-negative even integer");
  if (limits.v_max > 0 && limits.N_max_excited > limits.N_max)
    throw ConfigError("N_max for excited vibrational levels cannot exceed N_max");
  if (mode == RotorMode::rigid && limits.v_max != 0) throw ConfigError("rigid-rotor mode requires v_max = 0");

  std::vector<VibRotState> states;
  if (mode == RotorMode::rigid) {
    const double B = model.rigid_rotational_constant_K();
    for (int N = 0; N <= limits.N_max; N += 2) states.push_back({0, N, B * N * (N + 1.0), std::nullopt});
  } else {
    int N_top = 0;
    for (int v = 0; v <= limits.v_max; ++v) N_top = std::max(N_top, limits.N_max_for(v));
    for (int N = 0; N <= N_top; N += 2) {
      int n_v = 0;
      while (n_v <= limits.v_max && N <= limits.N_max_for(n_v)) ++n_v;
      if (n_v == 0) continue;
      for (auto& r : solve_radial(model, N, n_v)) states.push_back({r.v, r.N, r.energy_K, std::move(r.wavefunction)});
    }
    std::sort(states.begin(), states.end(),
              [](const VibRotState& a, const VibRotState& b) { return std::tie(a.v, a.N) < std::tie(b.v, b.N); });
  }
  return MolecularStructure(mode, limits, model.fine_structure, std::move(states), model.equilibrium_r0_bohr);
}

}  // namespace coldcc::molecule
