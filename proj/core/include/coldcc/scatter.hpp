#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coldcc/channels.hpp"
#include "coldcc/propagator.hpp"

// Asymptotic matching, S matrices and the observables built from them.

namespace coldcc::scatter {

using channels::AngularChannel;
using channels::Parity;

struct ScatteringResult {
  double E_total_K = 0.0;  ///< relative to the molecular ground level
  int jtot = 0;
  Parity parity = Parity::even;
  std::vector<AngularChannel> open_channels;
  Eigen::VectorXd k;  ///< bohr^-1
  Eigen::MatrixXd K;
  Eigen::MatrixXcd S;
  int node_count = 0;

  double unitarity_defect() const;  ///< max |S^dagger S - I|
  double symmetry_defect() const;   ///< max |S - S^T|
  double K_symmetry_defect() const;
};

/// Matches Y (given in the basis of `channels`, at radius R) to Riccati-Bessel
/// asymptotics. Open channels: F = k^-1/2 x j_L(kR), G = -k^-1/2 x y_L(kR),
/// Psi = F + G K. Closed channels decay exponentially.
ScatteringResult match(const Eigen::MatrixXd& Y, const std::vector<AngularChannel>& channels, double R,
                       double E_total_K, double reduced_mass_au);

/// Propagation + matching for one (jtot, parity) block.
ScatteringResult solve_block(const channels::CouplingMatrix& W, const propagator::PropagationGrid& grid,
                             double E_total_K, const propagator::PropagationOptions& options = {});

/// A molecular level |v N J> and a magnetic sublevel of it.
struct LevelRef {
  int v = 0;
  int N = 0;
  int J = 1;
  friend auto operator<=>(const LevelRef&, const LevelRef&) = default;
};

struct StateRef {
  int v = 0;
  int N = 0;
  int J = 1;
  int M = 1;
  LevelRef level() const { return {v, N, J}; }
  friend auto operator<=>(const StateRef&, const StateRef&) = default;
};

/// Which total angular momenta enter the partial-wave sum.
struct JtotSelection {
  bool automatic = true;
  int jtot_min = 0;
  int jtot_max = 0;        ///< explicit upper bound (automatic: hard cap, 0 = from L_max)
  double tolerance = 1e-3;  ///< automatic: stop once the last jtot changes every tracked cross section by less
};

struct ScatteringSettings {
  propagator::PropagationGrid grid;
  propagator::PropagationOptions options;
  int L_max = 8;
  double reduced_mass_amu = 0.0;
  channels::Convention convention = channels::Convention::nominal;
  JtotSelection jtot;
  /// Restrict to one parity (nullopt: both).
  std::optional<Parity> parity;
};

/// All blocks at one collision energy.
struct EnergySolution {
  double E_collision_K = 0.0;
  double E_total_K = 0.0;
  StateRef entrance;
  std::vector<ScatteringResult> blocks;  ///< ordered by (jtot, parity)
  int jtot_max_used = 0;
  double jtot_tail = 0.0;  ///< relative change of tracked cross sections from the last jtot
  bool jtot_converged = true;

  double max_unitarity_defect() const;
  double max_symmetry_defect() const;
};

/// Coupled-channel problem for one molecular structure and surface; block
/// coupling matrices are built on first use and shared between threads.
class ScatteringProblem {
 public:
  ScatteringProblem(std::shared_ptr<const molecule::MolecularStructure> structure,
                    std::shared_ptr<const pes::VibronicCouplingTable> table, ScatteringSettings settings);

  const molecule::MolecularStructure& structure() const { return *structure_; }
  const ScatteringSettings& settings() const { return settings_; }
  const channels::CouplingMatrix& block(int jtot, Parity parity) const;
  bool block_exists(int jtot, Parity parity) const;

  /// Level energy relative to the ground level.
  double level_energy(const LevelRef& level) const;

  ScatteringResult solve_block(int jtot, Parity parity, double E_total_K) const;

  /// Solves every block needed for cross sections out of `entrance`. `tracked`
  /// lists exit states whose cross sections steer the automatic jtot cut-off.
  EnergySolution solve(double E_collision_K, const StateRef& entrance, const std::vector<StateRef>& tracked) const;

 private:
  std::shared_ptr<const molecule::MolecularStructure> structure_;
  std::shared_ptr<const pes::VibronicCouplingTable> table_;
  ScatteringSettings settings_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<channels::CouplingMatrix>> blocks_;
};

/// M-resolved cross section (cm^2) averaged over collision directions:
/// (pi / k^2) sum_{L M_L L' M_L'} |sum_jtot <J M L M_L|jtot M><J' M' L' M_L'|jtot M> T^jtot|^2, T = 1 - S.
double sigma_M(const EnergySolution& sol, const StateRef& from, const StateRef& to);

/// Degeneracy-averaged level-to-level cross section (cm^2) from the jtot basis.
double sigma_level(const EnergySolution& sol, const LevelRef& from, const LevelRef& to);

/// Open molecular levels at the solution energy.
std::vector<LevelRef> open_levels(const EnergySolution& sol);

/// max over open level pairs of |k_i^2 g_i sigma(i->f) - k_f^2 g_f sigma(f->i)| / (larger side).
double detailed_balance_defect(const EnergySolution& sol);

/// Rate constant v sigma (cm^3/s) at collision energy E.
double rate_constant(double sigma_cm2, double E_collision_K, double reduced_mass_amu);

struct ScatteringLength {
  double a_bohr;          ///< k -> 0 extrapolation
  double effective_range_term;  ///< slope of a(k) against k^2
  double fit_rms;
  std::vector<double> k;
  std::vector<double> a_of_k;
};

/// a = -K_00 / k in the entrance s-wave channel (jtot = J of entrance level,
/// even parity), extrapolated linearly in k^2 over the given collision energies.
ScatteringLength scattering_length(const ScatteringProblem& problem, const LevelRef& entrance,
                                   const std::vector<double>& energies_K = {1e-8, 4e-8, 1.6e-7, 6.4e-7});

/// -K_00 / k at a single energy, with the node count of the propagation.
std::pair<double, int> scattering_length_at(const ScatteringProblem& problem, const LevelRef& entrance,
                                            double E_collision_K, bool count_nodes);

}  // namespace coldcc::scatter
