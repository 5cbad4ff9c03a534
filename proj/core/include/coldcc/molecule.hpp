#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coldcc/numerics.hpp"

// The isolated 3-Sigma diatom: O-O potential, rovibrational radial states and
// the spin-spin / spin-rotation fine structure in the Hund's case (b) basis
// |N (S=1) J>. Energies are in kelvin throughout.

namespace coldcc::molecule {

inline constexpr int kElectronSpin = 1;

/// V(r) = De [(1 - exp(-a (r - r0)))^2 - 1]; minimum -De at r0, zero at infinity.
struct MorsePotential {
  double well_depth_K;
  double range_inv_bohr;
  double r0_bohr;
};

/// Cubic-spline interpolated potential; the last tabulated value is taken
/// as the dissociation asymptote.
struct TabulatedPotential {
  std::vector<double> r_bohr;
  std::vector<double> energy_K;
};

class DiatomPotential {
 public:
  explicit DiatomPotential(MorsePotential morse);
  explicit DiatomPotential(TabulatedPotential table);

  double operator()(double r_bohr) const;
  double asymptote_K() const;
  /// Position of the potential minimum (located numerically for tables).
  double minimum_position() const;

  const MorsePotential* morse() const { return std::get_if<MorsePotential>(&form_); }
  const TabulatedPotential* tabulated() const { return std::get_if<TabulatedPotential>(&form_); }

 private:
  std::variant<MorsePotential, TabulatedPotential> form_;
  numerics::CubicSpline spline_;  // tabulated form only
};

struct FineStructureConstants {
  double lambda_ss_K;  ///< spin-spin coupling constant
  double gamma_sr_K;   ///< spin-rotation constant
};

/// Uniform sinc-DVR grid for the stretching coordinate.
struct RadialGrid {
  double r_min_bohr = 1.6;
  double r_max_bohr = 3.4;
  int points = 301;
};

struct DiatomModel {
  double reduced_mass_amu;
  DiatomPotential potential;
  FineStructureConstants fine_structure;
  double equilibrium_r0_bohr;
  RadialGrid grid;

  /// Throws ConfigError on non-physical input (mu <= 0, r0 not at the minimum, ...).
  void validate() const;
  /// Rigid-rotor rotational constant hbar^2 / (2 mu r0^2), in K.
  double rigid_rotational_constant_K() const;
};

/// Morse parameters reproducing a fundamental gap and zero-point energy.
MorsePotential calibrate_morse(double fundamental_gap_K, double zero_point_K, double r0_bohr,
                               double reduced_mass_amu);

/// 17O2 with the calibrated Morse curve and literature fine-structure constants.
DiatomModel default_oxygen17_model();

/// Vibrational wavefunction sampled on a sinc-DVR grid; evaluation between
/// grid points uses band-limited (sinc) interpolation.
class RadialFunction {
 public:
  RadialFunction(double r_min, double step, std::vector<double> samples);

  double operator()(double r_bohr) const;
  std::span<const double> samples() const { return samples_; }
  double r_min() const { return r_min_; }
  double step() const { return step_; }
  /// Interior sign changes, ignoring samples below `relative_floor` of the peak.
  int interior_nodes(double relative_floor = 1e-6) const;
  /// Grid-sum approximation of <this|f|other>.
  double overlap(const RadialFunction& other) const;

 private:
  double r_min_;
  double step_;
  std::vector<double> samples_;  // chi(r_i) * sqrt(step)
};

struct RadialState {
  int v;
  int N;
  double energy_K;  ///< on the potential's absolute scale
  RadialFunction wavefunction;
};

/// Lowest `n_levels` eigenpairs of -1/(2 mu) d^2/dr^2 + V(r) + N(N+1)/(2 mu r^2).
std::vector<RadialState> solve_radial(const DiatomModel& model, int N, int n_levels);

/// Diagonal spin-rotation term gamma [J(J+1) - N(N+1) - S(S+1)] / 2.
double spin_rotation_element(const FineStructureConstants& constants, int N, int J);

/// <N S J| H_ss |N' S J> for the 3-Sigma spin-spin operator (2/3) lambda (3 S_z^2 - S^2).
double spin_spin_element(const FineStructureConstants& constants, int N, int Np, int J);

/// Rotation + fine structure in the |N S J> basis for the listed N (same parity).
Eigen::MatrixXd fine_structure_block(const FineStructureConstants& constants, double rotational_constant_K, int J,
                                     std::span<const int> N_list);

enum class RotorMode { rigid, vibrating };

const char* to_string(RotorMode mode);

/// Which rotational states enter: even N up to N_max for v = 0 and up to
/// N_max_excited for 1 <= v <= v_max.
struct LevelLimits {
  int N_max = 8;
  int v_max = 0;
  int N_max_excited = 6;

  int N_max_for(int v) const { return v == 0 ? N_max : N_max_excited; }
};

/// One eigenstate of the full molecular Hamiltonian at fixed J, labelled by
/// its dominant nominal (v, N) component.
struct RoVibLevel {
  int v;
  int N;
  int J;
  double energy_K;         ///< relative to the ground level (v=0, N=0, J=1)
  double dominant_weight;  ///< |<v N J|level>|^2 of the label component
  std::optional<RadialFunction> radial_wavefunction;  ///< vibrating mode only
};

/// Nominal vibration-rotation state (v, N) in the molecular basis.
struct VibRotState {
  int v;
  int N;
  double energy_K;  ///< rotational-vibrational energy, absolute scale
  std::optional<RadialFunction> wavefunction;
};

/// Molecular Hamiltonian blocks for every J reachable from the retained
/// (v, N) states, with their eigen-decompositions.
class MolecularStructure {
 public:
  struct JBlock {
    int J;
    std::vector<int> states;       ///< indices into vib_rot_states()
    Eigen::MatrixXd hamiltonian;   ///< K, relative to the ground level
    Eigen::VectorXd eigenvalues;   ///< ascending
    Eigen::MatrixXd eigenvectors;  ///< columns; largest component positive
    std::vector<int> dominant;     ///< per eigenvector: position in `states`
  };

  MolecularStructure(RotorMode mode, LevelLimits limits, FineStructureConstants constants,
                     std::vector<VibRotState> states, double equilibrium_r0);

  RotorMode mode() const { return mode_; }
  const LevelLimits& limits() const { return limits_; }
  const FineStructureConstants& fine_structure() const { return constants_; }
  double equilibrium_r0() const { return r0_; }
  const std::vector<VibRotState>& vib_rot_states() const { return states_; }
  /// Index of (v, N) in vib_rot_states(), or -1.
  int state_index(int v, int N) const;
  /// Overlap <chi_{vN}|chi_{v'N'}> (1 for identical rigid-rotor states).
  double overlap(int i, int j) const;
  /// Absolute energy of the ground level; thresholds are measured from it.
  double ground_energy_K() const { return ground_K_; }

  const JBlock& block(int J) const;
  bool has_block(int J) const { return blocks_.count(J) != 0; }
  std::vector<int> J_values() const;

  /// Every eigen-level, ordered by (v, N, J) label.
  std::vector<RoVibLevel> levels() const;

 private:
  RotorMode mode_;
  LevelLimits limits_;
  FineStructureConstants constants_;
  double r0_;
  std::vector<VibRotState> states_;
  Eigen::MatrixXd overlaps_;
  std::map<int, JBlock> blocks_;
  double ground_K_ = 0.0;
};

/// Builds the channel thresholds for the even-N manifold in either mode.
/// Rigid mode requires v_max = 0 and uses E_N = B N(N+1) with B from r0.
MolecularStructure molecular_levels(const DiatomModel& model, LevelLimits limits, RotorMode mode);

}  // namespace coldcc::molecule
