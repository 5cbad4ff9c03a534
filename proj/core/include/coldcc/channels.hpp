#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coldcc/molecule.hpp"
#include "coldcc/pes.hpp"

// Space-fixed coupled-channel basis |v N [J L] jtot> and the coupling matrix
// W(R) of the atom-diatom problem.

namespace coldcc::channels {

enum class Parity { even, odd };

const char* to_string(Parity p);

/// Parity (-1)^(N + L) of a channel.
inline Parity channel_parity(int N, int L) { return (N + L) % 2 == 0 ? Parity::even : Parity::odd; }

struct AngularChannel {
  int v;
  int N;
  int J;
  int L;
  int jtot;
  double threshold_K = 0.0;

  friend bool operator==(const AngularChannel& a, const AngularChannel& b) {
    return a.v == b.v && a.N == b.N && a.J == b.J && a.L == b.L && a.jtot == b.jtot;
  }
};

std::string label(const AngularChannel& c);

struct BasisLimits {
  molecule::LevelLimits levels;
  int L_max = 8;
};

/// Every (v, N, J, L) with N even, |N - 1| <= J <= N + 1, |J - L| <= jtot <= J + L
/// and the requested parity, sorted by (v, N, J, L). Throws if empty.
std::vector<AngularChannel> build_basis(int jtot, Parity parity, const BasisLimits& limits);

/// Angular factor multiplying the Legendre component V_l between two
/// channels of the same jtot, with the electron spin as a spectator.
double recoupling_coefficient(int legendre, int N, int J, int L, int Np, int Jp, int Lp, int jtot);

/// Sum_l f_l(ch, ch') U_{vN, v'N', l}(R) in K.
double potential_matrix_element(const AngularChannel& a, const AngularChannel& b,
                                const pes::VibronicCouplingTable& table, double R);

/// How fine-structure N-mixing enters the channel basis.
enum class Convention {
  nominal,    ///< channels keep nominal N; H_fs couples them inside W(R)
  eigenbasis  ///< channels are molecular eigenstates; W(R) is rotated accordingly
};

const char* to_string(Convention c);

class CouplingMatrix {
 public:
  CouplingMatrix(const molecule::MolecularStructure& structure, const pes::VibronicCouplingTable& table, int jtot,
                 Parity parity, int L_max, double reduced_mass_amu, Convention convention = Convention::nominal);

  int size() const { return static_cast<int>(channels_.size()); }
  int jtot() const { return jtot_; }
  Parity parity() const { return parity_; }
  Convention convention() const { return convention_; }
  double reduced_mass_au() const { return mu_; }

  /// Channels spanning the propagation basis.
  const std::vector<AngularChannel>& channels() const { return channels_; }
  /// Channels labelled by molecular eigenstates, with their thresholds; the
  /// basis in which boundary conditions are applied.
  const std::vector<AngularChannel>& asymptotic_channels() const { return asymptotic_; }
  /// Columns: asymptotic channels expanded in the propagation basis.
  const Eigen::MatrixXd& asymptotic_transform() const { return transform_; }

  /// W(R) in K: potential + thresholds/fine structure + centrifugal.
  Eigen::MatrixXd W(double R) const;
  /// Q = 2 mu (E - W(R)) in bohr^-2, written into a preallocated matrix.
  void fill_Q(double R, double E_K, Eigen::MatrixXd& Q) const;
  /// Internal Hamiltonian part of W in K (R-independent).
  Eigen::MatrixXd internal_hamiltonian() const;

 private:
  int jtot_;
  Parity parity_;
  Convention convention_;
  double mu_;
  pes::InteractionSurface surface_;
  std::vector<AngularChannel> channels_;
  std::vector<AngularChannel> asymptotic_;
  Eigen::MatrixXd transform_;
  std::vector<Eigen::MatrixXd> term_Q_;  // per surface term, 2 mu * lambda * f * P in bohr^-2 / K
  Eigen::MatrixXd internal_Q_;           // 2 mu H0, bohr^-2
  Eigen::VectorXd centrifugal_;          // L (L + 1)
};

struct AdiabatPoint {
  double R;
  Eigen::VectorXd energies_K;
  std::vector<int> dominant;  ///< index into CouplingMatrix::channels()
};

/// Sorted eigenvalues of W(R) for each R; degenerate values ordered by
/// dominant-channel index.
std::vector<AdiabatPoint> adiabatic_curves(const CouplingMatrix& W, const std::vector<double>& R_grid);

}  // namespace coldcc::channels
