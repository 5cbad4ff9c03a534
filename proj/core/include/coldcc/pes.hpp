#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "coldcc/molecule.hpp"

// Atom-diatom interaction V'(R, r, theta) = lambda * s(R) * sum_l V_l(R, r) P_l(cos theta)
// with even Legendre orders only. Each V_l is stored as a short sum of
// separable terms shape(R) * profile(r), which makes the vibrational average
// an R-independent matrix per term.

namespace coldcc::pes {

struct SurfaceTerm {
  int legendre;
  std::function<double(double)> shape;    ///< K, function of R (bohr)
  std::function<double(double)> profile;  ///< dimensionless, function of r (bohr)
};

/// Smooth switch-off of the long-range tail: 1 below `start`, 0 beyond `end`.
struct Taper {
  double start_bohr = 300.0;
  double end_bohr = 400.0;

  double operator()(double R) const;
};

/// A_l (1 + alpha_l (r - r0)) exp(-b_l R) - C6_l (1 + beta_l (r - r0)) f6(b_l R) / R^6,
/// with f6 the Tang-Toennies damping function.
struct ModelComponent {
  int legendre;
  double repulsion_K;       ///< A_l
  double repulsion_slope;   ///< alpha_l (1/bohr)
  double range_inv_bohr;    ///< b_l
  double dispersion_K;      ///< C6_l (K bohr^6)
  double dispersion_slope;  ///< beta_l (1/bohr)
};

struct ModelSurfaceParameters {
  std::vector<ModelComponent> components;
  double r_reference_bohr = 2.282;
};

/// Calibrated He-O2 model surface (40 K well, a = -2.9 bohr for the rigid rotor).
ModelSurfaceParameters default_model_parameters();

double tang_toennies_damping(int n, double x);

class InteractionSurface {
 public:
  InteractionSurface(std::vector<SurfaceTerm> terms, double r_reference, Taper taper, double lambda_scale = 1.0);

  static InteractionSurface model(const ModelSurfaceParameters& params, Taper taper = {});
  /// Grid file: whitespace-separated columns R(bohr) r(bohr) theta(deg) V(K);
  /// '#' starts a comment. Each (R, r) pair must be sampled at the same set of
  /// angles. Components are fitted up to `legendre_max` (even), splined in R,
  /// continued as R^-6 beyond the last R and Lagrange-interpolated in r.
  static InteractionSurface from_file(const std::filesystem::path& path, int legendre_max, Taper taper = {});

  double evaluate(double R, double r, double theta) const;
  /// lambda * s(R) * V_l(R, r).
  double component(int legendre, double R, double r) const;

  InteractionSurface scaled(double factor) const;

  const std::vector<SurfaceTerm>& terms() const { return terms_; }
  std::vector<int> legendre_orders() const;
  double lambda_scale() const { return lambda_; }
  double r_reference() const { return r_reference_; }
  const Taper& taper() const { return taper_; }

  /// Deepest point over R in [R_lo, R_hi] and all angles, at r = r_reference (K, negative).
  double well_depth(double R_lo = 3.0, double R_hi = 20.0) const;

 private:
  std::vector<SurfaceTerm> terms_;
  double r_reference_;
  Taper taper_;
  double lambda_;
};

/// Vibrationally averaged coupling: for each surface term t the matrix
/// P_t(i, j) = <chi_i | profile_t | chi_j> over the molecular (v, N) states,
/// so that U_{ij,l}(R) = lambda s(R) sum_{t: legendre = l} shape_t(R) P_t(i, j).
class VibronicCouplingTable {
 public:
  VibronicCouplingTable(const InteractionSurface& surface, std::vector<molecule::VibRotState> states,
                        std::vector<Eigen::MatrixXd> profile_matrices);

  const InteractionSurface& surface() const { return surface_; }
  const std::vector<molecule::VibRotState>& states() const { return states_; }
  const Eigen::MatrixXd& profile_matrix(std::size_t term) const { return profiles_[term]; }
  std::size_t term_count() const { return profiles_.size(); }

  /// U_{(v N), (v' N'), l}(R) in K.
  double entry(int v, int N, int vp, int Np, int legendre, double R) const;

  /// Largest relative change of any entry when the quadrature is doubled.
  double quadrature_check = 0.0;

 private:
  InteractionSurface surface_;
  std::vector<molecule::VibRotState> states_;
  std::vector<Eigen::MatrixXd> profiles_;
};

/// Gauss-Hermite average over r centred on r_reference with the harmonic
/// width of the diatom. Rigid structures (no wavefunctions) give profile(r0)
/// for every pair. Throws NumericalError if the wavefunctions are not
/// normalised or the doubled rule disagrees beyond 1e-8 relative.
VibronicCouplingTable vibrational_average(const InteractionSurface& surface,
                                          const molecule::MolecularStructure& structure,
                                          const molecule::DiatomModel& model, int quadrature_nodes = 40);

}  // namespace coldcc::pes
