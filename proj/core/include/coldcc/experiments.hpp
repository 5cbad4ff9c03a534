#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coldcc/scatter.hpp"

// Drivers built on the scattering core: energy-resolved rate tables, the
// rigid/vibrating model comparison and interaction-strength (lambda) scans.

namespace coldcc::experiments {

using scatter::LevelRef;
using scatter::StateRef;

/// Everything needed to build one scattering problem.
struct ModelSetup {
  molecule::DiatomModel diatom = molecule::default_oxygen17_model();
  molecule::RotorMode mode = molecule::RotorMode::rigid;
  molecule::LevelLimits levels;
  pes::ModelSurfaceParameters surface = pes::default_model_parameters();
  /// Tabulated surface; replaces `surface` when set.
  std::optional<std::filesystem::path> surface_file;
  int surface_legendre_max = 4;
  pes::Taper taper;
  double lambda = 1.0;
  int quadrature_nodes = 40;
  scatter::ScatteringSettings scattering = default_scattering_settings();

  static scatter::ScatteringSettings default_scattering_settings();
};

/// 3He + 17O2 reduced mass (amu).
double default_collision_mass();

struct Model {
  ModelSetup setup;
  std::shared_ptr<const molecule::MolecularStructure> structure;
  std::shared_ptr<const pes::VibronicCouplingTable> table;
  std::shared_ptr<const scatter::ScatteringProblem> problem;
};

Model build_model(const ModelSetup& setup);

/// Same structure and vibrational averages, interaction scaled to `lambda`
/// (absolute, not relative to the model's current value).
Model with_lambda(const Model& model, double lambda);

/// Same model with a different propagation grid.
Model with_grid(const Model& model, const propagator::PropagationGrid& grid);

/// "rigid" or "vibrating".
std::string model_tag(const ModelSetup& setup);

std::string state_label(const StateRef& s);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// Named energy grids; "fig1" spans 100 uK - 10 K. Throws ConfigError if unknown.
std::vector<double> energy_preset(const std::string& name);

/// Named lambda grids: "23-25", "90-91", "1-100".
std::vector<double> lambda_preset(const std::string& name);

/// Runs `task(i)` for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

struct Convergence {
  double unitarity_defect = 0.0;
  double symmetry_defect = 0.0;
  double jtot_tail = 0.0;
  int jtot_max = 0;
  bool jtot_converged = true;
  /// Largest relative rate change when both propagation steps are halved.
  std::optional<double> step_halving_delta;
};

struct RatePoint {
  double energy_K = 0.0;
  std::vector<double> sigma_cm2;  ///< per exit of the owning table
  double sigma_inelastic_cm2 = 0.0;  ///< every open exit state except the entrance
  Convergence convergence;
};

struct RateTable {
  std::string model;
  double lambda = 1.0;
  int v_max = 0;
  double reduced_mass_amu = 0.0;
  StateRef entrance;
  std::vector<StateRef> exits;  ///< exits[0] is the entrance (elastic)
  std::vector<RatePoint> points;

  double rate(std::size_t point, std::size_t exit) const;
  double inelastic_rate(std::size_t point) const;
  double max_unitarity_defect() const;
};

struct RateOptions {
  StateRef entrance{0, 0, 1, 1};
  /// Exit states besides the elastic one; empty: the other sublevels of the entrance level.
  std::vector<StateRef> exits;
  bool step_halving_check = false;
  int threads = 1;
};

/// Cross sections from an already solved energy point.
RatePoint rate_point(const scatter::EnergySolution& sol, const std::vector<StateRef>& exits);

RateTable compute_rates(const Model& model, std::span<const double> energies_K, const RateOptions& options);

struct TransitionComparison {
  std::string exit;  ///< state label, or "inelastic_total"
  double max_relative = 0.0;
  double median_relative = 0.0;
  double max_relative_off_resonance = 0.0;
  double median_relative_off_resonance = 0.0;
  std::size_t points = 0;
  std::size_t off_resonance_points = 0;
};

struct CompareOptions {
  RateOptions rates;
  bool include_v1 = true;
  /// Off-resonance screening (a labelled heuristic, not physics): an energy
  /// counts as resonant when any rigid or v = 0 vibrating rate has
  /// |d ln K / d ln E| above `resonance_log_slope`, estimated from probes at
  /// E (1 -+ resonance_probe).
  double resonance_log_slope = 4.0;
  double resonance_probe = 0.02;
};

struct ModelComparison {
  RateTable rigid;
  RateTable vibrating;
  std::optional<RateTable> vibrating_v1;
  std::vector<bool> resonant;  ///< per energy point
  std::vector<double> max_log_slope;
  std::vector<TransitionComparison> vibrating_vs_rigid;
  std::vector<TransitionComparison> v1_vs_vibrating;
};

/// Relative differences |b / a - 1| per transition, over all points and over
/// points not flagged in `resonant`.
std::vector<TransitionComparison> compare_tables(const RateTable& a, const RateTable& b,
                                                 const std::vector<bool>& resonant);

/// Runs rigid, vibrating (v = 0) and optionally vibrating with v = 1 channels
/// (N up to levels.N_max_excited) from the same base setup.
ModelComparison compare_models(const ModelSetup& base, std::span<const double> energies_K,
                               const CompareOptions& options);

struct ScanPoint {
  double lambda = 0.0;
  double scattering_length_bohr = 0.0;
  int bound_states = 0;  ///< node count of the entrance s-wave block at the scan energy
  std::vector<double> sigma_cm2;
  double sigma_inelastic_cm2 = 0.0;
  Convergence convergence;
};

/// A >`ratio` jump of some rate between adjacent lambda points; adjacent
/// flagged intervals are merged.
struct Feature {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double max_ratio = 0.0;
};

struct ScanOptions {
  double energy_K = 1e-6;
  StateRef entrance{0, 0, 1, 1};
  std::vector<StateRef> exits;
  /// Reporting heuristic for resonance features.
  double feature_ratio = 10.0;
  int threads = 1;
};

struct ScanResult {
  std::string model;
  int v_max = 0;
  double energy_K = 0.0;
  double reduced_mass_amu = 0.0;
  StateRef entrance;
  std::vector<StateRef> exits;
  std::vector<ScanPoint> points;
  std::vector<Feature> features;

  double rate(std::size_t point, std::size_t exit) const;
  double inelastic_rate(std::size_t point) const;
  double max_unitarity_defect() const;
};

/// Rates versus lambda at one collision energy with total angular momentum
/// fixed to the entrance J (both parities).
ScanResult lambda_scan(const ModelSetup& base, std::span<const double> lambdas, const ScanOptions& options);

std::vector<Feature> detect_features(const std::vector<double>& lambdas, const std::vector<std::vector<double>>& rates,
                                     double ratio);

/// Features of `a` with no feature of `b` within `tolerance` in lambda.
std::vector<Feature> unmatched_features(const std::vector<Feature>& a, const std::vector<Feature>& b, double tolerance);

struct PoleSearchOptions {
  double energy_K = 1e-6;
  LevelRef entrance{0, 0, 1};
  int initial_points = 100;
  /// Intervals are bisected until consistent or narrower than this
  /// (relative to lambda). Poles from closed-channel states can be very
  /// narrow, so the default goes close to double precision.
  double min_width = 1e-13;
  int threads = 1;
};

struct PoleSearch {
  std::vector<double> pole_lambdas;  ///< midpoints of the resolving intervals
  int bound_states_lo = 0;
  int bound_states_hi = 0;
  int unresolved_intervals = 0;
  int evaluations = 0;

  int poles() const { return static_cast<int>(pole_lambdas.size()); }
  int bound_state_change() const { return bound_states_hi - bound_states_lo; }
};

/// Scattering-length poles (a jumping from negative to positive as lambda
/// grows) over [lo, hi], with the independent bound-state count from the
/// node-counting propagation. Intervals whose node count changes by a
/// different amount than the detected poles are bisected.
PoleSearch find_poles(const ModelSetup& base, double lambda_lo, double lambda_hi, const PoleSearchOptions& options);

}  // namespace coldcc::experiments
