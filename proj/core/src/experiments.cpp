#include "coldcc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "coldcc/error.hpp"
#include "coldcc/units.hpp"

namespace coldcc::experiments {

double default_collision_mass() { return units::reduced_mass(units::kMassHelium3, 2.0 * units::kMassOxygen17); }

scatter::ScatteringSettings ModelSetup::default_scattering_settings() {
  scatter::ScatteringSettings s;
  s.reduced_mass_amu = default_collision_mass();
  return s;
}

Model build_model(const ModelSetup& setup) {
  setup.diatom.validate();
  if (!(setup.lambda >= 0)) throw ConfigError("lambda must be non-negative");
  Model m;
  m.setup = setup;
  auto structure =
      std::make_shared<molecule::MolecularStructure>(molecule::molecular_levels(setup.diatom, setup.levels, setup.mode));
  auto surface = setup.surface_file
                     ? pes::InteractionSurface::from_file(*setup.surface_file, setup.surface_legendre_max, setup.taper)
                     : pes::InteractionSurface::model(setup.surface, setup.taper);
  auto table = std::make_shared<pes::VibronicCouplingTable>(
      pes::vibrational_average(surface.scaled(setup.lambda), *structure, setup.diatom, setup.quadrature_nodes));
  m.structure = structure;
  m.table = table;
  m.problem = std::make_shared<scatter::ScatteringProblem>(structure, table, setup.scattering);
  return m;
}

Model with_lambda(const Model& model, double lambda) {
  if (!(lambda >= 0)) throw ConfigError("lambda must be non-negative");
  Model m = model;
  m.setup.lambda = lambda;
  const auto& t = *model.table;
  const double current = t.surface().lambda_scale();
  // rebuild from the unscaled surface so repeated rescaling does not drift
  const auto base = current > 0 ? t.surface().scaled(1.0 / current) : t.surface();
  std::vector<Eigen::MatrixXd> profiles;
  for (std::size_t i = 0; i < t.term_count(); ++i) profiles.push_back(t.profile_matrix(i));
  auto table = std::make_shared<pes::VibronicCouplingTable>(base.scaled(lambda), t.states(), std::move(profiles));
  table->quadrature_check = t.quadrature_check;
  m.table = table;
  m.problem = std::make_shared<scatter::ScatteringProblem>(model.structure, table, model.setup.scattering);
  return m;
}

Model with_grid(const Model& model, const propagator::PropagationGrid& grid) {
  grid.validate();
  Model m = model;
  m.setup.scattering.grid = grid;
  m.problem = std::make_shared<scatter::ScatteringProblem>(model.structure, model.table, m.setup.scattering);
  return m;
}

std::string model_tag(const ModelSetup& setup) { return molecule::to_string(setup.mode); }

std::string state_label(const StateRef& s) {
  if (s.v == 0) return fmt::format("|{} {} {}>", s.N, s.J, s.M);
  return fmt::format("|v={} {} {} {}>", s.v, s.N, s.J, s.M);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0 && hi >= lo) || n < 1) throw ConfigError("log grid needs 0 < lo <= hi and at least one point");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  g.back() = hi;
  return g;
}

std::vector<double> energy_preset(const std::string& name) {
  if (name == "fig1") return log_grid(1e-4, 10.0, 16);
  if (name == "threshold") return log_grid(1e-6, 1e-4, 5);
  throw ConfigError(fmt::format("unknown energy preset '{}' (known: fig1, threshold)", name));
}

namespace {

std::vector<double> linear(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

std::vector<double> lambda_preset(const std::string& name) {
  if (name == "23-25") return linear(23.0, 25.0, 201);
  if (name == "90-91") return linear(90.0, 91.0, 201);
  if (name == "1-100") return linear(1.0, 100.0, 397);
  throw ConfigError(fmt::format("unknown lambda preset '{}' (known: 23-25, 90-91, 1-100)", name));
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  const auto run = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::vector<StateRef> resolve_exits(const StateRef& entrance, const std::vector<StateRef>& requested) {
  std::vector<StateRef> exits = {entrance};
  if (requested.empty()) {
    for (int M = entrance.J; M >= -entrance.J; --M)
      if (M != entrance.M) exits.push_back({entrance.v, entrance.N, entrance.J, M});
  } else {
    for (const auto& s : requested) {
      if (std::abs(s.M) > s.J) throw ConfigError(fmt::format("exit state {}: |M| exceeds J", state_label(s)));
      if (std::find(exits.begin(), exits.end(), s) == exits.end()) exits.push_back(s);
    }
  }
  return exits;
}

Convergence convergence_of(const scatter::EnergySolution& sol) {
  Convergence c;
  c.unitarity_defect = sol.max_unitarity_defect();
  c.symmetry_defect = sol.max_symmetry_defect();
  c.jtot_tail = sol.jtot_tail;
  c.jtot_max = sol.jtot_max_used;
  c.jtot_converged = sol.jtot_converged;
  return c;
}

double relative_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0 ? std::abs(a - b) / scale : 0.0;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RatePoint rate_point(const scatter::EnergySolution& sol, const std::vector<StateRef>& exits) {
  RatePoint p;
  p.energy_K = sol.E_collision_K;
  const StateRef& in = sol.entrance;
  for (const auto& s : exits) {
    bool open = false;
    for (const auto& l : scatter::open_levels(sol)) open = open || l == s.level();
    p.sigma_cm2.push_back(open ? scatter::sigma_M(sol, in, s) : 0.0);
  }
  for (const auto& l : scatter::open_levels(sol))
    for (int M = -l.J; M <= l.J; ++M) {
      const StateRef s{l.v, l.N, l.J, M};
      if (s != in) p.sigma_inelastic_cm2 += scatter::sigma_M(sol, in, s);
    }
  p.convergence = convergence_of(sol);
  return p;
}

double RateTable::rate(std::size_t point, std::size_t exit) const {
  return scatter::rate_constant(points.at(point).sigma_cm2.at(exit), points[point].energy_K, reduced_mass_amu);
}

double RateTable::inelastic_rate(std::size_t point) const {
  return scatter::rate_constant(points.at(point).sigma_inelastic_cm2, points[point].energy_K, reduced_mass_amu);
}

double RateTable::max_unitarity_defect() const {
  double d = 0.0;
  for (const auto& p : points) d = std::max(d, p.convergence.unitarity_defect);
  return d;
}

RateTable compute_rates(const Model& model, std::span<const double> energies_K, const RateOptions& options) {
  RateTable table;
  table.model = model_tag(model.setup);
  table.lambda = model.setup.lambda;
  table.v_max = model.setup.levels.v_max;
  table.reduced_mass_amu = model.setup.scattering.reduced_mass_amu;
  table.entrance = options.entrance;
  table.exits = resolve_exits(options.entrance, options.exits);
  for (double E : energies_K)
    if (!(E > 0)) throw ConfigError("collision energies must be positive");

  std::optional<Model> fine;
  if (options.step_halving_check) fine = with_grid(model, model.setup.scattering.grid.halved());

  table.points.resize(energies_K.size());
  parallel_for(energies_K.size(), options.threads, [&](std::size_t i) {
    const auto sol = model.problem->solve(energies_K[i], options.entrance, table.exits);
    auto point = rate_point(sol, table.exits);
    if (fine) {
      const auto fsol = fine->problem->solve(energies_K[i], options.entrance, table.exits);
      const auto fp = rate_point(fsol, table.exits);
      double delta = relative_change(point.sigma_inelastic_cm2, fp.sigma_inelastic_cm2);
      for (std::size_t k = 0; k < fp.sigma_cm2.size(); ++k)
        delta = std::max(delta, relative_change(point.sigma_cm2[k], fp.sigma_cm2[k]));
      point.convergence.step_halving_delta = delta;
    }
    table.points[i] = std::move(point);
  });
  return table;
}

std::vector<TransitionComparison> compare_tables(const RateTable& a, const RateTable& b,
                                                 const std::vector<bool>& resonant) {
  if (a.points.size() != b.points.size() || a.exits != b.exits)
    throw Error("compare_tables: tables cover different energies or exits");
  std::vector<TransitionComparison> out;
  const std::size_t n_exit = a.exits.size();
  for (std::size_t k = 0; k <= n_exit; ++k) {
    TransitionComparison c;
    c.exit = k < n_exit ? state_label(a.exits[k]) : "inelastic_total";
    std::vector<double> all, off;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const double x = k < n_exit ? a.points[i].sigma_cm2[k] : a.points[i].sigma_inelastic_cm2;
      const double y = k < n_exit ? b.points[i].sigma_cm2[k] : b.points[i].sigma_inelastic_cm2;
      if (x <= 0 && y <= 0) continue;
      const double d = x > 0 ? std::abs(y / x - 1.0) : INFINITY;
      all.push_back(d);
      if (i >= resonant.size() || !resonant[i]) off.push_back(d);
    }
    c.points = all.size();
    c.off_resonance_points = off.size();
    c.max_relative = all.empty() ? 0.0 : *std::max_element(all.begin(), all.end());
    c.median_relative = median(all);
    c.max_relative_off_resonance = off.empty() ? 0.0 : *std::max_element(off.begin(), off.end());
    c.median_relative_off_resonance = median(off);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Largest |d ln K / d ln E| over all transitions of one model, from probes
// on either side of each energy.
std::vector<double> log_slopes(const Model& model, std::span<const double> energies, const RateOptions& rates,
                               double probe) {
  std::vector<double> lo, hi;
  for (double E : energies) {
    lo.push_back(E * (1.0 - probe));
    hi.push_back(E * (1.0 + probe));
  }
  auto opt = rates;
  opt.step_halving_check = false;
  const auto a = compute_rates(model, lo, opt);
  const auto b = compute_rates(model, hi, opt);
  const double span = std::log((1.0 + probe) / (1.0 - probe));
  std::vector<double> slopes(energies.size(), 0.0);
  for (std::size_t i = 0; i < energies.size(); ++i) {
    auto upd = [&](double x, double y) {
      if (x > 0 && y > 0) slopes[i] = std::max(slopes[i], std::abs(std::log(y / x)) / span);
    };
    for (std::size_t k = 0; k < a.exits.size(); ++k) upd(a.rate(i, k), b.rate(i, k));
    upd(a.inelastic_rate(i), b.inelastic_rate(i));
  }
  return slopes;
}

}  // namespace

ModelComparison compare_models(const ModelSetup& base, std::span<const double> energies_K,
                               const CompareOptions& options) {
  ModelSetup rigid = base;
  rigid.mode = molecule::RotorMode::rigid;
  rigid.levels.v_max = 0;
  ModelSetup vib = base;
  vib.mode = molecule::RotorMode::vibrating;
  vib.levels.v_max = 0;

  std::vector<Model> models = {build_model(rigid), build_model(vib)};
  if (options.include_v1) {
    ModelSetup v1 = vib;
    v1.levels.v_max = 1;
    models.push_back(build_model(v1));
  }

  ModelComparison out;
  out.rigid = compute_rates(models[0], energies_K, options.rates);
  out.vibrating = compute_rates(models[1], energies_K, options.rates);
  if (options.include_v1) out.vibrating_v1 = compute_rates(models[2], energies_K, options.rates);

  // resonance positions barely move with the v = 1 channels; screening the
  // two v = 0 models is enough and saves the costliest probes
  out.max_log_slope.assign(energies_K.size(), 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto s = log_slopes(models[k], energies_K, options.rates, options.resonance_probe);
    for (std::size_t i = 0; i < s.size(); ++i) out.max_log_slope[i] = std::max(out.max_log_slope[i], s[i]);
  }
  for (double s : out.max_log_slope) out.resonant.push_back(s > options.resonance_log_slope);

  out.vibrating_vs_rigid = compare_tables(out.rigid, out.vibrating, out.resonant);
  if (out.vibrating_v1) out.v1_vs_vibrating = compare_tables(out.vibrating, *out.vibrating_v1, out.resonant);
  return out;
}

double ScanResult::rate(std::size_t point, std::size_t exit) const {
  return scatter::rate_constant(points.at(point).sigma_cm2.at(exit), energy_K, reduced_mass_amu);
}

double ScanResult::inelastic_rate(std::size_t point) const {
  return scatter::rate_constant(points.at(point).sigma_inelastic_cm2, energy_K, reduced_mass_amu);
}

double ScanResult::max_unitarity_defect() const {
  double d = 0.0;
  for (const auto& p : points) d = std::max(d, p.convergence.unitarity_defect);
  return d;
}

std::vector<Feature> detect_features(const std::vector<double>& lambdas, const std::vector<std::vector<double>>& rates,
                                     double ratio) {
  std::vector<Feature> out;
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    double worst = 0.0;
    for (const auto& series : rates) {
      const double a = series.at(i), b = series.at(i + 1);
      if (a > 0 && b > 0) worst = std::max(worst, std::max(a / b, b / a));
    }
    if (worst <= ratio) continue;
    if (!out.empty() && out.back().lambda_hi == lambdas[i]) {
      out.back().lambda_hi = lambdas[i + 1];
      out.back().max_ratio = std::max(out.back().max_ratio, worst);
    } else {
      out.push_back({lambdas[i], lambdas[i + 1], worst});
    }
  }
  return out;
}

std::vector<Feature> unmatched_features(const std::vector<Feature>& a, const std::vector<Feature>& b,
                                        double tolerance) {
  std::vector<Feature> out;
  for (const auto& f : a) {
    const bool matched = std::any_of(b.begin(), b.end(), [&](const Feature& g) {
      return g.lambda_lo <= f.lambda_hi + tolerance && g.lambda_hi >= f.lambda_lo - tolerance;
    });
    if (!matched) out.push_back(f);
  }
  return out;
}

namespace {

// Bound-state count from the node count; a positive scattering length beyond
// R_max places the last node outside the box.
int bound_states(const std::pair<double, int>& a_nodes, double R_max) {
  return a_nodes.second + (a_nodes.first > R_max ? 1 : 0);
}

}  // namespace

ScanResult lambda_scan(const ModelSetup& base, std::span<const double> lambdas, const ScanOptions& options) {
  for (double l : lambdas)
    if (!(l >= 0)) throw ConfigError("lambda values must be non-negative");
  ModelSetup setup = base;
  setup.scattering.jtot.automatic = false;
  setup.scattering.jtot.jtot_min = options.entrance.J;
  setup.scattering.jtot.jtot_max = options.entrance.J;
  const Model model = build_model(setup);

  ScanResult out;
  out.model = model_tag(setup);
  out.v_max = setup.levels.v_max;
  out.energy_K = options.energy_K;
  out.reduced_mass_amu = setup.scattering.reduced_mass_amu;
  out.entrance = options.entrance;
  out.exits = resolve_exits(options.entrance, options.exits);
  out.points.resize(lambdas.size());

  parallel_for(lambdas.size(), options.threads, [&](std::size_t i) {
    const Model m = with_lambda(model, lambdas[i]);
    const auto sol = m.problem->solve(options.energy_K, options.entrance, out.exits);
    const auto rp = rate_point(sol, out.exits);
    const auto an = scatter::scattering_length_at(*m.problem, options.entrance.level(), options.energy_K, true);
    ScanPoint p;
    p.lambda = lambdas[i];
    p.sigma_cm2 = rp.sigma_cm2;
    p.sigma_inelastic_cm2 = rp.sigma_inelastic_cm2;
    p.convergence = rp.convergence;
    p.scattering_length_bohr = an.first;
    p.bound_states = bound_states(an, setup.scattering.grid.R_max);
    out.points[i] = std::move(p);
  });

  std::vector<double> ls(lambdas.begin(), lambdas.end());
  std::vector<std::vector<double>> series(out.exits.size() + 1);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    for (std::size_t k = 0; k < out.exits.size(); ++k) series[k].push_back(out.points[i].sigma_cm2[k]);
    series.back().push_back(out.points[i].sigma_inelastic_cm2);
  }
  out.features = detect_features(ls, series, options.feature_ratio);
  return out;
}

PoleSearch find_poles(const ModelSetup& base, double lambda_lo, double lambda_hi, const PoleSearchOptions& options) {
  if (!(lambda_lo >= 0 && lambda_hi > lambda_lo)) throw ConfigError("pole search needs 0 <= lo < hi");
  if (options.initial_points < 2) throw ConfigError("pole search needs at least two initial points");
  const Model model = build_model(base);
  const double R_max = base.scattering.grid.R_max;

  struct Sample {
    double a;
    int n;
  };
  PoleSearch out;
  auto evaluate = [&](double lambda) {
    const Model m = with_lambda(model, lambda);
    const auto an = scatter::scattering_length_at(*m.problem, options.entrance, options.energy_K, true);
    return Sample{an.first, bound_states(an, R_max)};
  };

  std::vector<double> grid(options.initial_points);
  for (int i = 0; i < options.initial_points; ++i)
    grid[i] = lambda_lo + (lambda_hi - lambda_lo) * i / (options.initial_points - 1);
  std::vector<Sample> samples(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) { samples[i] = evaluate(grid[i]); });
  out.evaluations = static_cast<int>(grid.size());

  // Depth-first refinement, serial: the intervals needing it are few.
  std::function<void(double, Sample, double, Sample)> refine = [&](double l0, Sample s0, double l1, Sample s1) {
    const int change = s1.n - s0.n;
    const bool pole = s0.a < 0 && s1.a > 0;
    if (change == (pole ? 1 : 0)) {
      if (pole) out.pole_lambdas.push_back(0.5 * (l0 + l1));
      return;
    }
    const double lm = 0.5 * (l0 + l1);
    if (l1 - l0 < options.min_width * std::max(1.0, std::abs(l1)) || lm <= l0 || lm >= l1) {
      ++out.unresolved_intervals;
      if (pole) out.pole_lambdas.push_back(lm);
      return;
    }
    const Sample sm = evaluate(lm);
    ++out.evaluations;
    refine(l0, s0, lm, sm);
    refine(lm, sm, l1, s1);
  };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) refine(grid[i], samples[i], grid[i + 1], samples[i + 1]);

  out.bound_states_lo = samples.front().n;
  out.bound_states_hi = samples.back().n;
  return out;
}

}  // namespace coldcc::experiments
