// End-to-end acceptance run: one PASS/FAIL line per criterion.
// Usage: coldcc_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "angular_oracle.hpp"
#include "coldcc/angmom.hpp"
#include "coldcc/channels.hpp"
#include "coldcc/commands.hpp"
#include "coldcc/experiments.hpp"
#include "coldcc/units.hpp"
#include "numerov_oracle.hpp"
#include "racah_oracle.hpp"

using namespace coldcc;
using experiments::ModelSetup;
using scatter::StateRef;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0 ? std::abs(a - b) / s : 0.0;
}

ModelSetup setup_for(molecule::RotorMode mode, int v_max = 0) {
  ModelSetup s;
  s.mode = mode;
  s.levels.v_max = v_max;
  return s;
}

const molecule::RotorMode kModes[] = {molecule::RotorMode::rigid, molecule::RotorMode::vibrating};

// ---------------------------------------------------------------------------

Outcome spectroscopy() {
  const auto model = molecule::default_oxygen17_model();
  const double B = model.rigid_rotational_constant_K();
  const auto s = molecule::solve_radial(model, 0, 2);
  const double gap = s[1].energy_K - s[0].energy_K;
  const double zpe = s[0].energy_K - model.potential(model.equilibrium_r0_bohr);
  const bool ok = rel(B, 1.95) <= 0.02 && rel(gap, 2175.0) <= 0.01 && rel(zpe, 1100.0) <= 0.02;
  return {ok, fmt::format("B = {:.5f} K, v=0->1 gap = {:.3f} K, ZPE = {:.3f} K", B, gap, zpe)};
}

Outcome scattering_length() {
  const auto rigid = experiments::build_model(setup_for(molecule::RotorMode::rigid));
  const auto vib = experiments::build_model(setup_for(molecule::RotorMode::vibrating));
  const auto a = scatter::scattering_length(*rigid.problem, {0, 0, 1});
  const auto av = scatter::scattering_length(*vib.problem, {0, 0, 1});
  return {std::abs(a.a_bohr + 2.9) <= 0.1,
          fmt::format("rigid a = {:.4f} bohr (vibrating {:.4f}), fit rms {:.1e}", a.a_bohr, av.a_bohr, a.fit_rms)};
}

Outcome angular_oracles() {
  double worst3 = 0.0, worst6 = 0.0;
  std::size_t n3 = 0, n6 = 0;
  const int J = 8;
  for (int a = 0; a <= J; ++a)
    for (int b = 0; b <= J; ++b)
      for (int c = 0; c <= J; ++c) {
        if (!oracle::triangle(a, b, c)) continue;
        for (int ma = -a; ma <= a; ++ma)
          for (int mb = -b; mb <= b; ++mb) {
            const int mc = -ma - mb;
            if (std::abs(mc) > c) continue;
            worst3 = std::max(worst3, std::abs(angmom::wigner3j(a, b, c, ma, mb, mc) - oracle::wigner3j(a, b, c, ma, mb, mc)));
            ++n3;
          }
        for (int d = 0; d <= J; ++d)
          for (int e = 0; e <= J; ++e) {
            if (!oracle::triangle(d, e, c)) continue;
            for (int f = 0; f <= J; ++f) {
              if (!oracle::triangle(a, e, f) || !oracle::triangle(d, b, f)) continue;
              worst6 = std::max(worst6, std::abs(angmom::wigner6j(a, b, c, d, e, f) - oracle::wigner6j(a, b, c, d, e, f)));
              ++n6;
            }
          }
      }

  double worst_rc = 0.0;
  std::size_t n_rc = 0;
  const int jtot = 1;
  // L <= 6 here, so degree 20 in cos(theta) and |m| <= 20 at l = 8
  const oracle::AngularQuadrature quad(12, 24);
  channels::BasisLimits lim;
  lim.levels.N_max = 4;
  lim.L_max = 8;
  for (auto p : {channels::Parity::even, channels::Parity::odd}) {
    const auto basis = channels::build_basis(jtot, p, lim);
    std::vector<oracle::AngularQuadrature::Samples> samples;
    for (const auto& c : basis) samples.push_back(quad.sample({c.N, c.J, c.L}, jtot));
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (int l = 0; l <= 8; l += 2) {
          const auto &x = basis[i], &y = basis[k];
          const double lib = channels::recoupling_coefficient(l, x.N, x.J, x.L, y.N, y.J, y.L, jtot);
          worst_rc = std::max(worst_rc, std::abs(lib - quad.element(samples[i], samples[k], l)));
          ++n_rc;
        }
  }
  const bool ok = worst3 <= 1e-14 && worst6 <= 1e-14 && worst_rc <= 1e-10;
  return {ok, fmt::format("{} 3j max err {:.1e}; {} 6j max err {:.1e}; {} recoupling coefficients max err {:.1e}", n3,
                          worst3, n6, worst6, n_rc, worst_rc)};
}

Outcome radial_oracles() {
  // Morse levels against the closed form
  const auto model = molecule::default_oxygen17_model();
  const auto& m = *model.potential.morse();
  const double mu = model.reduced_mass_amu * units::kAmuToElectronMass;
  const double De = units::to_hartree(m.well_depth_K);
  const double omega = m.range_inv_bohr * std::sqrt(2.0 * De / mu);
  const auto states = molecule::solve_radial(model, 0, 6);
  double worst_morse = 0.0;
  for (int n = 0; n < 6; ++n) {
    const double x = n + 0.5;
    const double exact = units::to_kelvin(omega * x - omega * omega / (4.0 * De) * x * x);
    worst_morse = std::max(worst_morse, rel(states[n].energy_K + m.well_depth_K, exact));
  }

  // single-channel phase shifts against a ten-times-finer Numerov integration
  const double kmu = experiments::default_collision_mass() * units::kAmuToElectronMass;
  const auto tail = [](double R) {
    const double x = std::exp(-0.9 * (R - 6.5));
    return 40.0 * ((1.0 - x) * (1.0 - x) - 1.0);
  };
  const propagator::PropagationGrid g{4.1, 24.0, 60.0, 0.01, 0.01};
  double worst_phase = 0.0;
  for (int L : {0, 1, 2, 3})
    for (double E : {1e-6, 1e-4, 1e-2, 1.0, 10.0}) {
      const propagator::QFiller fill = [&](double R, Eigen::MatrixXd& Q) {
        Q(0, 0) = 2.0 * kmu * units::to_hartree(E - tail(R)) - L * (L + 1.0) / (R * R);
      };
      const auto r = propagator::propagate(1, fill, g);
      const auto res = scatter::match(r.Y, {{0, 0, 1, L, 1, 0.0}}, g.R_max, E, kmu);
      const oracle::NumerovSetup s{kmu, L, units::to_hartree(E), g.R_start, g.R_max, g.step_inner / 10.0};
      const double ref = oracle::numerov_phase_shift(s, [&](double R) { return units::to_hartree(tail(R)); });
      double d = std::atan(res.K(0, 0)) - ref;
      d -= std::numbers::pi * std::round(d / std::numbers::pi);
      worst_phase = std::max(worst_phase, std::abs(d));
    }
  return {worst_morse <= 1e-8 && worst_phase <= 1e-7,
          fmt::format("Morse max rel err {:.1e} (v = 0..5); phase shift max err {:.1e} rad (L = 0..3, 1 uK - 10 K)",
                      worst_morse, worst_phase)};
}

Outcome s_matrix_invariants() {
  const auto energies = experiments::log_grid(1e-6, 10.0, 20);
  double unit = 0.0, sym = 0.0, balance = 0.0, level_balance = 0.0;
  int solutions = 0;
  for (auto mode : kModes) {
    const auto model = experiments::build_model(setup_for(mode));
    auto check = [&](double E) {
      const StateRef in{0, 0, 1, 1};
      const auto sol = model.problem->solve(E, in, {});
      unit = std::max(unit, sol.max_unitarity_defect());
      sym = std::max(sym, sol.max_symmetry_defect());
      level_balance = std::max(level_balance, scatter::detailed_balance_defect(sol));
      // M-resolved reciprocity between sublevels of the entrance level
      for (int a = -1; a <= 1; ++a)
        for (int b = a + 1; b <= 1; ++b) {
          const StateRef x{0, 0, 1, a}, y{0, 0, 1, b};
          balance = std::max(balance, rel(scatter::sigma_M(sol, x, y), scatter::sigma_M(sol, y, x)));
        }
      ++solutions;
    };
    for (double E : energies) check(E);
    // above the N = 2 thresholds the level-to-level balance involves distinct k
    for (double E : {12.5, 15.0}) check(E);
  }
  const bool ok = unit < 1e-8 && sym < 1e-8 && balance < 1e-6 && level_balance < 1e-6;
  return {ok, fmt::format("{} solutions: unitarity {:.1e}, symmetry {:.1e}, M reciprocity {:.1e}, level detailed "
                          "balance {:.1e}",
                          solutions, unit, sym, balance, level_balance)};
}

// Largest relative change over every rate of two tables on the same grid.
double table_change(const experiments::RateTable& a, const experiments::RateTable& b, double* at = nullptr) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    double d = rel(a.inelastic_rate(i), b.inelastic_rate(i));
    for (std::size_t k = 0; k < a.exits.size(); ++k) d = std::max(d, rel(a.rate(i, k), b.rate(i, k)));
    if (d > worst) {
      worst = d;
      if (at) *at = a.points[i].energy_K;
    }
  }
  return worst;
}

Outcome convergence_protocol() {
  const auto energies = experiments::energy_preset("fig1");
  double halving = 0.0, extension = 0.0, E_h = 0.0, E_x = 0.0;
  for (auto mode : kModes) {
    const auto model = experiments::build_model(setup_for(mode));
    experiments::RateOptions o;
    const auto base = experiments::compute_rates(model, energies, o);
    const auto fine = experiments::compute_rates(experiments::with_grid(model, model.setup.scattering.grid.halved()),
                                                 energies, o);
    auto far_grid = model.setup.scattering.grid;
    far_grid.R_max = 600.0;
    const auto far = experiments::compute_rates(experiments::with_grid(model, far_grid), energies, o);
    double e1 = 0.0, e2 = 0.0;
    const double h = table_change(base, fine, &e1), x = table_change(base, far, &e2);
    if (h > halving) halving = h, E_h = e1;
    if (x > extension) extension = x, E_x = e2;
  }
  return {halving < 0.01 && extension < 0.01,
          fmt::format("step halving max change {:.2e} (at {:.3g} K); R_max 450 -> 600 max change {:.2e} (at {:.3g} K)",
                      halving, E_h, extension, E_x)};
}

Outcome wigner_threshold() {
  const auto energies = experiments::log_grid(1e-6, 1e-4, 5);
  double inel_var = 0.0, el_var = 0.0, slope = 0.0;
  for (auto mode : kModes) {
    const auto model = experiments::build_model(setup_for(mode));
    const auto t = experiments::compute_rates(model, energies, {});
    auto spread = [](const std::vector<double>& v) {
      return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end()) - 1.0;
    };
    std::vector<double> el, total;
    for (std::size_t i = 0; i < energies.size(); ++i) {
      el.push_back(t.points[i].sigma_cm2[0]);
      total.push_back(t.inelastic_rate(i));
    }
    for (std::size_t k = 1; k < t.exits.size(); ++k) {
      std::vector<double> r;
      for (std::size_t i = 0; i < energies.size(); ++i) r.push_back(t.rate(i, k));
      inel_var = std::max(inel_var, spread(r));
    }
    inel_var = std::max(inel_var, spread(total));
    el_var = std::max(el_var, spread(el));
    slope = std::log(total.back() / total.front()) / std::log(energies.back() / energies.front());
  }
  return {inel_var <= 0.05 && el_var <= 0.05,
          fmt::format("1-100 uK: inelastic rate spread {:.3e} (d ln K / d ln E = {:.3f}); elastic cross section "
                      "spread {:.2e}",
                      inel_var, slope, el_var)};
}

Outcome model_agreement() {
  experiments::CompareOptions o;
  const auto cmp = experiments::compare_models(ModelSetup{}, experiments::energy_preset("fig1"), o);
  double vr = 0.0, v1 = 0.0, vr_all = 0.0;
  std::string worst;
  for (const auto& c : cmp.vibrating_vs_rigid) {
    if (c.max_relative_off_resonance > vr) vr = c.max_relative_off_resonance, worst = c.exit;
    vr_all = std::max(vr_all, c.max_relative);
  }
  for (const auto& c : cmp.v1_vs_vibrating) v1 = std::max(v1, c.max_relative_off_resonance);
  const auto resonant = std::count(cmp.resonant.begin(), cmp.resonant.end(), true);
  return {vr <= 0.10 && v1 <= 0.02,
          fmt::format("vibrating vs rigid off-resonance max {:.2f}% ({}), all points {:.1f}%; v=1 channels change "
                      "{:.2f}%; {} of {} energies screened as resonant",
                      100 * vr, worst, 100 * vr_all, 100 * v1, resonant, cmp.resonant.size())};
}

Outcome lambda_scan_structure() {
  auto rigid = setup_for(molecule::RotorMode::rigid);
  rigid.scattering.jtot.automatic = false;
  rigid.scattering.jtot.jtot_min = rigid.scattering.jtot.jtot_max = 1;
  experiments::PoleSearchOptions po;
  po.initial_points = 100;
  const auto poles = experiments::find_poles(rigid, 1.0, 100.0, po);

  const auto window = experiments::lambda_preset("90-91");
  const auto scan_rigid = experiments::lambda_scan(setup_for(molecule::RotorMode::rigid), window, {});
  const auto scan_vib = experiments::lambda_scan(setup_for(molecule::RotorMode::vibrating, 1), window, {});
  const double spacing = window[1] - window[0];
  const auto extra = experiments::unmatched_features(scan_vib.features, scan_rigid.features, 2.0 * spacing);

  const bool ok = poles.poles() >= 3 && poles.poles() == poles.bound_state_change() && poles.unresolved_intervals == 0 &&
                  !extra.empty();
  std::string where;
  for (std::size_t i = 0; i < std::min<std::size_t>(extra.size(), 3); ++i)
    where += fmt::format(" [{:.4f}, {:.4f}]", extra[i].lambda_lo, extra[i].lambda_hi);
  return {ok, fmt::format("lambda 1-100: {} poles, bound states {} -> {} (change {}), {} unresolved, {} evaluations; "
                          "lambda 90-91: {} vibrating / {} rigid features, {} vibrating-only{}",
                          poles.poles(), poles.bound_states_lo, poles.bound_states_hi, poles.bound_state_change(),
                          poles.unresolved_intervals, poles.evaluations, scan_vib.features.size(),
                          scan_rigid.features.size(), extra.size(), where)};
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[std::filesystem::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

Outcome determinism() {
  const std::string text =
      "diatom:\n  N_max: 4\n  N_max_excited: 2\n"
      "surface:\n  lambda_grid:\n    from: 90.0\n    to: 90.2\n    points: 6\n"
      "scattering:\n  L_max: 4\n  energies: [1.0e-6, 1.0e-3, 0.3, 2.0]\n  step_halving_check: true\n"
      "  adiabats:\n    points: 60\n  scan:\n    pole_search: true\n    pole_initial_points: 4\n";
  const auto config = config::parse_config(text, "determinism");
  const auto root = std::filesystem::temp_directory_path() / "coldcc_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::vector<std::map<std::string, std::string>> runs;
  int exit_codes = 0;
  for (int run = 0; run < 2; ++run) {
    commands::CommandOptions o;
    o.threads = run + 1;  // the second run also exercises the worker pool
    o.out_dir = root / fmt::format("run{}", run);
    for (const auto& name : commands::command_names()) exit_codes += commands::run_command(name, config, o).exit_code;
    runs.push_back(read_tree(*o.out_dir));
  }
  std::filesystem::remove_all(root);
  int differing = 0;
  for (const auto& [name, content] : runs[0])
    if (!runs[1].count(name) || runs[1].at(name) != content) ++differing;
  const bool ok = exit_codes == 0 && !runs[0].empty() && runs[0].size() == runs[1].size() && differing == 0;
  return {ok, fmt::format("{} output files from levels/rates/adiabats/scan/compare, {} differ between runs "
                          "(1 and 2 threads), exit codes sum {}",
                          runs[0].size(), differing, exit_codes)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"spectroscopy anchors", spectroscopy},
      {"scattering-length calibration", scattering_length},
      {"angular algebra oracles", angular_oracles},
      {"radial oracles", radial_oracles},
      {"S-matrix invariants", s_matrix_invariants},
      {"convergence protocol", convergence_protocol},
      {"Wigner threshold laws", wigner_threshold},
      {"rigid vs vibrating agreement", model_agreement},
      {"lambda-scan structure", lambda_scan_structure},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << fmt::format("[{}] {:2d} {}: {} ({:.0f} s)", r.pass ? "PASS" : "FAIL", id, criteria[i].first,
                             r.detail, secs)
              << std::endl;
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
