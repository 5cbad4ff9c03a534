// Retunes the model surface: a common range parameter b for every component
// and a common scale of the repulsive amplitudes, chosen so that the well
// depth and the rigid-rotor s-wave scattering length hit their targets.
// Dispersion coefficients and amplitude ratios are kept from the config.

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coldcc/config.hpp"
#include "coldcc/error.hpp"
#include "coldcc/numerics.hpp"

using namespace coldcc;

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the model surface to a well depth and scattering length"};
  std::string config_path;
  double depth = 40.0, target_a = -2.9, b_lo = 3.2, b_hi = 3.8;
  app.add_option("--config", config_path, "Run configuration (YAML)")->check(CLI::ExistingFile);
  app.add_option("--depth", depth, "Well depth (K)")->check(CLI::PositiveNumber);
  app.add_option("--scattering-length", target_a, "Target s-wave scattering length (bohr)");
  app.add_option("--b-lo", b_lo, "Lower bracket for the range parameter (1/bohr)");
  app.add_option("--b-hi", b_hi, "Upper bracket for the range parameter (1/bohr)");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config_path.empty() ? config::parse_config("{}", "<defaults>") : config::load_config(config_path);
    auto setup = cfg.setup;
    setup.mode = molecule::RotorMode::rigid;
    setup.levels.v_max = 0;
    setup.lambda = 1.0;
    const auto base = setup.surface;

    auto surface_for = [&](double b, double scale) {
      auto p = base;
      for (auto& c : p.components) {
        c.range_inv_bohr = b;
        c.repulsion_K *= scale;
      }
      return p;
    };
    double scale = 1.0;
    auto scattering_length = [&](double b) {
      // repulsion scale spans many decades as b moves; solve in its logarithm
      const double log_s = numerics::find_root(
          [&](double x) { return pes::InteractionSurface::model(surface_for(b, std::exp(x))).well_depth() + depth; },
          -40.0, 40.0);
      scale = std::exp(log_s);
      setup.surface = surface_for(b, scale);
      const auto model = experiments::build_model(setup);
      const double a = scatter::scattering_length(*model.problem, cfg.rates.entrance.level()).a_bohr;
      std::cerr << fmt::format("b = {:.8f}  a = {:.6f}\n", b, a);
      return a;
    };
    const double b = numerics::find_root([&](double x) { return scattering_length(x) - target_a; }, b_lo, b_hi);
    const double a = scattering_length(b);

    std::cout << fmt::format("# well depth {} K, rigid-rotor scattering length {:.6f} bohr\nsurface:\n  components:\n",
                             depth, a);
    for (const auto& c : surface_for(b, scale).components)
      std::cout << fmt::format(
          "    - legendre: {}\n      repulsion_K: {:.10g}\n      repulsion_slope: {}\n      range_inv_bohr: {:.10g}\n"
          "      dispersion_K: {:.10g}\n      dispersion_slope: {}\n",
          c.legendre, c.repulsion_K, c.repulsion_slope, c.range_inv_bohr, c.dispersion_K, c.dispersion_slope);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
