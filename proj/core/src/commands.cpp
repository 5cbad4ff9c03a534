#include "coldcc/commands.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "coldcc/error.hpp"
#include "coldcc/output.hpp"

namespace coldcc::commands {

namespace {

class Writer {
 public:
  Writer(const config::RunConfig& c, const CommandOptions& o, CommandResult& r)
      : dir_(o.out_dir ? *o.out_dir : c.output.directory), cfg_(c.output), result_(r) {}

  void csv(const std::string& name, const std::string& content) {
    if (cfg_.csv) put(name + ".csv", content);
  }
  void json(const std::string& name, const std::string& content) {
    if (cfg_.json) put(name + ".json", content);
  }

 private:
  void put(const std::string& file, const std::string& content) {
    const auto path = dir_ / file;
    output::write_file(path, content);
    result_.files.push_back(path);
  }

  std::filesystem::path dir_;
  config::OutputSettings cfg_;
  CommandResult& result_;
};

void note(const CommandOptions& o, const std::string& text) {
  if (o.log) *o.log << text << '\n';
}

void check_unitarity(CommandResult& r, double defect, const CommandOptions& o) {
  r.max_unitarity_defect = std::max(r.max_unitarity_defect, defect);
  if (r.max_unitarity_defect > kUnitarityLimit) {
    r.exit_code = kInvariantViolated;
    note(o, fmt::format("error: S-matrix unitarity defect {:.3e} exceeds {:.0e}", r.max_unitarity_defect,
                        kUnitarityLimit));
  }
}

template <class Points>
void warn_jtot(const Points& points, const std::string& model, const CommandOptions& o) {
  for (const auto& p : points)
    if (!p.convergence.jtot_converged) {
      note(o, fmt::format("warning: {}: total angular momentum sum not converged (last block changes {:.2e})", model,
                          p.convergence.jtot_tail));
      return;
    }
}

}  // namespace

CommandResult cmd_levels(const config::RunConfig& c, const CommandOptions& o) {
  CommandResult r;
  std::vector<output::LevelRow> rows;
  for (const auto& s : c.model_setups()) {
    const auto structure = molecule::molecular_levels(s.diatom, s.levels, s.mode);
    const auto part = output::level_rows(experiments::model_tag(s), structure);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  Writer w(c, o, r);
  w.csv("levels", output::levels_csv(rows));
  w.json("levels", output::levels_json(rows));
  note(o, fmt::format("levels: {} rows", rows.size()));
  return r;
}

CommandResult cmd_rates(const config::RunConfig& c, const CommandOptions& o) {
  CommandResult r;
  auto options = c.rates;
  options.threads = o.threads;
  std::vector<experiments::RateTable> tables;
  for (const auto& s : c.model_setups()) {
    const auto model = experiments::build_model(s);
    tables.push_back(experiments::compute_rates(model, c.energies_K, options));
    warn_jtot(tables.back().points, tables.back().model, o);
    check_unitarity(r, tables.back().max_unitarity_defect(), o);
    note(o, fmt::format("rates: {} model, {} energies", tables.back().model, c.energies_K.size()));
  }
  Writer w(c, o, r);
  w.csv("rates", output::rates_csv(tables));
  w.csv("rates_convergence", output::convergence_csv(tables));
  w.json("rates", output::rates_json(tables));
  return r;
}

CommandResult cmd_adiabats(const config::RunConfig& c, const CommandOptions& o) {
  CommandResult r;
  const auto& a = c.adiabats;
  std::vector<double> R;
  for (int i = 0; i < a.points; ++i)
    R.push_back(a.points == 1 ? a.R_from : a.R_from + (a.R_to - a.R_from) * i / (a.points - 1));
  Writer w(c, o, r);
  for (auto s : c.model_setups()) {
    s.lambda = a.lambda;
    const auto model = experiments::build_model(s);
    if (!model.problem->block_exists(a.jtot, a.parity))
      throw ConfigError(fmt::format("no channels for jtot = {} with {} parity", a.jtot, channels::to_string(a.parity)));
    const auto& W = model.problem->block(a.jtot, a.parity);
    const auto curves = channels::adiabatic_curves(W, R);
    const auto name = "adiabats_" + experiments::model_tag(s);
    w.csv(name, output::adiabats_csv(W, curves));
    w.json(name, output::adiabats_json(W, curves, a.lambda));
    double lowest = 0.0;
    for (const auto& p : curves) lowest = std::min(lowest, p.energies_K[0]);
    note(o, fmt::format("adiabats: {} model, {} curves, lowest {:.6g} K", experiments::model_tag(s), W.size(),
                        lowest));
  }
  return r;
}

CommandResult cmd_scan(const config::RunConfig& c, const CommandOptions& o) {
  CommandResult r;
  if (c.scan.lambdas.empty()) throw ConfigError("scan needs at least one lambda value");
  experiments::ScanOptions options;
  options.energy_K = c.scan.energy_K;
  options.entrance = c.rates.entrance;
  options.exits = c.rates.exits;
  options.feature_ratio = c.scan.feature_ratio;
  options.threads = o.threads;

  std::vector<experiments::ScanResult> scans;
  std::vector<experiments::PoleSearch> poles;
  for (const auto& s : c.model_setups()) {
    scans.push_back(experiments::lambda_scan(s, c.scan.lambdas, options));
    check_unitarity(r, scans.back().max_unitarity_defect(), o);
    note(o, fmt::format("scan: {} model, {} lambda values, {} features", scans.back().model, c.scan.lambdas.size(),
                        scans.back().features.size()));
    if (c.scan.pole_search) {
      const auto [lo, hi] = std::minmax_element(c.scan.lambdas.begin(), c.scan.lambdas.end());
      if (*hi > *lo) {
        experiments::PoleSearchOptions po;
        po.energy_K = c.scan.energy_K;
        po.entrance = c.rates.entrance.level();
        po.initial_points = c.scan.pole_initial_points;
        po.min_width = c.scan.pole_min_width;
        po.threads = o.threads;
        auto setup = s;
        setup.scattering.jtot.automatic = false;
        setup.scattering.jtot.jtot_min = setup.scattering.jtot.jtot_max = c.rates.entrance.J;
        poles.push_back(experiments::find_poles(setup, *lo, *hi, po));
        note(o, fmt::format("scan: {} model, {} scattering-length poles, bound-state count change {}",
                            scans.back().model, poles.back().poles(), poles.back().bound_state_change()));
      }
    }
  }
  if (scans.size() == 2) {
    const double spacing = c.scan.lambdas.size() > 1
                               ? std::abs(c.scan.lambdas[1] - c.scan.lambdas[0])
                               : 0.0;
    const auto extra = experiments::unmatched_features(scans[1].features, scans[0].features, 2.0 * spacing);
    note(o, fmt::format("scan: {} vibrating-model features without a rigid counterpart", extra.size()));
  }
  Writer w(c, o, r);
  w.csv("scan", output::rates_csv(scans));
  w.csv("scan_lengths", output::scan_lengths_csv(scans));
  w.csv("scan_convergence", output::convergence_csv(scans));
  w.json("scan", output::scan_json(scans, poles));
  return r;
}

CommandResult cmd_compare(const config::RunConfig& c, const CommandOptions& o) {
  CommandResult r;
  experiments::CompareOptions options;
  options.rates = c.rates;
  options.rates.threads = o.threads;
  options.include_v1 = c.include_v1;
  const auto cmp = experiments::compare_models(c.setup, c.energies_K, options);
  std::vector<experiments::RateTable> tables = {cmp.rigid, cmp.vibrating};
  if (cmp.vibrating_v1) tables.push_back(*cmp.vibrating_v1);
  for (const auto& t : tables) {
    warn_jtot(t.points, t.model, o);
    check_unitarity(r, t.max_unitarity_defect(), o);
  }
  for (const auto& t : cmp.vibrating_vs_rigid)
    note(o, fmt::format("compare: {:>16} vibrating vs rigid: max {:.2f}%  off-resonance max {:.2f}%", t.exit,
                        100 * t.max_relative, 100 * t.max_relative_off_resonance));
  Writer w(c, o, r);
  w.csv("compare_rates", output::rates_csv(tables));
  w.csv("compare_convergence", output::convergence_csv(tables));
  w.csv("compare_report", output::comparison_csv(cmp));
  w.json("compare_rates", output::rates_json(tables));
  w.json("compare_report", output::comparison_json(cmp));
  return r;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"levels", "rates", "adiabats", "scan", "compare"};
  return names;
}

CommandResult run_command(const std::string& name, const config::RunConfig& c, const CommandOptions& o) {
  if (name == "levels") return cmd_levels(c, o);
  if (name == "rates") return cmd_rates(c, o);
  if (name == "adiabats") return cmd_adiabats(c, o);
  if (name == "scan") return cmd_scan(c, o);
  if (name == "compare") return cmd_compare(c, o);
  throw ConfigError(fmt::format("unknown command '{}'", name));
}

}  // namespace coldcc::commands
