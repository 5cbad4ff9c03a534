#include "coldcc/output.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "coldcc/error.hpp"

namespace coldcc::output {

using json = nlohmann::ordered_json;
using experiments::state_label;

std::string number(double x) { return fmt::format("{:.9e}", x); }

namespace {

// The JSON mirror carries exactly the digits of the CSV.
double rounded(double x) { return std::isfinite(x) ? std::stod(number(x)) : x; }

const char* kRateHeader[] = {"energy(K)", "lambda", "model", "entrance", "exit", "sigma(cm^2)", "rate(cm^3/s)"};

std::string header(std::initializer_list<const char*> names) {
  return csv_row(std::vector<std::string>(names.begin(), names.end()));
}

std::string rate_header() { return csv_row(std::vector<std::string>(std::begin(kRateHeader), std::end(kRateHeader))); }

std::string rate_line(double E, double lambda, const std::string& model, const std::string& in, const std::string& out,
                      double sigma, double rate) {
  return csv_row({number(E), number(lambda), model, in, out, number(sigma), number(rate)});
}

json rate_entry(double E, double lambda, const std::string& model, const std::string& in, const std::string& out,
                double sigma, double rate) {
  return json{{"energy_K", rounded(E)}, {"lambda", rounded(lambda)}, {"model", model}, {"entrance", in},
              {"exit", out}, {"sigma_cm2", rounded(sigma)}, {"rate_cm3_s", rounded(rate)}};
}

json convergence_entry(const experiments::Convergence& c) {
  json j{{"unitarity_defect", rounded(c.unitarity_defect)},
         {"symmetry_defect", rounded(c.symmetry_defect)},
         {"jtot_tail", rounded(c.jtot_tail)},
         {"jtot_max", c.jtot_max},
         {"jtot_converged", c.jtot_converged}};
  j["step_halving_delta"] = c.step_halving_delta ? json(rounded(*c.step_halving_delta)) : json(nullptr);
  return j;
}

std::string convergence_line(double E, double lambda, const std::string& model, const experiments::Convergence& c) {
  return csv_row({number(E), number(lambda), model, number(c.unitarity_defect), number(c.symmetry_defect),
                  number(c.jtot_tail), std::to_string(c.jtot_max), c.jtot_converged ? "true" : "false",
                  c.step_halving_delta ? number(*c.step_halving_delta) : ""});
}

std::string convergence_header() {
  return header({"energy(K)", "lambda", "model", "unitarity_defect", "symmetry_defect", "jtot_tail", "jtot_max",
                 "jtot_converged", "step_halving_delta"});
}

json states(const std::vector<scatter::StateRef>& s) {
  json a = json::array();
  for (const auto& x : s) a.push_back(state_label(x));
  return a;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

std::string rates_csv(const std::vector<experiments::RateTable>& tables) {
  std::string out = rate_header();
  for (const auto& t : tables) {
    const auto in = state_label(t.entrance);
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      const auto& p = t.points[i];
      for (std::size_t k = 0; k < t.exits.size(); ++k)
        out += rate_line(p.energy_K, t.lambda, t.model, in, state_label(t.exits[k]), p.sigma_cm2[k], t.rate(i, k));
      out += rate_line(p.energy_K, t.lambda, t.model, in, "inelastic_total", p.sigma_inelastic_cm2, t.inelastic_rate(i));
    }
  }
  return out;
}

std::string rates_csv(const std::vector<experiments::ScanResult>& scans) {
  std::string out = rate_header();
  for (const auto& s : scans) {
    const auto in = state_label(s.entrance);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      for (std::size_t k = 0; k < s.exits.size(); ++k)
        out += rate_line(s.energy_K, p.lambda, s.model, in, state_label(s.exits[k]), p.sigma_cm2[k], s.rate(i, k));
      out += rate_line(s.energy_K, p.lambda, s.model, in, "inelastic_total", p.sigma_inelastic_cm2, s.inelastic_rate(i));
    }
  }
  return out;
}

std::string convergence_csv(const std::vector<experiments::RateTable>& tables) {
  std::string out = convergence_header();
  for (const auto& t : tables)
    for (const auto& p : t.points) out += convergence_line(p.energy_K, t.lambda, t.model, p.convergence);
  return out;
}

std::string convergence_csv(const std::vector<experiments::ScanResult>& scans) {
  std::string out = convergence_header();
  for (const auto& s : scans)
    for (const auto& p : s.points) out += convergence_line(s.energy_K, p.lambda, s.model, p.convergence);
  return out;
}

namespace {

json table_json(const experiments::RateTable& t) {
  json rows = json::array();
  const auto in = state_label(t.entrance);
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const auto& p = t.points[i];
    json point{{"energy_K", rounded(p.energy_K)}, {"rates", json::array()}};
    for (std::size_t k = 0; k < t.exits.size(); ++k)
      point["rates"].push_back(
          rate_entry(p.energy_K, t.lambda, t.model, in, state_label(t.exits[k]), p.sigma_cm2[k], t.rate(i, k)));
    point["rates"].push_back(
        rate_entry(p.energy_K, t.lambda, t.model, in, "inelastic_total", p.sigma_inelastic_cm2, t.inelastic_rate(i)));
    point["convergence"] = convergence_entry(p.convergence);
    rows.push_back(std::move(point));
  }
  return json{{"model", t.model},
              {"lambda", rounded(t.lambda)},
              {"v_max", t.v_max},
              {"reduced_mass_amu", rounded(t.reduced_mass_amu)},
              {"entrance", in},
              {"exits", states(t.exits)},
              {"max_unitarity_defect", rounded(t.max_unitarity_defect())},
              {"points", std::move(rows)}};
}

json scan_entry(const experiments::ScanResult& s) {
  json rows = json::array();
  const auto in = state_label(s.entrance);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    json point{{"lambda", rounded(p.lambda)},
               {"scattering_length_bohr", rounded(p.scattering_length_bohr)},
               {"bound_states", p.bound_states},
               {"rates", json::array()}};
    for (std::size_t k = 0; k < s.exits.size(); ++k)
      point["rates"].push_back(
          rate_entry(s.energy_K, p.lambda, s.model, in, state_label(s.exits[k]), p.sigma_cm2[k], s.rate(i, k)));
    point["rates"].push_back(
        rate_entry(s.energy_K, p.lambda, s.model, in, "inelastic_total", p.sigma_inelastic_cm2, s.inelastic_rate(i)));
    point["convergence"] = convergence_entry(p.convergence);
    rows.push_back(std::move(point));
  }
  json features = json::array();
  for (const auto& f : s.features)
    features.push_back(
        {{"lambda_lo", rounded(f.lambda_lo)}, {"lambda_hi", rounded(f.lambda_hi)}, {"max_ratio", rounded(f.max_ratio)}});
  return json{{"model", s.model},
              {"v_max", s.v_max},
              {"energy_K", rounded(s.energy_K)},
              {"reduced_mass_amu", rounded(s.reduced_mass_amu)},
              {"entrance", in},
              {"exits", states(s.exits)},
              {"max_unitarity_defect", rounded(s.max_unitarity_defect())},
              {"features", std::move(features)},
              {"points", std::move(rows)}};
}

json comparisons(const std::vector<experiments::TransitionComparison>& v) {
  json a = json::array();
  for (const auto& c : v)
    a.push_back({{"exit", c.exit},
                 {"max_relative", rounded(c.max_relative)},
                 {"median_relative", rounded(c.median_relative)},
                 {"max_relative_off_resonance", rounded(c.max_relative_off_resonance)},
                 {"median_relative_off_resonance", rounded(c.median_relative_off_resonance)},
                 {"points", c.points},
                 {"off_resonance_points", c.off_resonance_points}});
  return a;
}

}  // namespace

std::string rates_json(const std::vector<experiments::RateTable>& tables) {
  json j{{"tables", json::array()}};
  for (const auto& t : tables) j["tables"].push_back(table_json(t));
  return dump(j);
}

std::string scan_json(const std::vector<experiments::ScanResult>& scans,
                      const std::vector<experiments::PoleSearch>& poles) {
  json j{{"scans", json::array()}};
  for (const auto& s : scans) j["scans"].push_back(scan_entry(s));
  if (!poles.empty()) {
    json a = json::array();
    for (std::size_t i = 0; i < poles.size(); ++i) {
      const auto& p = poles[i];
      json lam = json::array();
      for (double l : p.pole_lambdas) lam.push_back(rounded(l));
      a.push_back({{"model", i < scans.size() ? scans[i].model : std::string()},
                   {"poles", p.poles()},
                   {"bound_state_change", p.bound_state_change()},
                   {"bound_states_lo", p.bound_states_lo},
                   {"bound_states_hi", p.bound_states_hi},
                   {"unresolved_intervals", p.unresolved_intervals},
                   {"evaluations", p.evaluations},
                   {"pole_lambdas", std::move(lam)}});
    }
    j["pole_search"] = std::move(a);
  }
  return dump(j);
}

std::string scan_lengths_csv(const std::vector<experiments::ScanResult>& scans) {
  std::string out = header({"lambda", "model", "scattering_length(bohr)", "bound_states"});
  for (const auto& s : scans)
    for (const auto& p : s.points)
      out += csv_row({number(p.lambda), s.model, number(p.scattering_length_bohr), std::to_string(p.bound_states)});
  return out;
}

std::string comparison_csv(const experiments::ModelComparison& cmp) {
  std::string out = header({"comparison", "exit", "max_relative", "median_relative", "max_relative_off_resonance",
                            "median_relative_off_resonance", "points", "off_resonance_points"});
  auto add = [&](const char* name, const std::vector<experiments::TransitionComparison>& v) {
    for (const auto& c : v)
      out += csv_row({name, c.exit, number(c.max_relative), number(c.median_relative),
                      number(c.max_relative_off_resonance), number(c.median_relative_off_resonance),
                      std::to_string(c.points), std::to_string(c.off_resonance_points)});
  };
  add("vibrating_vs_rigid", cmp.vibrating_vs_rigid);
  add("v1_vs_vibrating", cmp.v1_vs_vibrating);
  return out;
}

std::string comparison_json(const experiments::ModelComparison& cmp) {
  json energies = json::array();
  for (std::size_t i = 0; i < cmp.rigid.points.size(); ++i)
    energies.push_back({{"energy_K", rounded(cmp.rigid.points[i].energy_K)},
                        {"max_log_slope", rounded(cmp.max_log_slope.at(i))},
                        {"resonant", static_cast<bool>(cmp.resonant.at(i))}});
  json j{{"resonance_screening", std::move(energies)},
         {"vibrating_vs_rigid", comparisons(cmp.vibrating_vs_rigid)},
         {"v1_vs_vibrating", comparisons(cmp.v1_vs_vibrating)}};
  return dump(j);
}

std::vector<LevelRow> level_rows(const std::string& model, const molecule::MolecularStructure& structure) {
  std::vector<LevelRow> rows;
  for (const auto& l : structure.levels()) rows.push_back({model, l.v, l.N, l.J, l.energy_K, l.dominant_weight});
  return rows;
}

std::string levels_csv(const std::vector<LevelRow>& rows) {
  std::string out = header({"model", "v", "N", "J", "energy(K)", "dominant_weight"});
  for (const auto& r : rows)
    out += csv_row({r.model, std::to_string(r.v), std::to_string(r.N), std::to_string(r.J), number(r.energy_K),
                    number(r.dominant_weight)});
  return out;
}

std::string levels_json(const std::vector<LevelRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"model", r.model}, {"v", r.v}, {"N", r.N}, {"J", r.J}, {"energy_K", rounded(r.energy_K)},
                 {"dominant_weight", rounded(r.dominant_weight)}});
  return dump(json{{"levels", std::move(a)}});
}

namespace {

std::vector<std::string> curve_labels(const channels::CouplingMatrix& W,
                                      const std::vector<channels::AdiabatPoint>& curves) {
  std::vector<std::string> labels;
  if (curves.empty()) return labels;
  for (int idx : curves.back().dominant) labels.push_back(channels::label(W.channels().at(idx)));
  return labels;
}

}  // namespace

std::string adiabats_csv(const channels::CouplingMatrix& W, const std::vector<channels::AdiabatPoint>& curves) {
  std::vector<std::string> head = {"R(bohr)"};
  for (const auto& l : curve_labels(W, curves)) head.push_back(fmt::format("E(K) {}", l));
  std::string out = csv_row(head);
  for (const auto& p : curves) {
    std::vector<std::string> row = {number(p.R)};
    for (Eigen::Index i = 0; i < p.energies_K.size(); ++i) row.push_back(number(p.energies_K[i]));
    out += csv_row(row);
  }
  return out;
}

std::string adiabats_json(const channels::CouplingMatrix& W, const std::vector<channels::AdiabatPoint>& curves,
                          double lambda) {
  json labels = json::array();
  for (const auto& l : curve_labels(W, curves)) labels.push_back(l);
  json R = json::array(), E = json::array();
  for (const auto& p : curves) {
    R.push_back(rounded(p.R));
    json row = json::array();
    for (Eigen::Index i = 0; i < p.energies_K.size(); ++i) row.push_back(rounded(p.energies_K[i]));
    E.push_back(std::move(row));
  }
  return dump(json{{"jtot", W.jtot()},
                   {"parity", channels::to_string(W.parity())},
                   {"lambda", rounded(lambda)},
                   {"labels", std::move(labels)},
                   {"R_bohr", std::move(R)},
                   {"energies_K", std::move(E)}});
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    if (!out.flush()) throw Error(fmt::format("error writing '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace coldcc::output
