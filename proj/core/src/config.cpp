#include "coldcc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "coldcc/error.hpp"
#include "coldcc/units.hpp"

namespace coldcc::config {

std::vector<experiments::ModelSetup> RunConfig::model_setups() const {
  std::vector<experiments::ModelSetup> out;
  if (models != ModelSelection::vibrating) {
    auto s = setup;
    s.mode = molecule::RotorMode::rigid;
    s.levels.v_max = 0;
    out.push_back(s);
  }
  if (models != ModelSelection::rigid) {
    auto s = setup;
    s.mode = molecule::RotorMode::vibrating;
    out.push_back(s);
  }
  return out;
}

namespace {

std::string where(const std::string& source, const YAML::Mark& m) {
  if (m.is_null()) return source;
  return fmt::format("{}:{}:{}", source, m.line + 1, m.column + 1);
}

// A YAML mapping being consumed; keys that are never read are reported as
// unknown so typos do not silently fall back to defaults.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string* source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail("expected a mapping");
  }

  bool present() const { return node_ && node_.IsMap(); }
  const YAML::Mark mark() const { return node_ ? node_.Mark() : YAML::Mark::null_mark(); }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(node_, path_, msg); }

  [[noreturn]] void fail_at(const YAML::Node& n, const std::string& path, const std::string& msg) const {
    throw ConfigError(fmt::format("{}: {}: {}", where(*source_, n ? n.Mark() : mark()), path, msg));
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    if (!present()) return YAML::Node();
    return node_[key];
  }

  Section child(const std::string& key) { return Section(get(key), key_path(key), source_); }

  template <class T>
  bool read(const std::string& key, T& out) {
    YAML::Node n = get(key);
    if (!n || n.IsNull()) return false;
    out = convert<T>(n, key_path(key));
    return true;
  }

  template <class T>
  T convert(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail_at(n, path, "expected a scalar value");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail_at(n, path, fmt::format("cannot read '{}' as {}", n.Scalar(), type_name<T>()));
    }
  }

  void positive(const std::string& key, double& out) {
    if (read(key, out) && !(out > 0)) fail_at(node_[key], key_path(key), "must be positive");
  }

  void positive(const std::string& key, int& out) {
    if (read(key, out) && out <= 0) fail_at(node_[key], key_path(key), "must be positive");
  }

  void non_negative(const std::string& key, int& out) {
    if (read(key, out) && out < 0) fail_at(node_[key], key_path(key), "must be non-negative");
  }

  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail_at(kv.first, key_path(key), "unknown key");
    }
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }
  const std::string& source() const { return *source_; }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "a string";
  }

  YAML::Node node_;
  std::string path_;
  const std::string* source_;
  std::set<std::string> seen_;
};

template <class E>
E read_enum(Section& s, const std::string& key, E fallback, std::initializer_list<std::pair<const char*, E>> names) {
  std::string text;
  if (!s.read(key, text)) return fallback;
  for (const auto& [name, value] : names)
    if (text == name) return value;
  std::string known;
  for (const auto& [name, value] : names) known += (known.empty() ? "" : ", ") + std::string(name);
  s.fail_at(s.node()[key], s.key_path(key), fmt::format("unknown value '{}' (expected one of: {})", text, known));
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

molecule::TabulatedPotential read_diatom_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open diatom potential table '{}'", path.string()));
  molecule::TabulatedPotential t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double r, v;
    if (!(ls >> r)) continue;
    if (!(ls >> v)) throw ConfigError(fmt::format("{}:{}: expected two columns r(bohr) V(K)", path.string(), line_no));
    t.r_bohr.push_back(r);
    t.energy_K.push_back(v);
  }
  return t;
}

std::vector<double> read_grid(Section& parent, const std::string& key, std::vector<double> fallback, bool is_energy) {
  YAML::Node n = parent.get(key);
  const std::string path = parent.key_path(key);
  if (!n || n.IsNull()) return fallback;
  std::vector<double> out;
  if (n.IsSequence()) {
    for (const auto& item : n) out.push_back(parent.convert<double>(item, path));
    if (out.empty()) parent.fail_at(n, path, "list is empty");
  } else {
    Section s(n, path, &parent.source());
    std::string preset;
    if (s.read("preset", preset)) {
      try {
        out = is_energy ? experiments::energy_preset(preset) : experiments::lambda_preset(preset);
      } catch (const ConfigError& e) {
        s.fail_at(s.node()["preset"], s.key_path("preset"), e.what());
      }
    } else {
      double from = 0, to = 0;
      int points = 0;
      bool logarithmic = is_energy;
      if (!s.read("from", from) || !s.read("to", to) || !s.read("points", points))
        s.fail("needs either 'preset' or 'from', 'to' and 'points'");
      s.read("log", logarithmic);
      if (points < 1) s.fail("points must be at least 1");
      if (to < from) s.fail("'to' must not be below 'from'");
      if (logarithmic) {
        if (!(from > 0)) s.fail("log-spaced grids need from > 0");
        out = experiments::log_grid(from, to, points);
      } else {
        for (int i = 0; i < points; ++i) out.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
      }
    }
    s.finish();
  }
  for (double x : out) {
    if (is_energy && !(x > 0)) parent.fail_at(n, path, "energies must be positive");
    if (!is_energy && !(x >= 0)) parent.fail_at(n, path, "lambda values must be non-negative");
  }
  return out;
}

scatter::StateRef read_state(Section& s, scatter::StateRef fallback) {
  scatter::StateRef st = fallback;
  s.non_negative("v", st.v);
  s.non_negative("N", st.N);
  s.non_negative("J", st.J);
  s.read("M", st.M);
  s.finish();
  if (st.N % 2 != 0) s.fail("N must be even");
  if (st.J < std::abs(st.N - 1) || st.J > st.N + 1) s.fail("J must satisfy |N - 1| <= J <= N + 1");
  if (std::abs(st.M) > st.J) s.fail("|M| must not exceed J");
  return st;
}

void parse_diatom(Section& d, RunConfig& c, const std::filesystem::path& base) {
  auto& model = c.setup.diatom;
  double atom_mass = 2.0 * model.reduced_mass_amu;
  d.positive("atom_mass_amu", atom_mass);
  model.reduced_mass_amu = 0.5 * atom_mass;
  d.positive("equilibrium_r0_bohr", model.equilibrium_r0_bohr);

  c.models = read_enum(d, "mode", c.models,
                       {{"rigid", ModelSelection::rigid}, {"vibrating", ModelSelection::vibrating},
                        {"both", ModelSelection::both}});
  auto& lv = c.setup.levels;
  d.non_negative("N_max", lv.N_max);
  d.non_negative("v_max", lv.v_max);
  d.non_negative("N_max_excited", lv.N_max_excited);
  if (lv.N_max % 2) d.fail_at(d.node()["N_max"], d.key_path("N_max"), "must be even");
  if (lv.N_max_excited % 2) d.fail_at(d.node()["N_max_excited"], d.key_path("N_max_excited"), "must be even");
  if (lv.v_max > 0 && c.models != ModelSelection::vibrating)
    d.fail("v_max > 0 needs mode: vibrating (the rigid rotor has no vibrational channels)");

  auto p = d.child("potential");
  const std::string form_default = "morse";
  std::string form = form_default;
  p.read("form", form);
  if (form == "morse") {
    double gap = 2175.0, zpe = 1100.0, depth = 0.0, range = 0.0;
    const bool explicit_depth = p.read("well_depth_K", depth);
    const bool explicit_range = p.read("range_inv_bohr", range);
    const bool gap_set = p.read("fundamental_gap_K", gap);
    const bool zpe_set = p.read("zero_point_K", zpe);
    if (explicit_depth != explicit_range) p.fail("give both well_depth_K and range_inv_bohr, or neither");
    if (explicit_depth && (gap_set || zpe_set))
      p.fail("give either explicit Morse parameters or the spectroscopic anchors, not both");
    try {
      model.potential = explicit_depth
                            ? molecule::DiatomPotential(molecule::MorsePotential{depth, range, model.equilibrium_r0_bohr})
                            : molecule::DiatomPotential(molecule::calibrate_morse(
                                  gap, zpe, model.equilibrium_r0_bohr, model.reduced_mass_amu));
    } catch (const ConfigError& e) {
      p.fail(e.what());
    }
  } else if (form == "table") {
    std::string file;
    if (!p.read("file", file)) p.fail("form: table needs 'file' (two columns r(bohr) V(K))");
    try {
      model.potential = molecule::DiatomPotential(read_diatom_table(resolve(file, base)));
      if (!d.node()["equilibrium_r0_bohr"]) model.equilibrium_r0_bohr = model.potential.minimum_position();
    } catch (const ConfigError& e) {
      p.fail_at(p.node()["file"], p.key_path("file"), e.what());
    }
  } else {
    p.fail_at(p.node()["form"], p.key_path("form"), fmt::format("unknown value '{}' (expected morse or table)", form));
  }
  p.finish();

  auto fs = d.child("fine_structure");
  double lambda_MHz = model.fine_structure.lambda_ss_K / units::kMHzToKelvin;
  double gamma_MHz = model.fine_structure.gamma_sr_K / units::kMHzToKelvin;
  fs.read("lambda_ss_MHz", lambda_MHz);
  fs.read("gamma_sr_MHz", gamma_MHz);
  fs.finish();
  model.fine_structure = {lambda_MHz * units::kMHzToKelvin, gamma_MHz * units::kMHzToKelvin};

  auto g = d.child("radial_grid");
  g.positive("r_min_bohr", model.grid.r_min_bohr);
  g.positive("r_max_bohr", model.grid.r_max_bohr);
  g.positive("points", model.grid.points);
  g.finish();

  try {
    model.validate();
  } catch (const ConfigError& e) {
    d.fail(e.what());
  }
  d.finish();
}

void parse_surface(Section& s, RunConfig& c, const std::filesystem::path& base) {
  auto& setup = c.setup;
  if (s.read("lambda", setup.lambda) && !(setup.lambda >= 0))
    s.fail_at(s.node()["lambda"], s.key_path("lambda"), "must be non-negative");
  s.positive("r_reference_bohr", setup.surface.r_reference_bohr);
  s.positive("quadrature_nodes", setup.quadrature_nodes);

  YAML::Node comps = s.get("components");
  if (comps && !comps.IsNull()) {
    const std::string path = s.key_path("components");
    if (!comps.IsSequence() || comps.size() == 0) s.fail_at(comps, path, "expected a non-empty list");
    setup.surface.components.clear();
    std::set<int> orders;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      Section cs(comps[i], fmt::format("{}[{}]", path, i), &s.source());
      pes::ModelComponent m{0, 0, 0, 1, 0, 0};
      if (!cs.read("legendre", m.legendre)) cs.fail("missing 'legendre'");
      if (m.legendre < 0 || m.legendre % 2) cs.fail("legendre order must be even and non-negative");
      if (!orders.insert(m.legendre).second) cs.fail("duplicate legendre order");
      cs.read("repulsion_K", m.repulsion_K);
      cs.read("repulsion_slope", m.repulsion_slope);
      cs.positive("range_inv_bohr", m.range_inv_bohr);
      cs.read("dispersion_K", m.dispersion_K);
      cs.read("dispersion_slope", m.dispersion_slope);
      cs.finish();
      setup.surface.components.push_back(m);
    }
  }

  std::string file;
  if (s.read("file", file)) setup.surface_file = resolve(file, base);
  s.non_negative("legendre_max", setup.surface_legendre_max);
  if (setup.surface_legendre_max % 2) s.fail_at(s.node()["legendre_max"], s.key_path("legendre_max"), "must be even");

  auto t = s.child("taper");
  t.positive("start_bohr", setup.taper.start_bohr);
  t.positive("end_bohr", setup.taper.end_bohr);
  t.finish();
  if (!(setup.taper.end_bohr > setup.taper.start_bohr)) t.fail("end_bohr must exceed start_bohr");

  c.scan.lambdas = read_grid(s, "lambda_grid", experiments::lambda_preset("90-91"), false);
  s.finish();
}

void parse_scattering(Section& s, RunConfig& c) {
  auto& sc = c.setup.scattering;
  double projectile = units::kMassHelium3;
  s.positive("projectile_mass_amu", projectile);
  // homonuclear diatom: total mass is four times its reduced mass
  sc.reduced_mass_amu = units::reduced_mass(projectile, 4.0 * c.setup.diatom.reduced_mass_amu);

  auto g = s.child("grid");
  g.positive("R_start", sc.grid.R_start);
  g.positive("zone_boundary", sc.grid.zone_boundary);
  g.positive("R_max", sc.grid.R_max);
  g.positive("step_inner", sc.grid.step_inner);
  g.positive("step_outer", sc.grid.step_outer);
  g.finish();
  try {
    sc.grid.validate();
  } catch (const ConfigError& e) {
    g.fail(e.what());
  }
  if (c.setup.taper.end_bohr > sc.grid.R_max)
    g.fail(fmt::format("R_max must not be inside the surface taper (ends at {} bohr)", c.setup.taper.end_bohr));

  s.positive("initial_log_derivative", sc.options.initial_log_derivative);
  s.non_negative("L_max", sc.L_max);
  sc.convention = read_enum(s, "convention", sc.convention,
                            {{"nominal", channels::Convention::nominal},
                             {"eigenbasis", channels::Convention::eigenbasis}});
  using P = std::optional<channels::Parity>;
  sc.parity = read_enum(s, "parity", P{},
                        {{"both", P{}}, {"even", P{channels::Parity::even}}, {"odd", P{channels::Parity::odd}}});

  auto j = s.child("jtot");
  j.read("automatic", sc.jtot.automatic);
  j.non_negative("min", sc.jtot.jtot_min);
  j.non_negative("max", sc.jtot.jtot_max);
  j.positive("tolerance", sc.jtot.tolerance);
  j.finish();
  if (!sc.jtot.automatic && sc.jtot.jtot_max < sc.jtot.jtot_min) j.fail("max must not be below min");

  c.energies_K = read_grid(s, "energies", experiments::energy_preset("fig1"), true);

  auto e = s.child("entrance");
  c.rates.entrance = read_state(e, c.rates.entrance);
  YAML::Node exits = s.get("exits");
  if (exits && !exits.IsNull()) {
    if (!exits.IsSequence()) s.fail_at(exits, s.key_path("exits"), "expected a list of states");
    for (std::size_t i = 0; i < exits.size(); ++i) {
      Section es(exits[i], fmt::format("{}[{}]", s.key_path("exits"), i), &s.source());
      c.rates.exits.push_back(read_state(es, {0, 0, 1, 1}));
    }
  }
  s.read("step_halving_check", c.rates.step_halving_check);
  s.read("include_v1", c.include_v1);

  auto a = s.child("adiabats");
  a.non_negative("jtot", c.adiabats.jtot);
  c.adiabats.parity = read_enum(a, "parity", c.adiabats.parity,
                                {{"even", channels::Parity::even}, {"odd", channels::Parity::odd}});
  if (a.read("lambda", c.adiabats.lambda) && !(c.adiabats.lambda >= 0)) a.fail("lambda must be non-negative");
  a.positive("R_from", c.adiabats.R_from);
  a.positive("R_to", c.adiabats.R_to);
  a.positive("points", c.adiabats.points);
  a.finish();
  if (!(c.adiabats.R_to > c.adiabats.R_from)) a.fail("R_to must exceed R_from");

  auto sn = s.child("scan");
  sn.positive("energy_K", c.scan.energy_K);
  sn.positive("feature_ratio", c.scan.feature_ratio);
  sn.read("pole_search", c.scan.pole_search);
  sn.positive("pole_initial_points", c.scan.pole_initial_points);
  sn.positive("pole_min_width", c.scan.pole_min_width);
  sn.finish();
  if (c.scan.feature_ratio <= 1) sn.fail("feature_ratio must exceed 1");
  if (c.scan.pole_initial_points < 2) sn.fail("pole_initial_points must be at least 2");
  s.finish();
}

void parse_output(Section& s, RunConfig& c, const std::filesystem::path& base) {
  std::string dir;
  if (s.read("directory", dir)) c.output.directory = resolve(dir, base);
  YAML::Node f = s.get("formats");
  if (f && !f.IsNull()) {
    const std::string path = s.key_path("formats");
    if (!f.IsSequence() || f.size() == 0) s.fail_at(f, path, "expected a non-empty list (csv, json)");
    c.output.csv = c.output.json = false;
    for (const auto& item : f) {
      const auto name = s.convert<std::string>(item, path);
      if (name == "csv") c.output.csv = true;
      else if (name == "json") c.output.json = true;
      else s.fail_at(item, path, fmt::format("unknown format '{}' (expected csv or json)", name));
    }
  }
  s.finish();
}

RunConfig parse_impl(const std::string& text, const std::string& source, const std::filesystem::path& base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}: {}", where(source, e.mark), e.msg));
  }
  RunConfig c;
  Section top(root, "", &source);
  // order matters: later sections derive defaults from earlier ones
  auto d = top.child("diatom");
  parse_diatom(d, c, base);
  auto s = top.child("surface");
  parse_surface(s, c, base);
  auto sc = top.child("scattering");
  parse_scattering(sc, c);
  auto o = top.child("output");
  parse_output(o, c, base);
  top.finish();
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) { return parse_impl(text, source, {}); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_impl(ss.str(), path.string(), path.parent_path());
}

void validate(const RunConfig& c) {
  const auto& s = c.setup;
  s.diatom.validate();
  s.scattering.grid.validate();
  if (!(s.scattering.reduced_mass_amu > 0)) throw ConfigError("collision reduced mass must be positive");
  if (s.levels.N_max % 2 || s.levels.N_max_excited % 2) throw ConfigError("N_max must be even");
  if (s.levels.v_max > 0 && c.models != ModelSelection::vibrating)
    throw ConfigError("v_max > 0 needs the vibrating model");
  if (c.energies_K.empty()) throw ConfigError("no collision energies");
  for (double e : c.energies_K)
    if (!(e > 0)) throw ConfigError("collision energies must be positive");
  for (double l : c.scan.lambdas)
    if (!(l >= 0)) throw ConfigError("lambda values must be non-negative");
  if (!s.surface_file && s.surface.components.empty()) throw ConfigError("surface has no components");
  const auto& in = c.rates.entrance;
  if (in.N > s.levels.N_max_for(in.v) || in.v > s.levels.v_max)
    throw ConfigError("entrance state lies outside the retained levels");
}

std::string default_config_text() {
  const auto model = molecule::default_oxygen17_model();
  const auto surface = pes::default_model_parameters();
  const propagator::PropagationGrid grid;
  const pes::Taper taper;
  std::string comps;
  for (const auto& c : surface.components)
    comps += fmt::format(
        "    - legendre: {}\n"
        "      repulsion_K: {:.10g}\n"
        "      repulsion_slope: {}\n"
        "      range_inv_bohr: {}\n"
        "      dispersion_K: {:.10g}\n"
        "      dispersion_slope: {}\n",
        c.legendre, c.repulsion_K, c.repulsion_slope, c.range_inv_bohr, c.dispersion_K, c.dispersion_slope);

  return fmt::format(
      R"(# coldcc run configuration. Every key is optional; the values below are the
# built-in defaults. Energies in kelvin, lengths in bohr, masses in amu.

diatom:
  # 17O mass; the diatom reduced mass is half of it.
  atom_mass_amu: {atom_mass:.12g}
  equilibrium_r0_bohr: {r0}
  # rigid | vibrating | both. "both" runs the rigid rotor and the vibrating
  # diatom on the same surface and grid.
  mode: both
  # Even rotational states up to N_max in v = 0.
  N_max: 8
  # Vibrational channels (vibrating mode only); N up to N_max_excited for v >= 1.
  v_max: 0
  N_max_excited: 6
  potential:
    # morse: calibrated to the fundamental gap and zero-point energy below,
    #   or explicit with well_depth_K and range_inv_bohr instead.
    # table: 'file' with two columns r(bohr) V(K); '#' starts a comment.
    form: morse
    fundamental_gap_K: 2175.0
    zero_point_K: 1100.0
  # 3Sigma fine structure: spin-spin lambda and spin-rotation gamma (gamma
  # scaled by 16/17 from 16O2).
  fine_structure:
    lambda_ss_MHz: {lambda_MHz:.10g}
    gamma_sr_MHz: {gamma_MHz:.10g}
  # Sinc-DVR grid for the vibrational wavefunctions.
  radial_grid:
    r_min_bohr: {rg_min}
    r_max_bohr: {rg_max}
    points: {rg_points}

surface:
  # Interaction scale factor for rates, compare and levels. The scan uses
  # lambda_grid instead; adiabats use scattering.adiabats.lambda.
  lambda: 1.0
  # Model surface: sum over even Legendre orders l of
  #   A (1 + alpha (r - r_ref)) exp(-b R) - C6 (1 + beta (r - r_ref)) f6(b R) / R^6
  # with f6 the Tang-Toennies damping function. Keys per component:
  # repulsion_K = A, repulsion_slope = alpha, range_inv_bohr = b,
  # dispersion_K = C6 (K bohr^6), dispersion_slope = beta.
  # Tuned to a 40 K well and a = -2.9 bohr for the rigid rotor.
  r_reference_bohr: {r_ref}
  components:
{components}  # Tabulated surface instead of the model: columns R(bohr) r(bohr) theta(deg) V(K),
  # fitted to Legendre orders up to legendre_max.
  # file: surface.dat
  legendre_max: 4
  # Smooth switch-off of the R^-6 tail (must end inside R_max).
  taper:
    start_bohr: {taper_start}
    end_bohr: {taper_end}
  # Gauss-Hermite nodes for the vibrational average (checked against twice as many).
  quadrature_nodes: 40
  # Lambda values for 'scan': a list, from/to/points, or a preset
  # (23-25, 90-91, 1-100).
  lambda_grid:
    preset: 90-91

scattering:
  # 3He; the collision reduced mass pairs it with the whole diatom.
  projectile_mass_amu: {projectile:.12g}
  # Johnson log-derivative propagation, fixed steps in two zones.
  grid:
    R_start: {R_start}
    zone_boundary: {zone}
    R_max: {R_max}
    step_inner: {h_in}
    step_outer: {h_out}
  # Diagonal log-derivative at R_start (hard wall).
  initial_log_derivative: 1.0e8
  L_max: 8
  # nominal: channels keep nominal N, fine structure couples them in W(R).
  # eigenbasis: channels are molecular eigenstates. S matrices agree.
  convention: nominal
  # both | even | odd
  parity: both
  # Total angular momentum: automatic adds jtot until the last one changes
  # every tracked cross section by less than 'tolerance' (max: hard cap,
  # 0 = as far as L_max allows); otherwise min..max exactly.
  jtot:
    automatic: true
    min: 0
    max: 0
    tolerance: 1.0e-3
  # Collision energies: a list, from/to/points (log-spaced unless log: false)
  # or a preset (fig1 = 100 uK - 10 K, threshold = 1 - 100 uK).
  energies:
    preset: fig1
  # Trapped weak-field-seeking state |N J M> = |0 1 1>.
  entrance:
    v: 0
    N: 0
    J: 1
    M: 1
  # Exit states reported besides the elastic one; empty = the other
  # sublevels of the entrance level.
  exits: []
  # Repeat every energy with both steps halved and report the change.
  step_halving_check: false
  # compare: also run the vibrating model with v = 1 channels.
  include_v1: true
  adiabats:
    jtot: 1
    parity: even
    lambda: 90.5
    R_from: 4.1
    R_to: 40.0
    points: 400
  scan:
    energy_K: 1.0e-6
    # Reporting heuristic: flag a feature where a rate jumps by more than
    # this factor between adjacent lambda points.
    feature_ratio: 10.0
    # Locate scattering-length poles over the lambda range and compare with
    # the node count of the propagation.
    pole_search: false
    pole_initial_points: 100
    pole_min_width: 1.0e-13

output:
  directory: coldcc-out
  formats: [csv, json]
)",
      fmt::arg("atom_mass", 2.0 * model.reduced_mass_amu), fmt::arg("r0", model.equilibrium_r0_bohr),
      fmt::arg("lambda_MHz", model.fine_structure.lambda_ss_K / units::kMHzToKelvin),
      fmt::arg("gamma_MHz", model.fine_structure.gamma_sr_K / units::kMHzToKelvin),
      fmt::arg("rg_min", model.grid.r_min_bohr), fmt::arg("rg_max", model.grid.r_max_bohr),
      fmt::arg("rg_points", model.grid.points), fmt::arg("r_ref", surface.r_reference_bohr),
      fmt::arg("components", comps), fmt::arg("taper_start", taper.start_bohr), fmt::arg("taper_end", taper.end_bohr),
      fmt::arg("projectile", units::kMassHelium3), fmt::arg("R_start", grid.R_start),
      fmt::arg("zone", grid.zone_boundary), fmt::arg("R_max", grid.R_max), fmt::arg("h_in", grid.step_inner),
      fmt::arg("h_out", grid.step_outer));
}

}  // namespace coldcc::config
