#include "sbsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sbsim/error.hpp"
#include "sbsim/io.hpp"
#include "sbsim/spectral.hpp"

namespace sbsim {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ValidationError(where + ": expected a number, got '" + t + "'");
  }
  if (pos != t.size()) throw ValidationError(where + ": expected a number, got '" + t + "'");
  return v;
}

long long to_integer(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw ValidationError(where + ": expected an integer, got '" + t + "'");
  }
  if (pos != t.size()) throw ValidationError(where + ": expected an integer, got '" + t + "'");
  return v;
}

bool to_bool(const std::string& text, const std::string& where) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ValidationError(where + ": expected a boolean, got '" + t + "'");
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }
  std::string where(const std::string& key) const { return "[" + name_ + "]." + key; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }
  std::string require(const std::string& key) {
    auto v = raw(key);
    if (!v) throw ValidationError(where(key) + ": required key is missing");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? to_double(*v, where(key)) : fallback;
  }
  double required_number(const std::string& key) { return to_double(require(key), where(key)); }
  long long integer(const std::string& key, long long fallback) {
    auto v = raw(key);
    return v ? to_integer(*v, where(key)) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) {
    auto v = raw(key);
    return v ? to_bool(*v, where(key)) : fallback;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    auto v = raw(key);
    return v ? *v : fallback;
  }
  std::string choice(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed) {
    const std::string v = text(key, fallback);
    for (const char* a : allowed) {
      if (v == a) return v;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw ValidationError(where(key) + ": '" + v + "' is not one of {" + list + "}");
  }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& kv : *tree_) {
      if (!used_.count(kv.first)) throw ValidationError(where(kv.first) + ": unknown key");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

template <class F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const DimensionError& e) {
    throw DimensionError(where + ": " + e.what());
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind("[", 0) == 0) throw;
    throw ValidationError(where + ": " + msg);
  }
}

QWienerSpec parse_modes(const std::string& text, int d, const std::string& where) {
  std::vector<NoiseMode> modes;
  for (const std::string& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto tok = split(item, ',');
    if (tok.size() < static_cast<std::size_t>(d) + 1 || tok.size() > static_cast<std::size_t>(d) + 2) {
      throw ValidationError(where + ": mode '" + item + "' needs " + std::to_string(d) +
                            " integers, a tag and an optional lambda");
    }
    NoiseMode m;
    for (int a = 0; a < d; ++a) m.k[static_cast<std::size_t>(a)] = static_cast<int>(to_integer(tok[a], where));
    const std::string& tag = tok[static_cast<std::size_t>(d)];
    if (tag == "cos") {
      m.tag = BasisTag::cos;
    } else if (tag == "sin") {
      m.tag = BasisTag::sin;
    } else if (tag == "const" || tag == "constant") {
      m.tag = BasisTag::constant;
    } else {
      throw ValidationError(where + ": unknown basis tag '" + tag + "'");
    }
    if (tok.size() == static_cast<std::size_t>(d) + 2) {
      m.lambda = to_double(tok.back(), where);
    } else {
      double k2 = 0.0;
      for (int a = 0; a < d; ++a) k2 += double(m.k[a]) * m.k[a];
      m.lambda = k2 > 0.0 ? 1.0 / (k2 * k2) : 1.0;
    }
    modes.push_back(m);
  }
  if (modes.empty()) throw ValidationError(where + ": empty mode list");
  return guarded(where, [&] { return QWienerSpec(std::move(modes)); });
}

std::vector<std::array<double, 3>> parse_directions(const std::string& text, int d, std::size_t count,
                                                    const std::string& where) {
  std::vector<std::array<double, 3>> out;
  for (const std::string& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto tok = split(item, ',');
    if (tok.size() != static_cast<std::size_t>(d)) {
      throw ValidationError(where + ": direction '" + item + "' needs " + std::to_string(d) + " components");
    }
    std::array<double, 3> v{0.0, 0.0, 0.0};
    double n = 0.0;
    for (int a = 0; a < d; ++a) {
      v[static_cast<std::size_t>(a)] = to_double(tok[a], where);
      n += v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
    }
    if (!(n > 0.0)) throw ValidationError(where + ": zero direction");
    for (auto& x : v) x /= std::sqrt(n);
    out.push_back(v);
  }
  if (out.size() != count) {
    throw ValidationError(where + ": " + std::to_string(out.size()) + " directions for " + std::to_string(count) +
                          " modes");
  }
  return out;
}

AdvectionScheme parse_advection(Section& s) {
  AdvectionScheme a;
  a.kind = s.choice("advection", "semi_lagrangian", {"semi_lagrangian", "spectral_rk2"}) == "semi_lagrangian"
               ? AdvectionKind::semi_lagrangian
               : AdvectionKind::spectral_rk2;
  a.interpolation =
      s.choice("interpolation", "cubic", {"cubic", "linear"}) == "cubic" ? Interpolation::cubic : Interpolation::linear;
  a.dealias = s.boolean("dealias", true);
  a.cfl_cap = s.number("cfl_cap", 1.0);
  if (!(a.cfl_cap > 0.0)) throw ValidationError(s.where("cfl_cap") + ": must be positive");
  return a;
}

}  // namespace

RunConfig parse_config_string(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> kSections{"domain", "physics", "time", "noise",
                                               "control", "output", "ldp", "initial"};
  for (const auto& kv : tree) {
    if (!kv.second.data().empty()) throw ValidationError("[]." + kv.first + ": key outside any section");
    if (!kSections.count(kv.first)) throw ValidationError("[" + kv.first + "]: unknown section");
  }
  auto section = [&](const char* name) {
    auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  };

  RunConfig rc;
  rc.source_text = text;
  SolverConfig& sc = rc.solver;

  Section domain = section("domain");
  const int d = static_cast<int>(to_integer(domain.require("dimension"), domain.where("dimension")));
  const int n = static_cast<int>(to_integer(domain.require("resolution"), domain.where("resolution")));
  sc.grid = guarded("[domain]", [&] { return Grid(d, n); });
  domain.check_unknown();

  Section physics = section("physics");
  sc.viscosity = physics.number("viscosity", 1.0);
  if (!(sc.viscosity > 0.0)) throw ValidationError(physics.where("viscosity") + ": must be positive");
  sc.cutoff_R = physics.number("cutoff_R", 0.0);
  if (!(sc.cutoff_R >= 0.0) || !std::isfinite(sc.cutoff_R)) {
    throw ValidationError(physics.where("cutoff_R") + ": must be a nonnegative number");
  }
  if (auto g = physics.raw("galerkin_modes")) {
    const long long gm = to_integer(*g, physics.where("galerkin_modes"));
    if (gm < 0) throw ValidationError(physics.where("galerkin_modes") + ": must be nonnegative");
    sc.galerkin_modes = static_cast<int>(gm);
  }
  sc.epsilon = physics.number("epsilon", 1.0);
  if (!(sc.epsilon >= 0.0) || !std::isfinite(sc.epsilon)) {
    throw ValidationError(physics.where("epsilon") + ": must be nonnegative");
  }
  sc.nonlinear = physics.boolean("nonlinear", true);
  sc.sobolev_index =
      static_cast<int>(physics.integer("sobolev_index", SolverConfig::default_sobolev_index(d)));
  if (sc.sobolev_index < 0 || sc.sobolev_index > 15) {
    throw ValidationError(physics.where("sobolev_index") + ": must lie in [0, 15]");
  }
  sc.advection = parse_advection(physics);
  physics.check_unknown();

  Section time = section("time");
  sc.dt = time.required_number("dt");
  if (!(sc.dt > 0.0)) throw ValidationError(time.where("dt") + ": must be positive");
  sc.t_end = time.required_number("t_end");
  if (!(sc.t_end >= 0.0)) throw ValidationError(time.where("t_end") + ": must be nonnegative");
  if (sc.t_end > 0.0 && sc.dt > sc.t_end) throw ValidationError(time.where("dt") + ": must not exceed t_end");
  const std::string rule = time.choice("stop_rule", "none", {"none", "tau_R", "gamma_R"});
  if (rule != "none") {
    StoppingRule sr;
    sr.kind = rule == "tau_R" ? StopKind::tau_R : StopKind::gamma_R;
    sr.threshold = to_double(time.require("stop_threshold"), time.where("stop_threshold"));
    sr.include_control = time.boolean("stop_include_control", false);
    if (sr.kind == StopKind::gamma_R && d != 2) {
      throw ValidationError(time.where("stop_rule") + ": gamma_R is 2D only");
    }
    sc.stopping = sr;
  } else {
    time.raw("stop_threshold");
    time.raw("stop_include_control");
  }
  sc.blowup_limit = time.number("blowup_limit", 1e100);
  if (!(sc.blowup_limit > 0.0)) throw ValidationError(time.where("blowup_limit") + ": must be positive");
  time.check_unknown();

  Section noise = section("noise");
  const std::string kind = noise.choice("kind", noise.present() ? "additive" : "off", {"off", "additive", "multiplicative"});
  if (auto m = noise.raw("modes")) {
    sc.spec = parse_modes(*m, d, noise.where("modes"));
    noise.raw("max_wavenumber");
    noise.raw("gamma");
  } else {
    const long long kmax = noise.integer("max_wavenumber", 2);
    const double gamma = noise.number("gamma", 2.0);
    if (kmax < 1) throw ValidationError(noise.where("max_wavenumber") + ": must be >= 1");
    if (2 * kmax >= n) throw ValidationError(noise.where("max_wavenumber") + ": must be below resolution / 2");
    if (!(gamma >= 0.0)) throw ValidationError(noise.where("gamma") + ": must be nonnegative");
    const bool mean = noise.boolean("include_mean", false);
    const double lambda0 = noise.number("lambda0", 1.0);
    sc.spec = QWienerSpec::power_law(d, static_cast<int>(kmax), gamma, mean, lambda0);
  }
  noise.raw("include_mean");
  noise.raw("lambda0");
  guarded(noise.where("modes"), [&] {
    sc.spec.check_grid(sc.grid);
    return 0;
  });
  const double amplitude = noise.number("amplitude", 1.0);
  const double a0 = noise.number("a0", 1.0);
  const double a1 = noise.number("a1", 0.0);
  const double a2 = noise.number("a2", 0.0);
  if (kind == "off") {
    sc.noise = NoiseIntensity::off();
  } else if (kind == "additive") {
    sc.noise = NoiseIntensity::additive(sc.spec, d, amplitude);
  } else {
    sc.noise = NoiseIntensity::multiplicative(sc.spec, d, a0, a1, a2, amplitude);
  }
  if (auto dirs = noise.raw("directions")) {
    if (kind != "off") sc.noise.directions = parse_directions(*dirs, d, sc.spec.size(), noise.where("directions"));
  }
  sc.noise_substeps = static_cast<int>(noise.integer("substeps", 1));
  if (sc.noise_substeps < 1) throw ValidationError(noise.where("substeps") + ": must be >= 1");
  rc.seed = static_cast<std::uint64_t>(noise.integer("seed", 0));
  noise.check_unknown();

  Section control = section("control");
  if (auto f = control.raw("file")) {
    std::filesystem::path p(*f);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    rc.control_file = p.string();
  }
  control.check_unknown();

  Section output = section("output");
  rc.output.dir = output.text("dir", "out");
  rc.output.snapshot_every = static_cast<int>(output.integer("snapshot_every", 0));
  if (rc.output.snapshot_every < 0) throw ValidationError(output.where("snapshot_every") + ": must be >= 0");
  rc.output.timeseries = output.boolean("timeseries", true);
  const std::string diag = output.choice("diagnostics", "full", {"full", "light", "none"});
  sc.diagnostics = diag == "full" ? DiagnosticsLevel::full
                   : diag == "light" ? DiagnosticsLevel::light
                                     : DiagnosticsLevel::none;
  const long long ep = output.integer("ensemble_paths", 16);
  if (ep < 1) throw ValidationError(output.where("ensemble_paths") + ": must be >= 1");
  rc.output.ensemble_paths = static_cast<std::size_t>(ep);
  output.check_unknown();

  Section ldp = section("ldp");
  if (auto e = ldp.raw("epsilons")) {
    rc.ldp.epsilons.clear();
    for (const auto& tok : split(*e, ',')) rc.ldp.epsilons.push_back(to_double(tok, ldp.where("epsilons")));
    if (rc.ldp.epsilons.empty()) throw ValidationError(ldp.where("epsilons") + ": empty list");
    for (std::size_t i = 0; i < rc.ldp.epsilons.size(); ++i) {
      if (!(rc.ldp.epsilons[i] > 0.0)) throw ValidationError(ldp.where("epsilons") + ": values must be positive");
      if (i > 0 && !(rc.ldp.epsilons[i] < rc.ldp.epsilons[i - 1])) {
        throw ValidationError(ldp.where("epsilons") + ": must be decreasing");
      }
    }
  }
  const long long lp = ldp.integer("paths", 1000);
  if (lp < 100) throw ValidationError(ldp.where("paths") + ": must be >= 100");
  rc.ldp.paths = static_cast<std::size_t>(lp);
  rc.ldp.functional = ldp.choice("functional", "mode_amplitude", {"mode_amplitude", "sup_l2"});
  const long long lm = ldp.integer("mode", 0);
  if (lm < 0 || (sc.spec.size() > 0 && static_cast<std::size_t>(lm) >= sc.spec.size())) {
    throw ValidationError(ldp.where("mode") + ": outside the noise mode list");
  }
  rc.ldp.mode = static_cast<std::size_t>(lm);
  if (auto t = ldp.raw("threshold")) rc.ldp.threshold = to_double(*t, ldp.where("threshold"));
  rc.ldp.direction = ldp.choice("direction", "at_least", {"at_least", "at_most"}) == "at_least"
                         ? EventDirection::at_least
                         : EventDirection::at_most;
  rc.ldp.blocks = static_cast<int>(ldp.integer("blocks", 5));
  if (rc.ldp.blocks < 1) throw ValidationError(ldp.where("blocks") + ": must be >= 1");
  rc.ldp.bound = ldp.number("bound", 50.0);
  if (!(rc.ldp.bound > 0.0)) throw ValidationError(ldp.where("bound") + ": must be positive");
  rc.ldp.restarts = static_cast<int>(ldp.integer("restarts", 3));
  if (rc.ldp.restarts < 1) throw ValidationError(ldp.where("restarts") + ": must be >= 1");
  rc.ldp.optimizer_seed = static_cast<std::uint64_t>(ldp.integer("optimizer_seed", 1));
  ldp.check_unknown();

  Section initial = section("initial");
  rc.initial.velocity =
      initial.choice("velocity", "zero", {"zero", "shear", "taylor_green", "constant", "random"});
  rc.initial.velocity_amplitude = initial.number("velocity_amplitude", 1.0);
  rc.initial.temperature = initial.choice("temperature", "zero", {"zero", "constant", "sin_x1", "random"});
  rc.initial.temperature_amplitude = initial.number("temperature_amplitude", 1.0);
  rc.initial.random_modes = static_cast<int>(initial.integer("random_modes", 4));
  const bool random_profile = rc.initial.velocity == "random" || rc.initial.temperature == "random";
  if (random_profile && (rc.initial.random_modes < 1 || 2 * rc.initial.random_modes >= n)) {
    throw ValidationError(initial.where("random_modes") + ": must lie in [1, resolution / 2)");
  }
  rc.initial.seed = static_cast<std::uint64_t>(initial.integer("seed", 0));
  if (auto s = initial.raw("snapshot")) {
    std::filesystem::path p(*s);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    rc.initial.snapshot = p.string();
  }
  initial.check_unknown();

  if (!rc.control_file.empty()) {
    sc.control = parse_control_csv(rc.control_file, sc.spec.size(), sc.t_end);
  }
  guarded("config", [&] {
    sc.validate();
    return 0;
  });
  return rc;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file '" + path + "' cannot be opened");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::filesystem::path p(path);
  return parse_config_string(buf.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

Control parse_control_text(const std::string& text, std::size_t modes, double t_end) {
  std::map<double, std::map<std::size_t, double>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tok = split(t, ',');
    const std::string where = "control line " + std::to_string(lineno);
    if (tok.size() != 3) throw ValidationError(where + ": expected 't, mode, value'");
    if (lineno == 1 && tok[0] == "t") continue;
    const double time = to_double(tok[0], where);
    const long long mode = to_integer(tok[1], where);
    const double value = to_double(tok[2], where);
    if (time < 0.0 || time > t_end * (1.0 + 1e-12)) throw ValidationError(where + ": time outside [0, t_end]");
    if (mode < 0 || static_cast<std::size_t>(mode) >= modes) {
      throw ValidationError(where + ": mode " + std::to_string(mode) + " outside the noise mode list");
    }
    if (!std::isfinite(value)) throw ValidationError(where + ": value is not finite");
    entries[time][static_cast<std::size_t>(mode)] = value;
  }
  Control c;
  c.t_end = t_end;
  std::vector<double> current(modes, 0.0);
  if (entries.empty() || entries.begin()->first > 0.0) {
    c.starts.push_back(0.0);
    c.values.push_back(current);
  }
  for (const auto& [time, vals] : entries) {
    for (const auto& [mode, value] : vals) current[mode] = value;
    if (!c.starts.empty() && c.starts.back() == time) {
      c.values.back() = current;
    } else {
      c.starts.push_back(time);
      c.values.push_back(current);
    }
  }
  return c;
}

Control parse_control_csv(const std::string& path, std::size_t modes, double t_end) {
  std::ifstream in(path);
  if (!in) throw ValidationError("control file '" + path + "' cannot be opened");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_control_text(buf.str(), modes, t_end);
}

namespace {

bool upper_half(const Wavenumber& k) {
  for (int a = 0; a < 3; ++a) {
    if (k[a] > 0) return true;
    if (k[a] < 0) return false;
  }
  return false;
}

// random real field with coefficients decaying like 1/(1+|k|^2) on |k|_inf <= kmax
std::vector<cplx> random_coefficients(const Grid& g, int kmax, CounterEngine& rng) {
  std::vector<cplx> c(g.size(), cplx{});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavenumber k = g.wavenumber(i);
    if (!upper_half(k) || g.max_abs_component(i) > kmax) continue;
    const double scale = 1.0 / (1.0 + g.k_squared(i));
    const cplx v{scale * rng.normal(), scale * rng.normal()};
    c[i] = v;
    c[g.index_of({-k[0], -k[1], -k[2]})] = std::conj(v);
  }
  return c;
}

double rms(const ScalarField& f) { return lp_norm(f, 2.0) / std::sqrt(f.grid().volume()); }

}  // namespace

State build_initial_state(const RunConfig& config) {
  const Grid& g = config.solver.grid;
  const int d = g.dimension();
  if (!config.initial.snapshot.empty()) {
    State s = read_snapshot(config.initial.snapshot, g);
    s.t = 0.0;
    return s;
  }
  const InitialSettings& in = config.initial;
  const double A = in.velocity_amplitude;
  CounterEngine rng(in.seed, 0, StreamTag::initial_data);
  VectorField u(g);
  if (in.velocity == "shear") {
    u[0] = ScalarField::from_function(g, [A](const std::array<double, 3>& x) { return A * std::sin(x[1]); });
  } else if (in.velocity == "taylor_green") {
    u[0] = ScalarField::from_function(
        g, [A](const std::array<double, 3>& x) { return A * std::sin(x[0]) * std::cos(x[1]); });
    u[1] = ScalarField::from_function(
        g, [A](const std::array<double, 3>& x) { return -A * std::cos(x[0]) * std::sin(x[1]); });
  } else if (in.velocity == "constant") {
    u[d - 1] = ScalarField::from_function(g, [A](const std::array<double, 3>&) { return A; });
  } else if (in.velocity == "random") {
    for (int a = 0; a < d; ++a) u[a] = ScalarField::from_spectral(g, random_coefficients(g, in.random_modes, rng));
    u = leray_project(u);
    double ss = 0.0;
    for (int a = 0; a < d; ++a) ss += std::pow(rms(u[a]), 2);
    const double r = std::sqrt(ss);
    if (r > 0.0) {
      for (int a = 0; a < d; ++a) {
        for (auto& v : u[a].spectral_mut()) v *= A / r;
      }
    }
  }
  const double B = in.temperature_amplitude;
  ScalarField theta(g);
  if (in.temperature == "constant") {
    theta = ScalarField::from_function(g, [B](const std::array<double, 3>&) { return B; });
  } else if (in.temperature == "sin_x1") {
    theta = ScalarField::from_function(g, [B](const std::array<double, 3>& x) { return B * std::sin(x[0]); });
  } else if (in.temperature == "random") {
    theta = ScalarField::from_spectral(g, random_coefficients(g, in.random_modes, rng));
    const double r = rms(theta);
    if (r > 0.0) {
      for (auto& v : theta.spectral_mut()) v *= B / r;
    }
    theta = ScalarField::from_physical(g, std::vector<double>(theta.physical().begin(), theta.physical().end()));
  }
  return make_state(std::move(u), std::move(theta), 0.0);
}

RareEvent build_event(const RunConfig& config) {
  const SolverConfig& sc = config.solver;
  if (!config.ldp.threshold) throw ValidationError("[ldp].threshold: required key is missing");
  RareEvent ev;
  ev.threshold = *config.ldp.threshold;
  ev.direction = config.ldp.direction;
  if (config.ldp.functional == "mode_amplitude") {
    if (sc.spec.size() == 0) throw ValidationError("[ldp].functional: mode_amplitude needs noise modes");
    const NoiseMode& m = sc.spec.mode(config.ldp.mode);
    std::array<double, 3> dir = default_direction(m.k, sc.grid.dimension());
    if (config.ldp.mode < sc.noise.directions.size()) dir = sc.noise.directions[config.ldp.mode];
    ev.functional = mode_amplitude(m, dir);
  } else {
    ev.functional = sup_l2_norm();
  }
  return ev;
}

ControlFamily build_family(const RunConfig& config) {
  ControlFamily f;
  f.blocks = config.ldp.blocks;
  f.bound = config.ldp.bound;
  f.restarts = config.ldp.restarts;
  f.seed = config.ldp.optimizer_seed;
  return f;
}

}  // namespace sbsim
