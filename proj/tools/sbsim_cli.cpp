// sbsim command-line driver.
//
// Exit codes: 0 success, 1 validation error, 2 numerical blow-up,
// 3 invariant failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbsim/config.hpp"
#include "sbsim/diagnostics.hpp"
#include "sbsim/error.hpp"
#include "sbsim/io.hpp"
#include "sbsim/ldp.hpp"
#include "sbsim/mollifier.hpp"
#include "sbsim/solver.hpp"
#include "sbsim/spectral.hpp"

namespace fs = std::filesystem;
using namespace sbsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitInvariant = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<std::size_t> paths;
  std::string control;
  bool quiet = false;
  // mollify
  std::string snapshot;
  double epsilon = 0.1;
};

const char* kDefaultConfig = R"([domain]
dimension = 2
resolution = 32

[physics]
epsilon = 0.01

[time]
dt = 0.01
t_end = 0.2

[noise]
kind = additive
max_wavenumber = 2

[initial]
velocity = random
temperature = random
)";

class Cli {
 public:
  explicit Cli(const Options& o) : opt_(o) {}

  void say(const std::string& line) const {
    if (!opt_.quiet) std::cout << line << "\n";
  }

  RunConfig load() const {
    RunConfig rc = opt_.config.empty() ? parse_config_string(kDefaultConfig) : parse_config(opt_.config);
    if (opt_.seed) rc.seed = *opt_.seed;
    if (!opt_.out_dir.empty()) rc.output.dir = opt_.out_dir;
    if (!opt_.control.empty()) {
      rc.control_file = opt_.control;
      rc.solver.control = parse_control_csv(opt_.control, rc.solver.spec.size(), rc.solver.t_end);
      rc.solver.validate();
    }
    return rc;
  }

  std::string prepare_dir(const RunConfig& rc) const {
    fs::create_directories(rc.output.dir);
    return rc.output.dir;
  }

  RunManifest manifest(const std::string& command, const RunConfig& rc) const {
    RunManifest m;
    m.command = command;
    m.config_hash = sha256_hex(rc.source_text);
    m.master_seed = rc.seed;
    m.version = SBSIM_VERSION;
    m.start_time = utc_now();
    return m;
  }

  void finish(RunManifest& m, const std::string& dir) const {
    m.stop_time = utc_now();
    write_manifest(m, (fs::path(dir) / "manifest.json").string());
  }

  // one trajectory with outputs; shared by simulate and skeleton
  int trajectory(const std::string& command, RunConfig rc) const {
    const std::string dir = prepare_dir(rc);
    RunManifest man = manifest(command, rc);
    const State initial = build_initial_state(rc);
    const Stepper stepper(rc.solver);
    const RandomStream stream(rc.seed, 0);
    std::vector<std::string> snapshots;
    std::vector<StepObserver> observers;
    std::size_t step = 0;
    if (rc.output.snapshot_every > 0) {
      observers.push_back([&](const State& s, const DiagnosticRow&) {
        if (step % static_cast<std::size_t>(rc.output.snapshot_every) == 0) {
          char name[64];
          std::snprintf(name, sizeof(name), "snapshot_%06zu.bqsf", step);
          write_snapshot(s, (fs::path(dir) / name).string());
          snapshots.push_back(name);
        }
        ++step;
      });
    }
    const TrajectoryRecord rec = run(stepper, initial, &stream, observers);
    if (rc.output.timeseries) {
      write_timeseries(rec, (fs::path(dir) / "timeseries.csv").string());
      man.add_file(dir, "timeseries.csv");
    }
    for (const auto& s : snapshots) man.add_file(dir, s);
    if (rec.final_state) {
      write_snapshot(*rec.final_state, (fs::path(dir) / "final.bqsf").string());
      man.add_file(dir, "final.bqsf");
    }
    man.stop_reason = rec.stop_reason;
    finish(man, dir);
    if (rec.blew_up) {
      std::cerr << "blow-up detected: " << rec.blowup_diagnostic << " at t = " << *rec.stop_time << "\n";
      return kExitBlowUp;
    }
    say(command + ": " + std::to_string(rec.rows.size()) + " rows, stop reason " + rec.stop_reason + ", outputs in " +
        dir);
    return kExitOk;
  }

  int simulate() const { return trajectory("simulate", load()); }

  int skeleton() const {
    RunConfig rc = load();
    if (rc.solver.grid.dimension() != 2) throw DimensionError("skeleton runs are defined in 2D only");
    rc.solver.epsilon = 0.0;
    if (!rc.solver.control) rc.solver.control = Control::zero(rc.solver.spec.size(), rc.solver.t_end);
    return trajectory("skeleton", rc);
  }

  int ensemble() const {
    RunConfig rc = load();
    const std::size_t n = opt_.paths.value_or(rc.output.ensemble_paths);
    const std::string dir = prepare_dir(rc);
    RunManifest man = manifest("ensemble", rc);
    const State initial = build_initial_state(rc);
    const EnsembleSummary sum = run_ensemble(rc.solver, initial, n, rc.seed);
    nlohmann::json j;
    j["n_paths"] = sum.n_paths;
    j["blown_up"] = sum.blown_up;
    for (const auto& f : sum.functionals) {
      j["functionals"][f.name] = {{"mean", f.mean}, {"variance", f.variance}, {"max", f.max}};
    }
    {
      std::ofstream out(fs::path(dir) / "summary.json");
      out << j.dump(2) << "\n";
    }
    {
      std::ofstream out(fs::path(dir) / "paths.csv");
      out << "path";
      for (const auto& f : sum.functionals) out << "," << f.name;
      out << "\n";
      char buf[40];
      for (std::size_t p = 0; p < n; ++p) {
        out << p;
        for (const auto& col : sum.values) {
          std::snprintf(buf, sizeof(buf), "%.17g", col[p]);
          out << "," << buf;
        }
        out << "\n";
      }
    }
    man.add_file(dir, "summary.json");
    man.add_file(dir, "paths.csv");
    man.stop_reason = sum.blown_up ? "blow_up" : "t_end";
    finish(man, dir);
    if (sum.blown_up) {
      std::cerr << sum.blown_up << " of " << n << " paths blew up\n";
      return kExitBlowUp;
    }
    say("ensemble: " + std::to_string(n) + " paths, summary in " + dir);
    return kExitOk;
  }

  int ldp_mc() const {
    RunConfig rc = load();
    if (opt_.paths) rc.ldp.paths = *opt_.paths;
    const std::string dir = prepare_dir(rc);
    RunManifest man = manifest("ldp-mc", rc);
    const State initial = build_initial_state(rc);
    const RareEvent ev = build_event(rc);
    const ControlFamily fam = build_family(rc);
    const VaradhanTable table = varadhan_gap(rc.solver, initial, ev, rc.ldp.epsilons, rc.ldp.paths, fam, rc.seed);
    write_varadhan_csv(table, (fs::path(dir) / "varadhan.csv").string());
    man.add_file(dir, "varadhan.csv");
    man.stop_reason = table.optimum.feasible ? "ok" : "infeasible_control_family";
    finish(man, dir);
    for (const auto& r : table.rows) {
      std::ostringstream line;
      line << "eps=" << r.epsilon << " p_hat=" << r.p_hat << " -eps*log(p)=" << r.neg_eps_log_p
           << " best_cost=" << r.best_cost;
      say(line.str());
    }
    say(std::string("gap trend monotone: ") + (table.monotone ? "yes" : "no"));
    return kExitOk;
  }

  int mollify_cmd() const {
    if (opt_.snapshot.empty()) throw ValidationError("mollify needs --snapshot");
    const MollifierSpec spec(opt_.epsilon);
    const State in = read_snapshot(opt_.snapshot);
    State out(in.t, mollify(in.u, spec), mollify(in.theta, spec));
    const std::string dir = opt_.out_dir.empty() ? "out" : opt_.out_dir;
    fs::create_directories(dir);
    write_snapshot(out, (fs::path(dir) / "mollified.bqsf").string());
    RunManifest man;
    man.command = "mollify";
    man.config_hash = sha256_file(opt_.snapshot);
    man.master_seed = opt_.seed.value_or(0);
    man.version = SBSIM_VERSION;
    man.start_time = utc_now();
    man.add_file(dir, "mollified.bqsf");
    man.stop_reason = "ok";
    finish(man, dir);
    say("mollify: epsilon " + std::to_string(opt_.epsilon) + ", wrote " + dir + "/mollified.bqsf");
    return kExitOk;
  }

  int check_invariants() const;

 private:
  const Options& opt_;
};

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

int Cli::check_invariants() const {
  RunConfig rc = load();
  const std::string dir = prepare_dir(rc);
  RunManifest man = manifest("check-invariants", rc);
  const State initial = build_initial_state(rc);
  const SolverConfig& base = rc.solver;
  const Grid& g = base.grid;
  const RandomStream stream(rc.seed, 0);
  std::vector<Check> checks;
  auto add = [&](std::string name, double measured, double tol, bool pass, std::string note = {}) {
    checks.push_back({std::move(name), pass, measured, tol, std::move(note)});
  };

  // divergence after every step
  {
    double worst = 0.0;
    const std::vector<StepObserver> obs{[&](const State& s, const DiagnosticRow&) {
      const double div = lp_norm(divergence(s.u), 2.0) / (1.0 + sobolev_norm(s.u, 1));
      worst = std::max(worst, div);
    }};
    const TrajectoryRecord rec = run(base, initial, &stream, obs);
    if (rec.blew_up) throw BlowUpError(rec.blowup_diagnostic, kNaN, rec.stop_time.value_or(0.0));
    add("divergence_free", worst, 1e-10, worst <= 1e-10);
  }
  // maximum principle, linear semi-Lagrangian
  {
    SolverConfig cfg = base;
    cfg.advection.kind = AdvectionKind::semi_lagrangian;
    cfg.advection.interpolation = Interpolation::linear;
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    const double start = lp_norm(initial.theta, std::numeric_limits<double>::infinity());
    const std::vector<StepObserver> obs{[&](const State& s, const DiagnosticRow&) {
      const double m = lp_norm(s.theta, std::numeric_limits<double>::infinity());
      if (m > prev) ok = false;
      worst = std::max(worst, m - start);
      prev = m;
    }};
    run(cfg, initial, &stream, obs);
    add("theta_maximum_principle", worst, 0.0, ok && worst <= 0.0);
  }
  // cutoff partition values
  {
    const double R = 2.0;
    const double e = std::abs(cutoff(0.5 * R, R) - 1.0) + std::abs(cutoff(2.5 * R, R)) +
                     std::abs(cutoff(1.5 * R, R) - 0.5);
    add("cutoff_partition", e, 1e-15, e <= 1e-15);
  }
  // Galerkin at full resolution is the identity
  {
    SolverConfig a = base;
    a.t_end = std::min(base.t_end, 5 * base.dt);
    SolverConfig b = a;
    b.galerkin_modes = g.resolution() / 2;
    const TrajectoryRecord ra = run(a, initial, &stream);
    const TrajectoryRecord rb = run(b, initial, &stream);
    double diff = 0.0;
    for (int c = 0; c < g.dimension(); ++c) {
      auto x = ra.final_state->u[c].spectral();
      auto y = rb.final_state->u[c].spectral();
      for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(x[i] - y[i]));
    }
    add("galerkin_full_resolution_identity", diff, 0.0, diff == 0.0);
  }
  // deterministic energy identity
  {
    SolverConfig cfg = base;
    cfg.epsilon = 0.0;
    cfg.control.reset();
    cfg.diagnostics = DiagnosticsLevel::full;
    cfg.stopping.reset();
    const TrajectoryRecord rec = run(cfg, initial, nullptr);
    const auto res = energy_budget(rec);
    double total = 0.0;
    for (double r : res) total += r;
    const double e0 = rec.rows.front().l2_u * rec.rows.front().l2_u;
    const double rel = std::abs(total) / (1.0 + e0);
    const double tol = 10.0 * cfg.dt * std::max(1.0, cfg.t_end);
    add("energy_identity", rel, tol, rel <= tol);
  }
  // reproducibility
  {
    SolverConfig cfg = base;
    cfg.t_end = std::min(base.t_end, 5 * base.dt);
    const TrajectoryRecord a = run(cfg, initial, &stream);
    const TrajectoryRecord b = run(cfg, initial, &stream);
    double diff = 0.0;
    for (int c = 0; c < g.dimension(); ++c) {
      auto x = a.final_state->u[c].physical();
      auto y = b.final_state->u[c].physical();
      for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(x[i] - y[i]));
    }
    add("same_seed_reproducible", diff, 0.0, diff == 0.0);
  }
  // snapshot round trip
  {
    const fs::path p = fs::path(dir) / "invariant_roundtrip.bqsf";
    write_snapshot(initial, p.string());
    const State back = read_snapshot(p.string(), g);
    double diff = 0.0;
    for (int c = 0; c < g.dimension(); ++c) {
      auto x = initial.u[c].physical();
      auto y = back.u[c].physical();
      for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(x[i] - y[i]));
    }
    fs::remove(p);
    add("snapshot_roundtrip", diff, 0.0, diff == 0.0);
  }
  // curl / Biot-Savart
  if (g.dimension() == 2) {
    VectorField u = initial.u;
    for (int c = 0; c < 2; ++c) u[c].spectral_mut()[0] = 0.0;
    const VectorField back = biot_savart(curl_2d(u));
    double diff = 0.0;
    for (int c = 0; c < 2; ++c) {
      auto x = u[c].spectral();
      auto y = back[c].spectral();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!g.is_nyquist(i)) diff = std::max(diff, std::abs(x[i] - y[i]));
      }
    }
    add("biot_savart_roundtrip", diff, 1e-12, diff <= 1e-12);
  }
  // mollifier boundedness
  {
    const double before = sobolev_norm(initial.theta, base.sobolev_index);
    const double after = sobolev_norm(mollify(initial.theta, MollifierSpec(0.25)), base.sobolev_index);
    add("mollifier_bounded", after - before, 0.0, after <= before);
  }
  // Ito isometry at the initial state
  if (base.noise.kind != NoiseKind::off && base.spec.size() > 0) {
    const ItoIsometryEstimate est =
        ito_isometry_estimate(base.noise, base.spec, initial.u, initial.theta, base.dt, 10, 2000, rc.seed);
    add("ito_isometry", est.relative_gap, 0.1, est.relative_gap <= 0.1,
        "standard error " + std::to_string(est.standard_error));
  }

  nlohmann::json report = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    report.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"note", c.note}});
    std::ostringstream line;
    line << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured << " tolerance=" << c.tolerance;
    if (!c.note.empty()) line << " (" << c.note << ")";
    say(line.str());
  }
  {
    std::ofstream out(fs::path(dir) / "invariants.json");
    out << nlohmann::json{{"all_pass", all}, {"checks", report}}.dump(2) << "\n";
  }
  man.add_file(dir, "invariants.json");
  man.stop_reason = all ? "all_pass" : "invariant_failure";
  finish(man, dir);
  return all ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Boussinesq simulator with partial diffusion"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "INI configuration file");
    if (config_required) c->required();
    sub->add_option("--seed", opt.seed, "master seed (overrides [noise].seed)");
    sub->add_option("--out-dir", opt.out_dir, "output directory (overrides [output].dir)");
    sub->add_option("--paths", opt.paths, "number of paths");
    sub->add_option("--control", opt.control, "control CSV with rows t, mode, value");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  };
  auto* simulate = app.add_subcommand("simulate", "one stochastic path");
  common(simulate, true);
  auto* ensemble = app.add_subcommand("ensemble", "independent paths and a summary");
  common(ensemble, true);
  auto* skeleton = app.add_subcommand("skeleton", "deterministic controlled run (epsilon = 0)");
  common(skeleton, true);
  auto* check = app.add_subcommand("check-invariants", "property battery with a pass/fail report");
  common(check, false);
  auto* ldp = app.add_subcommand("ldp-mc", "rare-event Monte Carlo and Varadhan gap table");
  common(ldp, true);
  auto* moll = app.add_subcommand("mollify", "apply the Gaussian mollifier to a snapshot");
  common(moll, false);
  moll->add_option("--snapshot", opt.snapshot, "input snapshot")->required();
  moll->add_option("--epsilon", opt.epsilon, "mollifier width (> 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const Cli cli(opt);
  try {
    if (*simulate) return cli.simulate();
    if (*ensemble) return cli.ensemble();
    if (*skeleton) return cli.skeleton();
    if (*check) return cli.check_invariants();
    if (*ldp) return cli.ldp_mc();
    if (*moll) return cli.mollify_cmd();
  } catch (const BlowUpError& e) {
    std::cerr << e.what() << "\n";
    return kExitBlowUp;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
