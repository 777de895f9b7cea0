#include "sbsim/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "sbsim/error.hpp"
#include "sbsim/spectral.hpp"

namespace sbsim {

// ---------------------------------------------------------------- Control

Control Control::zero(std::size_t modes, double t_end) {
  return constant(std::vector<double>(modes, 0.0), t_end);
}

Control Control::constant(std::vector<double> value, double t_end) {
  Control c;
  c.starts = {0.0};
  c.values = {std::move(value)};
  c.t_end = t_end;
  return c;
}

Control Control::blocks(std::size_t modes, double t_end, int blocks, std::span<const double> params) {
  if (blocks < 1) throw ValidationError("control needs at least one block");
  if (params.size() != modes * static_cast<std::size_t>(blocks)) {
    throw ValidationError("control parameter count " + std::to_string(params.size()) + " != blocks * modes (" +
                          std::to_string(modes * static_cast<std::size_t>(blocks)) + ")");
  }
  Control c;
  c.t_end = t_end;
  for (int b = 0; b < blocks; ++b) {
    c.starts.push_back(t_end * b / blocks);
    const auto first = params.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * modes);
    c.values.emplace_back(first, first + static_cast<std::ptrdiff_t>(modes));
  }
  return c;
}

std::span<const double> Control::at(double t) const {
  if (values.empty()) return {};
  // pieces start on step boundaries; a tiny slack absorbs m * dt rounding
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end));
  auto it = std::upper_bound(starts.begin(), starts.end(), t + slack);
  std::size_t p = it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin()) - 1;
  return values[p];
}

double Control::squared_norm() const {
  double acc = 0.0;
  for (std::size_t p = 0; p < values.size(); ++p) {
    const double end = p + 1 < starts.size() ? starts[p + 1] : t_end;
    double sq = 0.0;
    for (double v : values[p]) sq += v * v;
    acc += (end - starts[p]) * sq;
  }
  return acc;
}

Control Control::scaled(double factor) const {
  Control c = *this;
  for (auto& v : c.values) {
    for (auto& x : v) x *= factor;
  }
  return c;
}

void Control::validate(std::size_t modes, double horizon) const {
  if (values.empty() || starts.size() != values.size()) throw ValidationError("control has no pieces");
  if (starts.front() > 1e-12) throw ValidationError("control must start at t = 0");
  for (std::size_t p = 1; p < starts.size(); ++p) {
    if (!(starts[p] > starts[p - 1])) throw ValidationError("control piece times must increase");
  }
  for (const auto& v : values) {
    if (v.size() != modes) {
      throw ValidationError("control has " + std::to_string(v.size()) + " modes, noise spec has " +
                            std::to_string(modes));
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw ValidationError("control value is not finite");
    }
  }
  if (t_end + 1e-9 * std::max(1.0, horizon) < horizon) {
    throw ValidationError("control time grid ends at " + std::to_string(t_end) + " before t_end = " +
                          std::to_string(horizon));
  }
}

// ---------------------------------------------------------------- config

int SolverConfig::default_sobolev_index(int dimension) { return (dimension + 1) / 2 + 2; }

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be nonnegative");
  if (t_end > 0.0 && dt > t_end * (1.0 + 1e-12)) throw ValidationError("dt must not exceed t_end");
  if (!(viscosity > 0.0)) throw ValidationError("viscosity must be positive");
  if (!(cutoff_R >= 0.0) || !std::isfinite(cutoff_R)) throw ValidationError("cutoff_R must be nonnegative");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be nonnegative");
  if (sobolev_index < 0 || sobolev_index > 15) throw ValidationError("sobolev index must lie in [0, 15]");
  if (galerkin_modes && *galerkin_modes < 0) throw ValidationError("galerkin_modes must be nonnegative");
  if (noise_substeps < 1) throw ValidationError("noise substeps must be >= 1");
  if (control) control->validate(spec.size(), t_end);
  if (stopping && diagnostics != DiagnosticsLevel::full) {
    throw ValidationError("stopping rules need full diagnostics");
  }
  if (stopping && stopping->kind == StopKind::gamma_R && grid.dimension() != 2) {
    throw DimensionError("the gamma_R stopping rule is 2D only");
  }
  if (noise.kind != NoiseKind::off) spec.check_grid(grid);
}

std::size_t SolverConfig::step_count() const {
  return static_cast<std::size_t>(std::floor(t_end / dt + 0.5));
}

// ---------------------------------------------------------------- cutoff

double cutoff(double x, double R) {
  if (!(R > 0.0)) throw ValidationError("cutoff needs R > 0");
  if (x <= R) return 1.0;
  if (x >= 2.0 * R) return 0.0;
  auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = g((2.0 * R - x) / R);
  const double b = g((x - R) / R);
  return a / (a + b);
}

// ---------------------------------------------------------------- stepper

namespace {

using Coeffs = std::vector<std::vector<cplx>>;

std::vector<std::span<cplx>> spans_of(Coeffs& c) { return {c.begin(), c.end()}; }

// dealiased pseudo-spectral (u . grad) u
Coeffs advective_term(const VectorField& u) {
  const Grid& g = u.grid();
  const int d = g.dimension();
  const std::size_t size = g.size();
  Coeffs ud(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> up(static_cast<std::size_t>(d), std::vector<double>(size));
  for (int a = 0; a < d; ++a) {
    auto c = u[a].spectral();
    ud[a].assign(c.begin(), c.end());
    kernels::dealias(g, ud[a]);
    g.inverse(ud[a], up[a]);
  }
  Coeffs out(static_cast<std::size_t>(d), std::vector<cplx>(size));
  std::vector<cplx> dc(size);
  std::vector<double> dp(size);
  std::vector<double> prod(size);
  for (int a = 0; a < d; ++a) {
    std::fill(prod.begin(), prod.end(), 0.0);
    for (int b = 0; b < d; ++b) {
      kernels::derivative(g, ud[a], dc, b);
      g.inverse(dc, dp);
      const auto& ub = up[b];
      for (std::size_t i = 0; i < size; ++i) prod[i] += ub[i] * dp[i];
    }
    g.forward(prod, out[a]);
    kernels::dealias(g, out[a]);
    kernels::zero_nyquist(g, out[a]);
  }
  return out;
}

VectorField to_vector(const Grid& g, Coeffs&& c) {
  std::vector<ScalarField> comps;
  for (auto& v : c) comps.push_back(ScalarField::from_spectral(g, std::move(v)));
  return VectorField(std::move(comps));
}

double max_abs(std::span<const cplx> c) {
  double m = 0.0;
  for (const auto& v : c) {
    const double a = std::norm(v);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return std::sqrt(m);
}

double max_abs(std::span<const double> c) {
  double m = 0.0;
  for (double v : c) {
    const double a = std::abs(v);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

}  // namespace

Stepper::Stepper(SolverConfig config) : config_(std::move(config)) {
  config_.validate();
  noise_ = NoiseOperator(config_.grid, config_.spec, config_.noise);
}

double Stepper::phi(const State& state) const {
  if (config_.cutoff_R == 0.0) return 1.0;
  return cutoff(gradient_sup(state.u), config_.cutoff_R);
}

namespace {

Coeffs drift_coeffs(const Stepper& st, const State& state, double phi) {
  const SolverConfig& cfg = st.config();
  const Grid& g = cfg.grid;
  const int d = g.dimension();
  const std::size_t size = g.size();
  Coeffs drift;
  if (cfg.nonlinear && phi != 0.0) {
    drift = advective_term(state.u);
    for (auto& comp : drift) {
      for (auto& v : comp) v *= -phi;
    }
  } else {
    drift.assign(static_cast<std::size_t>(d), std::vector<cplx>(size, cplx{}));
  }
  {
    auto th = state.theta.spectral();
    auto& target = drift[static_cast<std::size_t>(cfg.buoyancy_axis())];
    for (std::size_t i = 0; i < size; ++i) target[i] += th[i];
    kernels::zero_nyquist(g, target);
  }
  if (cfg.control) {
    auto spans = spans_of(drift);
    // control enters before the projection, which is idempotent on it
    st.noise_operator().accumulate(state.u, state.theta, cfg.control->at(state.t), state.t, 1.0, spans);
  }
  auto spans = spans_of(drift);
  kernels::leray(g, spans);
  if (cfg.galerkin_modes) {
    for (auto& comp : drift) kernels::galerkin(g, comp, *cfg.galerkin_modes);
  }
  return drift;
}

}  // namespace

MomentumDrift Stepper::momentum_rhs(const State& state) const {
  const double p = phi(state);
  return {to_vector(config_.grid, drift_coeffs(*this, state, p)), p};
}

VectorField Stepper::control_field(const State& state, double t) const {
  const Grid& g = config_.grid;
  Coeffs c(static_cast<std::size_t>(g.dimension()), std::vector<cplx>(g.size(), cplx{}));
  if (config_.control) {
    auto spans = spans_of(c);
    noise_.accumulate(state.u, state.theta, config_.control->at(t), t, 1.0, spans);
    if (config_.galerkin_modes) {
      for (auto& comp : c) kernels::galerkin(g, comp, *config_.galerkin_modes);
    }
  }
  return to_vector(g, std::move(c));
}

StepInfo Stepper::step(State& state, const RandomStream* stream, std::uint64_t m) const {
  if (config_.epsilon > 0.0 && noise_.active()) {
    if (stream == nullptr) throw ValidationError("a noisy step needs a random stream");
    const NoiseIncrement inc = sample_increment(config_.spec, config_.dt, *stream, m, config_.noise_substeps);
    return step_with_increment(state, inc.dW, m);
  }
  return step_with_increment(state, {}, m);
}

StepInfo Stepper::step_with_increment(State& state, std::span<const double> dW, std::uint64_t m) const {
  const Grid& g = config_.grid;
  const int d = g.dimension();
  const std::size_t size = g.size();
  const double dt = config_.dt;
  const double p = phi(state);
  StepInfo info;
  info.phi = p;

  Coeffs rhs = drift_coeffs(*this, state, p);
  for (int a = 0; a < d; ++a) {
    auto uc = state.u[a].spectral();
    auto& r = rhs[a];
    for (std::size_t i = 0; i < size; ++i) r[i] = uc[i] + dt * r[i];
  }
  if (config_.epsilon > 0.0 && noise_.active() && !dW.empty()) {
    Coeffs nz(static_cast<std::size_t>(d), std::vector<cplx>(size, cplx{}));
    auto spans = spans_of(nz);
    noise_.accumulate(state.u, state.theta, dW, state.t, std::sqrt(config_.epsilon), spans);
    for (int a = 0; a < d; ++a) {
      if (config_.galerkin_modes) kernels::galerkin(g, nz[a], *config_.galerkin_modes);
      for (std::size_t i = 0; i < size; ++i) rhs[a][i] += nz[a][i];
    }
  }
  for (auto& r : rhs) kernels::implicit_diffusion(g, r, dt * config_.viscosity);

  if (config_.nonlinear && p != 0.0) {
    AdvectResult adv = [&] {
      if (p == 1.0) return advect(state.theta, state.u, dt, config_.advection);
      VectorField scaled = state.u;
      for (int a = 0; a < d; ++a) {
        auto& c = scaled[a].spectral_mut();
        for (auto& v : c) v *= p;
      }
      return advect(state.theta, scaled, dt, config_.advection);
    }();
    state.theta = std::move(adv.theta);
    info.cfl_warning = adv.cfl_warning;
  }
  state.u = to_vector(g, std::move(rhs));
  state.t = static_cast<double>(m + 1) * dt;

  double umax = 0.0;
  for (int a = 0; a < d; ++a) umax = std::max(umax, max_abs(state.u[a].spectral()));
  if (!(umax <= config_.blowup_limit)) throw BlowUpError("u", umax, state.t);
  const double tmax =
      state.theta.physical_clean() ? max_abs(state.theta.physical()) : max_abs(state.theta.spectral());
  if (!(tmax <= config_.blowup_limit)) throw BlowUpError("theta", tmax, state.t);
  return info;
}

// ---------------------------------------------------------------- run

State make_state(VectorField u, ScalarField theta, double t) {
  if (u.grid() != theta.grid()) throw ValidationError("u and theta live on different grids");
  return State(t, leray_project(u), std::move(theta));
}

State prepare_initial(const State& initial, const SolverConfig& config) {
  if (initial.grid() != config.grid || initial.u.grid() != config.grid) {
    throw ValidationError("initial state grid does not match the configuration");
  }
  if (initial.u.dimension() != config.grid.dimension()) throw ValidationError("initial velocity dimension");
  State s = initial;
  s.t = 0.0;
  if (config.galerkin_modes) s.u = galerkin_project(s.u, *config.galerkin_modes);
  const double div = max_divergence_mode(s.u);
  if (div > 1e-10 * (1.0 + sobolev_norm(s.u, 1))) {
    throw ValidationError("initial velocity is not divergence-free (max |k.u_k| = " + std::to_string(div) + ")");
  }
  return s;
}

DiagnosticRow compute_row(const State& state, const SolverConfig& config, DiagnosticsLevel level, double phi) {
  DiagnosticRow row;
  row.t = state.t;
  row.phi_value = phi;
  if (level == DiagnosticsLevel::none) return row;
  const Grid& g = state.grid();
  const int d = g.dimension();
  const int s = config.sobolev_index;
  const int cap = std::max(kDefaultSobolevCap, s + 1);
  double l2 = 0.0;
  double grad2 = 0.0;
  const auto& k2 = g.k_squared_table();
  for (int a = 0; a < d; ++a) {
    auto c = state.u[a].spectral();
    l2 += kernels::l2_squared(g, c);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!g.is_nyquist(i)) acc += k2[i] * std::norm(c[i]);
    }
    grad2 += g.volume() * acc;
  }
  row.l2_u = std::sqrt(l2);
  row.grad_l2_u = std::sqrt(grad2);
  row.hs_u = sobolev_norm(state.u, s, cap);
  row.hs1_u = sobolev_norm(state.u, s + 1, cap);
  row.hs_theta = sobolev_norm(state.theta, s, cap);
  row.buoyancy_work = l2_inner(state.theta, state.u[config.buoyancy_axis()]);
  row.linf_theta = lp_norm(state.theta, std::numeric_limits<double>::infinity());
  if (config.control) {
    double h2 = 0.0;
    for (double v : config.control->at(state.t)) h2 += v * v;
    row.h_norm = std::sqrt(h2);
  }
  if (level == DiagnosticsLevel::light) return row;
  const double inf = std::numeric_limits<double>::infinity();
  row.linf_grad_u = gradient_sup(state.u);
  row.linf_grad_theta = gradient_sup(state.theta);
  row.linf_u = lp_norm(state.u, inf);
  if (d == 2) {
    const ScalarField w = perp_div_2d(state.u);
    row.l2_w = lp_norm(w, 2.0);
    row.l4_w = lp_norm(w, 4.0);
    const VectorField gw = gradient(w);
    row.l2_grad_w = lp_norm(gw, 2.0);
    row.l4_grad_w = lp_norm(gw, 4.0);
  }
  return row;
}

namespace {

// trapezoid energy identity over one step
double energy_residual(const DiagnosticRow& a, const DiagnosticRow& b, double nu, double dt) {
  const double du = b.l2_u * b.l2_u - a.l2_u * a.l2_u;
  const double diss = nu * dt * (a.grad_l2_u * a.grad_l2_u + b.grad_l2_u * b.grad_l2_u);
  const double work = dt * (a.buoyancy_work + b.buoyancy_work);
  return du + diss - work - 2.0 * dt * b.control_work;
}

}  // namespace

TrajectoryRecord run(const Stepper& stepper, const State& initial, const RandomStream* stream,
                     const std::vector<StepObserver>& observers) {
  const SolverConfig& cfg = stepper.config();
  const DiagnosticsLevel level = cfg.diagnostics;
  const bool with_cutoff = cfg.cutoff_R > 0.0;
  TrajectoryRecord rec;
  rec.epsilon = cfg.epsilon;
  rec.viscosity = cfg.viscosity;
  rec.dt = cfg.dt;
  rec.controlled = cfg.control.has_value();

  State state = prepare_initial(initial, cfg);
  auto row_for = [&](const State& s) {
    DiagnosticRow row = compute_row(s, cfg, level, 1.0);
    if (with_cutoff) {
      row.phi_value = std::isnan(row.linf_grad_u) ? stepper.phi(s) : cutoff(row.linf_grad_u, cfg.cutoff_R);
    }
    return row;
  };
  auto notify = [&](const State& s, const DiagnosticRow& row) {
    for (const auto& obs : observers) obs(s, row);
  };

  std::optional<StopMonitor> monitor;
  if (cfg.stopping) monitor.emplace(*cfg.stopping);

  DiagnosticRow current = row_for(state);
  if (level != DiagnosticsLevel::none) rec.rows.push_back(current);
  notify(state, current);
  if (monitor && monitor->push(rec.rows)) {
    rec.rows.back().stop_flag = true;
    rec.stop_reason = cfg.stopping->name();
    rec.stop_time = state.t;
    rec.final_state = state;
    return rec;
  }

  const std::size_t n_steps = cfg.step_count();
  for (std::size_t m = 0; m < n_steps; ++m) {
    double work_pre = 0.0;
    std::optional<VectorField> control_field;
    if (cfg.control && level != DiagnosticsLevel::none) {
      control_field = stepper.control_field(state, state.t);
      work_pre = l2_inner(*control_field, state.u);
    }
    State before = state;
    StepInfo info;
    try {
      info = stepper.step(state, stream, m);
    } catch (const BlowUpError& e) {
      rec.blew_up = true;
      rec.stop_reason = "blow_up";
      rec.blowup_diagnostic = e.diagnostic();
      rec.stop_time = e.time();
      DiagnosticRow terminal;
      terminal.t = e.time();
      terminal.phi_value = info.phi;
      terminal.energy_residual = kNaN;
      terminal.stop_flag = true;
      if (level != DiagnosticsLevel::none) rec.rows.push_back(terminal);
      rec.final_state = std::move(before);
      return rec;
    }
    DiagnosticRow next = row_for(state);
    next.cfl_warning = info.cfl_warning;
    if (level != DiagnosticsLevel::none) {
      if (control_field) next.control_work = 0.5 * (work_pre + l2_inner(*control_field, state.u));
      next.energy_residual = energy_residual(current, next, cfg.viscosity, cfg.dt);
      rec.rows.push_back(next);
    }
    notify(state, next);
    current = next;
    if (monitor && monitor->push(rec.rows)) {
      rec.rows.back().stop_flag = true;
      rec.stop_reason = cfg.stopping->name();
      rec.stop_time = state.t;
      break;
    }
  }
  rec.final_state = std::move(state);
  return rec;
}

TrajectoryRecord run(const SolverConfig& config, const State& initial, const RandomStream* stream,
                     const std::vector<StepObserver>& observers) {
  const Stepper stepper(config);
  return run(stepper, initial, stream, observers);
}

// ---------------------------------------------------------------- ensembles

std::vector<TrajectoryFunctional> default_functionals() {
  std::vector<TrajectoryFunctional> fns;
  fns.push_back({"terminal_l2_u_sq", [](const TrajectoryRecord& r) {
                   if (!r.final_state) return kNaN;
                   const double v = lp_norm(r.final_state->u, 2.0);
                   return v * v;
                 }});
  fns.push_back({"sup_l2_u_sq", [](const TrajectoryRecord& r) {
                   if (r.rows.empty()) return kNaN;
                   double m = 0.0;
                   for (const auto& row : r.rows) {
                     if (std::isfinite(row.l2_u)) m = std::max(m, row.l2_u * row.l2_u);
                   }
                   return m;
                 }});
  fns.push_back({"sup_linf_grad_u", [](const TrajectoryRecord& r) {
                   if (r.rows.empty()) return kNaN;
                   double m = 0.0;
                   for (const auto& row : r.rows) {
                     if (std::isnan(row.linf_grad_u)) continue;
                     m = std::max(m, row.linf_grad_u);
                   }
                   return m;
                 }});
  fns.push_back({"terminal_linf_theta", [](const TrajectoryRecord& r) {
                   if (!r.final_state) return kNaN;
                   return lp_norm(r.final_state->theta, std::numeric_limits<double>::infinity());
                 }});
  return fns;
}

const FunctionalSummary& EnsembleSummary::get(const std::string& name) const {
  for (const auto& f : functionals) {
    if (f.name == name) return f;
  }
  throw ValidationError("ensemble has no functional named '" + name + "'");
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> parallel_map(std::size_t count, const std::function<double(std::size_t)>& fn,
                                 unsigned threads) {
  std::vector<double> out(count, 0.0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

EnsembleSummary run_ensemble(const SolverConfig& config, const State& initial, std::size_t n_paths,
                             std::uint64_t master_seed, const std::vector<TrajectoryFunctional>& functionals,
                             unsigned threads) {
  if (n_paths < 1) throw ValidationError("ensemble needs n_paths >= 1");
  const Stepper stepper(config);
  const State start = prepare_initial(initial, config);
  start.u.sync();
  start.theta.sync();
  const std::size_t nf = functionals.size();
  std::vector<std::vector<double>> per_path(n_paths);
  std::vector<char> blown(n_paths, 0);
  parallel_map(
      n_paths,
      [&](std::size_t p) {
        const RandomStream stream(master_seed, p);
        State local = start;
        const TrajectoryRecord rec = run(stepper, local, &stream);
        std::vector<double> vals(nf);
        for (std::size_t f = 0; f < nf; ++f) vals[f] = functionals[f].evaluate(rec);
        per_path[p] = std::move(vals);
        blown[p] = rec.blew_up ? 1 : 0;
        return 0.0;
      },
      threads);

  EnsembleSummary summary;
  summary.n_paths = n_paths;
  summary.blown_up = static_cast<std::size_t>(std::count(blown.begin(), blown.end(), 1));
  summary.values.assign(nf, std::vector<double>(n_paths));
  for (std::size_t f = 0; f < nf; ++f) {
    auto& col = summary.values[f];
    for (std::size_t p = 0; p < n_paths; ++p) col[p] = per_path[p][f];
    const double n = static_cast<double>(n_paths);
    const double mean = pairwise_sum(col) / n;
    std::vector<double> dev(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) dev[p] = (col[p] - mean) * (col[p] - mean);
    FunctionalSummary fs;
    fs.name = functionals[f].name;
    fs.mean = mean;
    fs.variance = n_paths > 1 ? pairwise_sum(dev) / (n - 1.0) : 0.0;
    fs.max = *std::max_element(col.begin(), col.end());
    summary.functionals.push_back(std::move(fs));
  }
  return summary;
}

}  // namespace sbsim
