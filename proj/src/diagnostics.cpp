#include "sbsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbsim/error.hpp"
#include "sbsim/spectral.hpp"

namespace sbsim {

namespace {

void require_2d(const Grid& g, const char* what) {
  if (g.dimension() != 2) throw DimensionError(std::string(what) + " is defined in 2D only");
}

}  // namespace

ScalarField curl_2d(const VectorField& u) {
  require_2d(u.grid(), "curl_2d");
  return perp_div_2d(u);
}

VectorField biot_savart(const ScalarField& w) {
  const Grid& g = w.grid();
  require_2d(g, "biot_savart");
  auto c = w.spectral();
  const double mean = std::abs(c[0]);
  const double norm = std::sqrt(kernels::l2_squared(g, c));
  if (mean > 1e-12 * norm) {
    throw ValidationError("biot_savart needs mean-free vorticity (|w_hat(0)| = " + std::to_string(mean) + ")");
  }
  const auto& k2 = g.k_squared_table();
  std::vector<cplx> u1(g.size()), u2(g.size());
  const cplx I{0.0, 1.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == 0 || g.is_nyquist(i)) continue;
    const cplx psi = -c[i] / k2[i];
    u1[i] = -I * g.k_component(i, 1) * psi;
    u2[i] = I * g.k_component(i, 0) * psi;
  }
  std::vector<ScalarField> comps;
  comps.push_back(ScalarField::from_spectral(g, std::move(u1)));
  comps.push_back(ScalarField::from_spectral(g, std::move(u2)));
  return VectorField(std::move(comps));
}

double embedding_ratio(const VectorField& u) {
  require_2d(u.grid(), "embedding_ratio");
  const double num = gradient_sup(u);
  double grad2 = 0.0;
  for (int a = 0; a < 2; ++a) {
    const VectorField gu = gradient(u[a]);
    const double n = lp_norm(gu, 2.0);
    grad2 += n * n;
  }
  const double den = std::sqrt(grad2) + lp_norm(gradient(curl_2d(u)), 4.0);
  return den > 0.0 ? num / den : 0.0;
}

GronwallRecord gronwall_record(const State& state, const SolverConfig& config) {
  const Grid& g = state.grid();
  require_2d(g, "gronwall_record");
  const double inf = std::numeric_limits<double>::infinity();
  GronwallRecord r;
  r.t = state.t;
  const ScalarField w = curl_2d(state.u);
  const VectorField gw = gradient(w);
  const double gw4 = lp_norm(gw, 4.0);
  const double gt4 = lp_norm(gradient(state.theta), 4.0);
  r.Y = 1.0 + std::pow(gw4, 4) + std::pow(gt4, 4);
  const double uinf = lp_norm(state.u, inf);
  r.g = 1.0 + uinf * uinf + lp_norm(w, 2.0) + lp_norm(gw, 2.0);
  if (config.control) {
    double h2 = 0.0;
    for (double v : config.control->at(state.t)) h2 += v * v;
    r.g += std::sqrt(h2);
  }

  // mode-wise l2 aggregate of grad curl (f e_k) sqrt(lambda_k)
  double w04 = 0.0;
  const NoiseOperator op(g, config.spec, config.noise);
  if (op.active()) {
    std::vector<double> agg(g.size(), 0.0);
    std::vector<double> coeffs(config.spec.size(), 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      std::fill(coeffs.begin(), coeffs.end(), 0.0);
      coeffs[j] = 1.0;
      const VectorField fe = op.evaluate(state.u, state.theta, coeffs, state.t);
      const VectorField gc = gradient(curl_2d(fe));
      for (int a = 0; a < 2; ++a) {
        auto p = gc[a].physical();
        for (std::size_t i = 0; i < agg.size(); ++i) agg[i] += p[i] * p[i];
      }
    }
    for (auto& v : agg) v = std::sqrt(v);
    w04 = lp_norm(ScalarField::from_physical(g, std::move(agg)), 4.0);
  }
  r.sigma = std::pow(1.0 + w04, 4);
  r.Z_bound = (1.0 + w04) * std::pow(r.Y, 0.75);

  // Int |grad^2 w|^2 |grad w|^2
  std::vector<double> hess(g.size(), 0.0);
  for (int a = 0; a < 2; ++a) {
    const VectorField h = gradient(gw[a]);
    for (int b = 0; b < 2; ++b) {
      auto p = h[b].physical();
      for (std::size_t i = 0; i < hess.size(); ++i) hess[i] += p[i] * p[i];
    }
  }
  double acc = 0.0;
  auto g0 = gw[0].physical();
  auto g1 = gw[1].physical();
  for (std::size_t i = 0; i < hess.size(); ++i) acc += hess[i] * (g0[i] * g0[i] + g1[i] * g1[i]);
  r.hessian_term = acc * g.volume() / static_cast<double>(g.size());
  return r;
}

// ---------------------------------------------------------------- stopping

std::string StoppingRule::name() const {
  switch (kind) {
    case StopKind::tau_R: return "tau_R";
    case StopKind::gamma_R: return "gamma_R";
    case StopKind::custom: return "custom";
  }
  return "custom";
}

StopMonitor::StopMonitor(StoppingRule rule) : rule_(std::move(rule)) {
  if (rule_.kind == StopKind::custom && !rule_.functional) {
    throw ValidationError("custom stopping rule needs a functional");
  }
}

bool StopMonitor::push(const std::vector<DiagnosticRow>& history) {
  if (history.empty()) return false;
  const std::size_t m = history.size() - 1;
  const DiagnosticRow& row = history[m];
  if (m > 0 && rule_.kind == StopKind::gamma_R) {
    // left endpoint: the integrand at t_{m-1} covers [t_{m-1}, t_m]
    const DiagnosticRow& prev = history[m - 1];
    const double dt = row.t - prev.t;
    integral_ += dt * prev.l2_grad_w;
    if (rule_.include_control) integral_ += dt * prev.h_norm;
  }
  switch (rule_.kind) {
    case StopKind::tau_R: value_ = row.linf_grad_u; break;
    case StopKind::gamma_R: value_ = row.l2_w + row.l4_w + integral_; break;
    case StopKind::custom: value_ = rule_.functional(history, m); break;
  }
  running_ = std::max(running_, value_);
  return value_ > rule_.threshold || std::isnan(value_);
}

std::vector<double> stopping_functional(const std::vector<DiagnosticRow>& history, const StoppingRule& rule) {
  StopMonitor mon(rule);
  std::vector<double> out;
  std::vector<DiagnosticRow> prefix;
  prefix.reserve(history.size());
  for (const auto& row : history) {
    prefix.push_back(row);
    mon.push(prefix);
    out.push_back(mon.value());
  }
  return out;
}

std::vector<double> running_functional(const std::vector<DiagnosticRow>& history, const StoppingRule& rule) {
  std::vector<double> raw = stopping_functional(history, rule);
  for (std::size_t i = 1; i < raw.size(); ++i) raw[i] = std::max(raw[i], raw[i - 1]);
  return raw;
}

std::optional<double> check_stopping(const std::vector<DiagnosticRow>& history, const StoppingRule& rule) {
  const std::vector<double> raw = stopping_functional(history, rule);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] > rule.threshold || std::isnan(raw[i])) return history[i].t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- energy

std::vector<double> energy_budget(const TrajectoryRecord& record) {
  if (record.epsilon > 0.0) {
    throw ValidationError("energy_budget is only defined for deterministic runs (epsilon = 0)");
  }
  std::vector<double> out;
  const double nu = record.viscosity;
  for (std::size_t m = 0; m + 1 < record.rows.size(); ++m) {
    const DiagnosticRow& a = record.rows[m];
    const DiagnosticRow& b = record.rows[m + 1];
    const double dt = b.t - a.t;
    out.push_back(b.l2_u * b.l2_u - a.l2_u * a.l2_u +
                  nu * dt * (a.grad_l2_u * a.grad_l2_u + b.grad_l2_u * b.grad_l2_u) -
                  dt * (a.buoyancy_work + b.buoyancy_work) - 2.0 * dt * b.control_work);
  }
  return out;
}

// ---------------------------------------------------------------- vorticity form

namespace {

std::vector<cplx> copy_spectral(const ScalarField& f) {
  auto c = f.spectral();
  return {c.begin(), c.end()};
}

// dealiased u . grad w
std::vector<cplx> transport_term(const VectorField& u, std::span<const cplx> w) {
  const Grid& g = u.grid();
  const std::size_t size = g.size();
  std::vector<cplx> wd(w.begin(), w.end());
  kernels::dealias(g, wd);
  std::vector<double> prod(size, 0.0), up(size), dp(size);
  std::vector<cplx> tmp(size), dc(size);
  for (int a = 0; a < 2; ++a) {
    auto c = u[a].spectral();
    tmp.assign(c.begin(), c.end());
    kernels::dealias(g, tmp);
    g.inverse(tmp, up);
    kernels::derivative(g, wd, dc, a);
    g.inverse(dc, dp);
    for (std::size_t i = 0; i < size; ++i) prod[i] += up[i] * dp[i];
  }
  std::vector<cplx> out(size);
  g.forward(prod, out);
  kernels::dealias(g, out);
  kernels::zero_nyquist(g, out);
  return out;
}

}  // namespace

VorticityConsistency vorticity_consistency(const SolverConfig& config, const State& initial,
                                           const RandomStream* stream) {
  const Grid& g = config.grid;
  require_2d(g, "vorticity_consistency");
  const Stepper stepper(config);
  const NoiseOperator& op = stepper.noise_operator();
  const bool noisy = config.epsilon > 0.0 && op.active();
  if (noisy && stream == nullptr) throw ValidationError("a noisy comparison needs a random stream");
  const double dt = config.dt;
  const double sq_eps = std::sqrt(config.epsilon);
  const std::size_t size = g.size();
  const auto& k2 = g.k_squared_table();
  std::vector<double> decay(size);
  for (std::size_t i = 0; i < size; ++i) decay[i] = std::exp(-config.viscosity * dt * k2[i]);

  State primal = prepare_initial(initial, config);
  std::vector<cplx> w = copy_spectral(curl_2d(primal.u));
  ScalarField theta = primal.theta;
  std::array<double, 2> mean{primal.u[0].spectral()[0].real(), primal.u[1].spectral()[0].real()};

  auto velocity = [&]() {
    VectorField u = biot_savart(ScalarField::from_spectral(g, w));
    for (int a = 0; a < 2; ++a) u[a].spectral_mut()[0] = mean[static_cast<std::size_t>(a)];
    return u;
  };
  auto record = [&](VorticityConsistency& out, double t) {
    auto pc = copy_spectral(curl_2d(primal.u));
    for (std::size_t i = 0; i < size; ++i) pc[i] -= w[i];
    const double gap = std::sqrt(kernels::l2_squared(g, pc));
    const double mg = std::hypot(primal.u[0].spectral()[0].real() - mean[0],
                                 primal.u[1].spectral()[0].real() - mean[1]);
    out.t.push_back(t);
    out.gap.push_back(gap);
    out.mean_gap.push_back(mg);
    out.sup_gap = std::max(out.sup_gap, gap);
    out.sup_mean_gap = std::max(out.sup_mean_gap, mg);
  };

  VorticityConsistency out;
  record(out, 0.0);
  const std::size_t n_steps = config.step_count();
  for (std::size_t m = 0; m < n_steps; ++m) {
    const double t = static_cast<double>(m) * dt;
    std::vector<double> dW;
    if (noisy) dW = sample_increment(config.spec, dt, *stream, m, config.noise_substeps).dW;

    State vs(t, velocity(), theta);
    const double phi = stepper.phi(vs);
    std::vector<cplx> drift(size, cplx{});
    if (config.nonlinear && phi != 0.0) {
      const auto adv = transport_term(vs.u, w);
      for (std::size_t i = 0; i < size; ++i) drift[i] = -phi * adv[i];
    }
    {
      std::vector<cplx> dth(size);
      kernels::derivative(g, theta.spectral(), dth, 0);
      for (std::size_t i = 0; i < size; ++i) drift[i] += dth[i];
    }
    std::array<double, 2> mean_rate{0.0, theta.spectral()[0].real()};
    if (config.control) {
      const VectorField f = stepper.control_field(vs, t);
      const auto cf = copy_spectral(curl_2d(f));
      for (std::size_t i = 0; i < size; ++i) drift[i] += cf[i];
      for (int a = 0; a < 2; ++a) mean_rate[static_cast<std::size_t>(a)] += f[a].spectral()[0].real();
    }
    if (config.galerkin_modes) kernels::galerkin(g, drift, *config.galerkin_modes);
    std::vector<cplx> noise(size, cplx{});
    std::array<double, 2> mean_noise{0.0, 0.0};
    if (noisy) {
      VectorField nz = op.evaluate(vs.u, theta, dW, t);
      if (config.galerkin_modes) nz = galerkin_project(nz, *config.galerkin_modes);
      noise = copy_spectral(curl_2d(nz));
      for (int a = 0; a < 2; ++a) mean_noise[static_cast<std::size_t>(a)] = nz[a].spectral()[0].real();
    }
    for (std::size_t i = 0; i < size; ++i) w[i] = decay[i] * (w[i] + dt * drift[i] + sq_eps * noise[i]);
    for (std::size_t a = 0; a < 2; ++a) mean[a] += dt * mean_rate[a] + sq_eps * mean_noise[a];
    if (config.nonlinear && phi != 0.0) {
      VectorField adv_u = vs.u;
      if (phi != 1.0) {
        for (int a = 0; a < 2; ++a) {
          for (auto& v : adv_u[a].spectral_mut()) v *= phi;
        }
      }
      theta = advect(theta, adv_u, dt, config.advection).theta;
    }

    stepper.step_with_increment(primal, dW, m);
    record(out, primal.t);
  }
  return out;
}

}  // namespace sbsim
