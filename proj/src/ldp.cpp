#include "sbsim/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbsim/error.hpp"
#include "sbsim/spectral.hpp"

namespace sbsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double RareEvent::margin(const TrajectoryRecord& record) const {
  const double f = functional.evaluate(record);
  if (std::isnan(f)) return -kInf;
  return direction == EventDirection::at_least ? f - threshold : threshold - f;
}

TrajectoryFunctional mode_amplitude(const NoiseMode& mode, const std::array<double, 3>& direction) {
  const std::string name = "mode_amplitude";
  return {name, [mode, direction](const TrajectoryRecord& r) {
            if (!r.final_state) return kNaN;
            const VectorField& u = r.final_state->u;
            const Grid& g = u.grid();
            const std::size_t idx = g.index_of(mode.k);
            cplx proj{};
            for (int a = 0; a < u.dimension(); ++a) proj += direction[static_cast<std::size_t>(a)] * u[a].spectral()[idx];
            switch (mode.tag) {
              case BasisTag::constant: return proj.real();
              case BasisTag::cos: return 2.0 * proj.real();
              case BasisTag::sin: return -2.0 * proj.imag();
            }
            return kNaN;
          }};
}

TrajectoryFunctional sup_l2_norm() {
  return {"sup_l2_u", [](const TrajectoryRecord& r) {
            if (r.rows.empty()) return kNaN;
            double m = 0.0;
            for (const auto& row : r.rows) {
              if (std::isnan(row.l2_u)) return kNaN;
              m = std::max(m, row.l2_u);
            }
            return m;
          }};
}

double control_cost(const Control& h, const QWienerSpec& spec) {
  h.validate(spec.size(), h.t_end);
  return 0.5 * h.squared_norm();
}

double control_cost(const Control& h, const QWienerSpec& spec, double horizon) {
  if (std::abs(h.t_end - horizon) > 1e-9 * std::max(1.0, horizon)) {
    throw ValidationError("control time grid ends at " + std::to_string(h.t_end) + ", horizon is " +
                          std::to_string(horizon));
  }
  return control_cost(h, spec);
}

TrajectoryRecord solve_skeleton(const SolverConfig& config, const State& initial, const Control& h) {
  if (config.grid.dimension() != 2) throw DimensionError("solve_skeleton is defined in 2D only");
  SolverConfig cfg = config;
  cfg.epsilon = 0.0;
  cfg.control = h;
  return run(cfg, initial, nullptr);
}

McEstimate binomial_estimate(std::size_t hits, std::size_t n) {
  if (n == 0) throw ValidationError("binomial estimate needs n > 0");
  McEstimate e;
  e.hits = hits;
  e.n_paths = n;
  const double nn = static_cast<double>(n);
  e.p_hat = static_cast<double>(hits) / nn;
  if (hits == 0) {
    e.ci_low = 0.0;
    e.ci_high = std::min(1.0, 3.0 / nn);
  } else if (hits == n) {
    e.ci_low = std::max(0.0, 1.0 - 3.0 / nn);
    e.ci_high = 1.0;
  } else {
    const double half = 1.959963984540054 * std::sqrt(e.p_hat * (1.0 - e.p_hat) / nn);
    e.ci_low = std::max(0.0, e.p_hat - half);
    e.ci_high = std::min(1.0, e.p_hat + half);
  }
  return e;
}

McEstimate mc_rare_event(const SolverConfig& config, const State& initial, const RareEvent& event,
                         double epsilon, std::size_t n_paths, std::uint64_t master_seed, unsigned threads) {
  if (n_paths < 100) throw ValidationError("mc_rare_event needs n_paths >= 100");
  SolverConfig cfg = config;
  cfg.epsilon = epsilon;
  const Stepper stepper(cfg);
  const State start = prepare_initial(initial, cfg);
  start.u.sync();
  start.theta.sync();
  const std::vector<double> hit = parallel_map(
      n_paths,
      [&](std::size_t p) {
        const RandomStream stream(master_seed, p);
        const TrajectoryRecord rec = run(stepper, start, &stream);
        return event.occurs(rec) ? 1.0 : 0.0;
      },
      threads);
  const auto hits = static_cast<std::size_t>(std::llround(pairwise_sum(hit)));
  return binomial_estimate(hits, n_paths);
}

SmallNoiseEstimate small_noise_distance(const SolverConfig& config, const State& initial, double epsilon,
                                        std::size_t n_paths, std::uint64_t master_seed, unsigned threads) {
  if (n_paths < 2) throw ValidationError("small_noise_distance needs n_paths >= 2");
  if (!(epsilon > 0.0)) throw ValidationError("small_noise_distance needs epsilon > 0");
  SolverConfig cfg = config;
  cfg.diagnostics = DiagnosticsLevel::none;
  cfg.epsilon = 0.0;
  const Grid& g = cfg.grid;
  const int d = g.dimension();
  const State start = prepare_initial(initial, cfg);
  start.u.sync();
  start.theta.sync();

  // reference coefficients at every recorded time
  std::vector<std::vector<cplx>> ref;
  auto flatten = [&](const State& s, std::vector<cplx>& out) {
    out.resize(static_cast<std::size_t>(d + 1) * g.size());
    auto it = out.begin();
    for (int a = 0; a < d; ++a) it = std::copy(s.u[a].spectral().begin(), s.u[a].spectral().end(), it);
    std::copy(s.theta.spectral().begin(), s.theta.spectral().end(), it);
  };
  const TrajectoryRecord base = run(Stepper(cfg), start, nullptr, {[&](const State& s, const DiagnosticRow&) {
                                      ref.emplace_back();
                                      flatten(s, ref.back());
                                    }});
  if (base.blew_up) throw BlowUpError("reference", kInf, base.stop_time.value_or(0.0));

  cfg.epsilon = epsilon;
  const Stepper stepper(cfg);
  const std::vector<double> dist = parallel_map(
      n_paths,
      [&](std::size_t p) {
        const RandomStream stream(master_seed, p);
        std::size_t m = 0;
        double sup = 0.0;
        std::vector<cplx> buf, diff;
        const TrajectoryRecord rec = run(stepper, start, &stream, {[&](const State& s, const DiagnosticRow&) {
                                           if (m >= ref.size()) return;
                                           flatten(s, buf);
                                           diff.resize(buf.size());
                                           for (std::size_t i = 0; i < buf.size(); ++i) diff[i] = buf[i] - ref[m][i];
                                           sup = std::max(sup, kernels::l2_squared(g, diff));
                                           ++m;
                                         }});
        return rec.blew_up ? kNaN : std::sqrt(sup);
      },
      threads);
  SmallNoiseEstimate e;
  e.epsilon = epsilon;
  e.n_paths = n_paths;
  std::vector<double> ok;
  for (double v : dist) {
    if (std::isnan(v)) {
      ++e.blown_up;
    } else {
      ok.push_back(v);
    }
  }
  if (ok.size() < 2) return e;
  const double n = static_cast<double>(ok.size());
  e.mean = pairwise_sum(ok) / n;
  std::vector<double> sq(ok.size());
  for (std::size_t i = 0; i < ok.size(); ++i) sq[i] = (ok[i] - e.mean) * (ok[i] - e.mean);
  e.standard_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope needs two or more matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("loglog_slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------- optimizer

namespace {

class CostSearch {
 public:
  CostSearch(const RareEvent& event, const ControlFamily& family, const SolverConfig& config, const State& initial)
      : event_(event), family_(family), config_(config), initial_(initial) {
    config_.epsilon = 0.0;
    modes_ = family.active_modes;
    if (modes_.empty()) {
      for (std::size_t j = 0; j < config.spec.size(); ++j) modes_.push_back(j);
    }
    for (auto j : modes_) {
      if (j >= config.spec.size()) throw ValidationError("control family uses a mode outside the noise spec");
    }
  }

  std::size_t dims() const { return modes_.size() * static_cast<std::size_t>(family_.blocks); }
  std::size_t solves() const { return solves_; }

  Control control(const std::vector<double>& p, double scale) const {
    const std::size_t nw = config_.spec.size();
    std::vector<double> full(nw * static_cast<std::size_t>(family_.blocks), 0.0);
    for (int b = 0; b < family_.blocks; ++b) {
      for (std::size_t q = 0; q < modes_.size(); ++q) {
        full[static_cast<std::size_t>(b) * nw + modes_[q]] = scale * p[static_cast<std::size_t>(b) * modes_.size() + q];
      }
    }
    return Control::blocks(nw, config_.t_end, family_.blocks, full);
  }

  double margin(const std::vector<double>& p, double scale) {
    ++solves_;
    try {
      return event_.margin(solve_skeleton(config_, initial_, control(p, scale)));
    } catch (const BlowUpError&) {
      return -kInf;
    }
  }

  double margin_of(const Control& h) {
    ++solves_;
    return event_.margin(solve_skeleton(config_, initial_, h));
  }

  /// Minimal feasible scale along p (infinity when none within the box).
  double min_scale(const std::vector<double>& p) {
    double pmax = 0.0;
    for (double v : p) pmax = std::max(pmax, std::abs(v));
    if (pmax == 0.0) return kInf;
    const double smax = family_.bound / pmax;
    double lo = 0.0;
    double glo = zero_margin_;
    double hi = smax;
    double ghi = margin(p, hi);
    if (!(ghi >= 0.0)) {
      // the margin need not be monotone in the scale; look for any feasible point
      bool found = false;
      for (int j = 1; j < 8 && !found; ++j) {
        const double s = smax * j / 8.0;
        const double gs = margin(p, s);
        if (gs >= 0.0) {
          hi = s;
          ghi = gs;
          found = true;
        } else {
          lo = s;
          glo = gs;
        }
      }
      if (!found) return kInf;
    }
    if (!std::isfinite(glo)) {
      lo = 0.0;
      glo = zero_margin_;
    }
    // Illinois false position, keeping the feasible end
    int side = 0;
    for (int it = 0; it < 100; ++it) {
      if (hi - lo <= 1e-13 * hi) break;
      double s = hi - ghi * (hi - lo) / (ghi - glo);
      if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
      const double gs = margin(p, s);
      if (gs >= 0.0) {
        hi = s;
        ghi = gs;
        if (side == 1) glo *= 0.5;
        side = 1;
        if (gs == 0.0) break;
      } else {
        lo = s;
        glo = gs;
        if (side == -1) ghi *= 0.5;
        side = -1;
      }
      if (std::abs(gs) <= 1e-14 * (1.0 + std::abs(event_.threshold))) {
        if (gs >= 0.0) break;
      }
    }
    return hi;
  }

  double objective(const std::vector<double>& p) {
    const double s = min_scale(p);
    if (!std::isfinite(s)) return kInf;
    double sq = 0.0;
    for (double v : p) sq += v * v;
    // equal pieces of length T / blocks
    return 0.5 * s * s * sq * config_.t_end / family_.blocks;
  }

  void set_zero_margin(double g) { zero_margin_ = g; }

 private:
  const RareEvent& event_;
  const ControlFamily& family_;
  SolverConfig config_;
  const State& initial_;
  std::vector<std::size_t> modes_;
  std::size_t solves_ = 0;
  double zero_margin_ = -1.0;
};

double golden_section(const std::function<double(double)>& f, double a, double b, double fx_at, double x_at,
                      double& best_x) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best = fx_at;
  best_x = x_at;
  auto consider = [&](double x, double fxv) {
    if (fxv < best) {
      best = fxv;
      best_x = x;
    }
  };
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < 60 && (b - a) > 1e-7; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  return best;
}

}  // namespace

CostResult minimize_cost(const RareEvent& event, const ControlFamily& family, const SolverConfig& config,
                         const State& initial) {
  if (family.blocks < 1) throw ValidationError("control family needs blocks >= 1");
  if (!(family.bound > 0.0)) throw ValidationError("control family needs a positive bound");
  if (family.restarts < 1) throw ValidationError("control family needs restarts >= 1");
  CostSearch search(event, family, config, initial);
  CostResult result;

  const Control zero = Control::zero(config.spec.size(), config.t_end);
  const double g0 = search.margin_of(zero);
  if (g0 >= 0.0) {
    result.feasible = true;
    result.control = zero;
    result.cost = 0.0;
    result.params.assign(search.dims(), 0.0);
    result.skeleton_solves = search.solves();
    result.message = "event realized by the zero control";
    return result;
  }
  search.set_zero_margin(g0);

  const std::size_t n = search.dims();
  double best = kInf;
  std::vector<double> best_p;
  for (int r = 0; r < family.restarts; ++r) {
    CounterEngine rng(family.seed, static_cast<std::uint64_t>(r), StreamTag::optimizer);
    std::vector<double> p(n);
    for (auto& v : p) v = 2.0 * rng.uniform() - 1.0;
    double fp = search.objective(p);
    for (int sweep = 0; sweep < family.max_sweeps; ++sweep) {
      const double before = fp;
      for (std::size_t i = 0; i < n; ++i) {
        const double keep = p[i];
        auto along = [&](double x) {
          p[i] = x;
          return search.objective(p);
        };
        double xbest = keep;
        const double fbest = golden_section(along, -1.0, 1.0, fp, keep, xbest);
        p[i] = xbest;
        fp = fbest;
      }
      // objective is scale invariant; renormalise so the box never binds artificially
      double pmax = 0.0;
      for (double v : p) pmax = std::max(pmax, std::abs(v));
      if (pmax > 0.0) {
        for (auto& v : p) v /= pmax;
        fp = search.objective(p);
      }
      if (std::isfinite(before) && before - fp <= family.tolerance * std::abs(before)) break;
    }
    if (fp < best) {
      best = fp;
      best_p = p;
    }
  }
  result.skeleton_solves = search.solves();
  if (!std::isfinite(best)) {
    result.feasible = false;
    result.cost = kInf;
    result.message = "no member of the control family realizes the event";
    return result;
  }
  const double s = search.min_scale(best_p);
  result.feasible = true;
  result.control = search.control(best_p, s);
  result.cost = control_cost(result.control, config.spec);
  result.params.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.params[i] = s * best_p[i];
  result.skeleton_solves = search.solves();
  result.message = "ok";
  return result;
}

VaradhanTable varadhan_gap(const SolverConfig& config, const State& initial, const RareEvent& event,
                           const std::vector<double>& epsilons, std::size_t n_paths, const ControlFamily& family,
                           std::uint64_t master_seed, unsigned threads) {
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) throw ValidationError("varadhan_gap needs a decreasing epsilon list");
  }
  VaradhanTable table;
  table.optimum = minimize_cost(event, family, config, initial);
  for (double eps : epsilons) {
    const McEstimate est = mc_rare_event(config, initial, event, eps, n_paths, master_seed, threads);
    VaradhanRow row;
    row.epsilon = eps;
    row.n_paths = n_paths;
    row.p_hat = est.p_hat;
    row.ci_low = est.ci_low;
    row.ci_high = est.ci_high;
    row.neg_eps_log_p = est.p_hat > 0.0 ? (est.p_hat == 1.0 ? 0.0 : -eps * std::log(est.p_hat)) : kInf;
    row.best_cost = table.optimum.cost;
    table.rows.push_back(row);
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].neg_eps_log_p < table.rows[i - 1].neg_eps_log_p) table.monotone = false;
  }
  return table;
}

double LinearModeOracle::variance() const {
  return b * b * (1.0 - std::exp(-2.0 * kappa * T)) / (2.0 * kappa);
}

double LinearModeOracle::minimal_cost(double a) const { return a * a / (2.0 * variance()); }

double LinearModeOracle::finite_eps_rate(double a, double eps) const {
  const double z = a / std::sqrt(eps * variance());
  const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
  return -eps * std::log(p);
}

}  // namespace sbsim
