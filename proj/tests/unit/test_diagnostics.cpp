#include "doctest.h"
#include "helpers.hpp"
#include "sbsim/diagnostics.hpp"
#include "sbsim/error.hpp"

using namespace sbsim;
using namespace testing;

namespace {

using X = std::array<double, 3>;

VectorField vec2(ScalarField a, ScalarField b) {
  std::vector<ScalarField> c;
  c.push_back(std::move(a));
  c.push_back(std::move(b));
  return VectorField(std::move(c));
}

ScalarField fn(const Grid& g, std::function<double(const X&)> f) { return ScalarField::from_function(g, f); }

SolverConfig deterministic(int n, double dt, double t_end) {
  SolverConfig c;
  c.grid = Grid(2, n);
  c.dt = dt;
  c.t_end = t_end;
  c.epsilon = 0.0;
  return c;
}

State shear(const Grid& g) {
  State s(g);
  s.u[0] = fn(g, [](const X& x) { return std::sin(x[1]); });
  return s;
}

// u = (0, (1 - e^-t) sin x1), theta = sin x1 solves the full system exactly
State buoyant_shear(const Grid& g) {
  State s(g);
  s.theta = fn(g, [](const X& x) { return std::sin(x[0]); });
  return s;
}

VectorField scaled(VectorField v, double f) {
  for (int a = 0; a < v.dimension(); ++a)
    for (auto& c : v[a].spectral_mut()) c *= f;
  return v;
}

}  // namespace

TEST_CASE("curl examples") {
  const Grid g(2, 16);
  const ScalarField zero(g);
  CHECK(max_diff(curl_2d(vec2(fn(g, [](const X& x) { return std::sin(x[1]); }), zero)),
                 fn(g, [](const X& x) { return -std::cos(x[1]); })) < 1e-14);
  CHECK(lp_norm(curl_2d(vec2(fn(g, [](const X&) { return 2.0; }), fn(g, [](const X&) { return -1.0; }))), 2.0) < 1e-14);
  CHECK(lp_norm(curl_2d(vec2(fn(g, [](const X& x) { return std::cos(x[0]); }), zero)), 2.0) < 1e-14);
  CHECK_THROWS_AS(curl_2d(VectorField(Grid(3, 8))), DimensionError);
}

TEST_CASE("Biot-Savart examples") {
  const Grid g(2, 16);
  CHECK(lp_norm(biot_savart(ScalarField(g)), 2.0) == 0.0);
  const VectorField u = biot_savart(fn(g, [](const X& x) { return std::sin(x[0]); }));
  CHECK(lp_norm(u[0], 2.0) < 1e-14);
  CHECK(max_diff(u[1], fn(g, [](const X& x) { return -std::cos(x[0]); })) < 1e-14);
  CHECK_THROWS_AS(biot_savart(fn(g, [](const X& x) { return 1.0 + std::sin(x[0]); })), ValidationError);
  CHECK_THROWS_AS(biot_savart(ScalarField(Grid(3, 8))), DimensionError);
}

TEST_CASE("curl and Biot-Savart are inverse on mean-free fields") {
  const Grid g(2, 64);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const VectorField u = random_solenoidal(g, 20, 500 + s, false);
    VectorField u0 = u;
    for (int a = 0; a < 2; ++a) u0[a].spectral_mut()[0] = 0.0;
    const VectorField back = biot_savart(curl_2d(u));
    CHECK(max_diff(back, u0) <= 1e-12);
    CHECK(max_divergence_mode(back) <= 1e-12);
    const ScalarField w = random_field(g, 20, 900 + s, 1.0, true);
    CHECK(max_diff(curl_2d(biot_savart(w)), w) <= 1e-12);
  }
}

TEST_CASE("gronwall record examples") {
  const Grid g(2, 32);
  SolverConfig cfg = deterministic(32, 0.01, 1.0);
  const auto z = gronwall_record(State(g), cfg);
  CHECK(z.Y == 1.0);
  CHECK(z.sigma == 1.0);
  CHECK(z.Z_bound == 1.0);
  CHECK(z.g == 1.0);

  // normalise so that ||grad w||_{L^4} = 1
  VectorField u = random_solenoidal(g, 6, 3);
  const double n4 = lp_norm(gradient(curl_2d(u)), 4.0);
  u = scaled(u, 1.0 / n4);
  State s(0.0, u, ScalarField(g));
  const auto r = gronwall_record(s, cfg);
  CHECK(r.Y == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.Z_bound == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-12));
  CHECK(r.Z_bound == doctest::Approx(1.6818).epsilon(1e-4));

  State s2(0.0, scaled(u, 2.0), ScalarField(g));
  CHECK(gronwall_record(s2, cfg).Y - 1.0 == doctest::Approx(16.0 * (r.Y - 1.0)).epsilon(1e-12));

  cfg.epsilon = 1.0;
  cfg.spec = QWienerSpec::power_law(2, 2, 2.0);
  cfg.noise = NoiseIntensity::additive(cfg.spec, 2);
  const auto n = gronwall_record(s, cfg);
  CHECK(n.sigma > 1.0);
  CHECK(n.Z_bound == doctest::Approx(std::pow(n.sigma, 0.25) * std::pow(n.Y, 0.75)).epsilon(1e-12));
  CHECK(std::isfinite(n.hessian_term));
  CHECK_THROWS_AS(gronwall_record(State(Grid(3, 8)), cfg), DimensionError);
}

TEST_CASE("embedding constant measured on one corpus bounds another") {
  const Grid g(2, 32);
  double calibrated = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) calibrated = std::max(calibrated, embedding_ratio(random_solenoidal(g, 8, s)));
  MESSAGE("measured embedding constant on 32^2: " << calibrated);
  CHECK(std::isfinite(calibrated));
  CHECK(calibrated > 0.0);
  for (std::uint64_t s = 100; s < 120; ++s) CHECK(embedding_ratio(random_solenoidal(g, 8, s)) <= calibrated);
}

TEST_CASE("stopping rules") {
  SolverConfig cfg = deterministic(32, 0.01, 0.5);
  const State s0 = [&] {
    VectorField u = random_solenoidal(cfg.grid, 4, 12);
    return State(0.0, scaled(u, 2.0), random_field(cfg.grid, 4, 13));
  }();
  const auto rec = run(cfg, s0, nullptr);
  StoppingRule never;
  CHECK_FALSE(check_stopping(rec.rows, never).has_value());

  StoppingRule tau;
  tau.kind = StopKind::tau_R;
  tau.threshold = 0.5 * rec.rows[0].linf_grad_u;
  REQUIRE(check_stopping(rec.rows, tau).has_value());
  CHECK(*check_stopping(rec.rows, tau) == 0.0);

  // larger R never fires earlier
  double prev = -1.0;
  for (double R : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    tau.threshold = R;
    const auto t = check_stopping(rec.rows, tau);
    const double tv = t ? *t : std::numeric_limits<double>::infinity();
    CHECK(tv >= prev);
    prev = tv;
  }

  StoppingRule gam;
  gam.kind = StopKind::gamma_R;
  const auto run_f = running_functional(rec.rows, gam);
  for (std::size_t m = 1; m < run_f.size(); ++m) CHECK(run_f[m] >= run_f[m - 1]);

  // stopping inside run() flags the last row
  SolverConfig stop_cfg = cfg;
  tau.threshold = 0.5 * rec.rows[0].linf_grad_u;
  stop_cfg.stopping = tau;
  const auto stopped = run(stop_cfg, s0, nullptr);
  CHECK(stopped.rows.size() == 1);
  CHECK(stopped.rows.back().stop_flag);
  CHECK(stopped.stop_reason == tau.name());

  stop_cfg.diagnostics = DiagnosticsLevel::light;
  CHECK_THROWS_AS(stop_cfg.validate(), ValidationError);
}

TEST_CASE("gamma_R stop time on a closed-form flow") {
  SolverConfig cfg = deterministic(32, 0.01, 2.0);
  const auto rec = run(cfg, buoyant_shear(cfg.grid), nullptr);
  // w = a cos x1 with a = 1 - e^-t; grad w = -a sin x1 e1
  const double c2 = std::sqrt(2.0) * pi;
  const double c4 = std::pow(1.5 * pi * pi, 0.25);
  // closed-form norms, left-endpoint time integral, first grid time above R
  const double R = 10.0;
  double integral = 0.0, oracle = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m <= cfg.step_count(); ++m) {
    const double t = m * cfg.dt;
    const double a = 1 - std::exp(-t);
    if (m > 0) integral += cfg.dt * c2 * (1 - std::exp(-(t - cfg.dt)));
    if (a * (c2 + c4) + integral > R) {
      oracle = t;
      break;
    }
  }
  StoppingRule gam;
  gam.kind = StopKind::gamma_R;
  gam.threshold = R;
  const auto t = check_stopping(rec.rows, gam);
  REQUIRE(t.has_value());
  MESSAGE("gamma_R stop " << *t << " closed form " << oracle);
  CHECK(std::abs(*t - oracle) <= cfg.dt);

  SolverConfig with_rule = cfg;
  with_rule.stopping = gam;
  const auto stopped = run(with_rule, buoyant_shear(cfg.grid), nullptr);
  CHECK(stopped.stop_time == doctest::Approx(*t));
  CHECK(stopped.stop_reason == gam.name());
}

TEST_CASE("energy budget examples") {
  {
    const SolverConfig cfg = deterministic(16, 0.1, 1.0);
    for (double r : energy_budget(run(cfg, State(cfg.grid), nullptr))) CHECK(r == 0.0);
  }
  {
    const SolverConfig cfg = deterministic(16, 0.01, 1.0);
    const auto rec = run(cfg, shear(cfg.grid), nullptr);
    const double u0sq = rec.rows[0].l2_u * rec.rows[0].l2_u;
    const auto res = energy_budget(rec);
    CHECK(res.size() == 100);
    for (double r : res) CHECK(std::abs(r) <= 3 * cfg.dt * cfg.dt * u0sq);
  }
  {
    const SolverConfig cfg = deterministic(16, 0.05, 1.0);
    State s(cfg.grid);
    s.theta = fn(cfg.grid, [](const X&) { return 0.3; });
    for (double r : energy_budget(run(cfg, s, nullptr))) CHECK(std::abs(r) <= 1e-12);
  }
  SolverConfig noisy = deterministic(16, 0.1, 0.2);
  noisy.epsilon = 0.1;
  noisy.spec = QWienerSpec::power_law(2, 1, 2.0);
  noisy.noise = NoiseIntensity::additive(noisy.spec, 2);
  const RandomStream stream(1, 0);
  CHECK_THROWS_AS(energy_budget(run(noisy, State(noisy.grid), &stream)), ValidationError);
}

TEST_CASE("vorticity consistency examples") {
  {
    const SolverConfig cfg = deterministic(16, 0.1, 1.0);
    const auto vc = vorticity_consistency(cfg, State(cfg.grid), nullptr);
    CHECK(vc.sup_gap == 0.0);
    CHECK(vc.sup_mean_gap == 0.0);
  }
  {
    const SolverConfig cfg = deterministic(16, 0.01, 1.0);
    const auto vc = vorticity_consistency(cfg, shear(cfg.grid), nullptr);
    CHECK(vc.sup_gap <= 5 * cfg.dt * cfg.t_end);
    CHECK(vc.gap.size() == vc.t.size());
  }
  {
    // buoyancy drives the mean mode through the tracked scalar ODE
    const SolverConfig cfg = deterministic(16, 0.05, 1.0);
    State s(cfg.grid);
    s.theta = fn(cfg.grid, [](const X& x) { return 0.5 + std::sin(x[0]); });
    const auto vc = vorticity_consistency(cfg, s, nullptr);
    CHECK(vc.sup_mean_gap <= 1e-12);
  }
}

TEST_CASE("vorticity gap halves with dt on a frozen noise path") {
  auto gap = [](double dt, int substeps) {
    SolverConfig cfg = deterministic(32, dt, 0.5);
    cfg.epsilon = 0.01;
    cfg.spec = QWienerSpec::power_law(2, 3, 2.0);
    cfg.noise = NoiseIntensity::additive(cfg.spec, 2);
    cfg.noise_substeps = substeps;
    State s(0.0, random_solenoidal(cfg.grid, 4, 77), random_field(cfg.grid, 4, 78));
    const RandomStream stream(3, 0);
    return vorticity_consistency(cfg, s, &stream).sup_gap;
  };
  const double g1 = gap(0.01, 2), g2 = gap(0.005, 1);
  MESSAGE("gap ratio " << g1 / g2);
  CHECK(g1 / g2 >= 1.8);
}

TEST_CASE("vorticity second moment matches the linear OU closed form") {
  SolverConfig cfg = deterministic(8, 1e-2, 0.5);
  cfg.epsilon = 1.0;
  cfg.nonlinear = false;
  cfg.spec = QWienerSpec({NoiseMode{{0, 2, 0}, BasisTag::cos, 1.0}});
  cfg.noise = NoiseIntensity::additive(cfg.spec, 2);
  cfg.diagnostics = DiagnosticsLevel::none;
  std::vector<TrajectoryFunctional> fns{{"terminal_l2_w_sq", [](const TrajectoryRecord& r) {
                                           const double n = lp_norm(curl_2d(r.final_state->u), 2.0);
                                           return n * n;
                                         }}};
  const auto sum = run_ensemble(cfg, State(cfg.grid), 1000, 99, fns);
  // u1 = X cos 2 x2 with dX = -4 X dt + dW, w = 2 X sin 2 x2
  const double var = (1 - std::exp(-8 * cfg.t_end)) / 8;
  const double expect = 4 * var * 2 * pi * pi;
  MESSAGE("E||w(T)||^2 = " << sum.get("terminal_l2_w_sq").mean << " vs " << expect);
  CHECK(sum.get("terminal_l2_w_sq").mean == doctest::Approx(expect).epsilon(0.10));
}
