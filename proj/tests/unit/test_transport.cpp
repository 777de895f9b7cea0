#include "doctest.h"
#include "helpers.hpp"
#include "sbsim/error.hpp"
#include "sbsim/transport.hpp"

using namespace sbsim;
using namespace testing;

namespace {

using X = std::array<double, 3>;

double sup_abs(const ScalarField& f) { return lp_norm(f, std::numeric_limits<double>::infinity()); }

VectorField constant_flow(const Grid& g, double c0, double c1) {
  std::vector<ScalarField> comps;
  comps.push_back(ScalarField::from_function(g, [c0](const X&) { return c0; }));
  comps.push_back(ScalarField::from_function(g, [c1](const X&) { return c1; }));
  return VectorField(std::move(comps));
}

// psi = A sin x1 sin x2
VectorField cellular_flow(const Grid& g, double amp) {
  std::vector<ScalarField> comps;
  comps.push_back(ScalarField::from_function(g, [amp](const X& x) { return -amp * std::sin(x[0]) * std::cos(x[1]); }));
  comps.push_back(ScalarField::from_function(g, [amp](const X& x) { return amp * std::cos(x[0]) * std::sin(x[1]); }));
  return VectorField(std::move(comps));
}

ScalarField smooth_theta(const Grid& g, double shift = 0.0) {
  return ScalarField::from_function(g, [shift](const X& x) {
    return std::exp(std::sin(x[0] - shift)) + 0.5 * std::cos(x[1]);
  });
}

AdvectionScheme sl(Interpolation i) {
  AdvectionScheme s;
  s.kind = AdvectionKind::semi_lagrangian;
  s.interpolation = i;
  return s;
}

AdvectionScheme rk2() {
  AdvectionScheme s;
  s.kind = AdvectionKind::spectral_rk2;
  return s;
}

}  // namespace

TEST_CASE("zero velocity leaves theta unchanged exactly") {
  const Grid g(2, 32);
  const ScalarField th = random_field(g, 8, 1);
  const VectorField u(g);
  for (const auto& s : {sl(Interpolation::cubic), sl(Interpolation::linear), rk2()}) {
    const auto r = advect(th, u, 0.1, s);
    CHECK(max_diff(r.theta, th) == 0.0);
    CHECK_FALSE(r.cfl_warning);
  }
}

TEST_CASE("constants are transported to themselves") {
  const Grid g(2, 32);
  const auto c = ScalarField::from_function(g, [](const X&) { return 1.75; });
  const VectorField u = cellular_flow(g, 1.0);
  for (const auto& s : {sl(Interpolation::cubic), sl(Interpolation::linear), rk2()}) {
    CHECK(max_diff(advect(c, u, 0.05, s).theta, c) < 1e-14);
  }
}

TEST_CASE("constant velocity translates sin x1") {
  const Grid g(2, 64);
  const double c = 0.8, dt = 0.05;
  const auto th = ScalarField::from_function(g, [](const X& x) { return std::sin(x[0]); });
  const auto exact = ScalarField::from_function(g, [&](const X& x) { return std::sin(x[0] - c * dt); });
  const VectorField u = constant_flow(g, c, 0.0);
  CHECK(max_diff(advect(th, u, dt, sl(Interpolation::cubic)).theta, exact) < 1e-5);
  CHECK(max_diff(advect(th, u, dt, sl(Interpolation::linear)).theta, exact) < 2e-3);
  CHECK(max_diff(advect(th, u, dt, rk2()).theta, exact) < 1e-4);
}

TEST_CASE("CFL violation raises the warning flag only") {
  const Grid g(2, 16);
  const VectorField u = constant_flow(g, 3.0, 0.0);
  const auto th = ScalarField::from_function(g, [](const X& x) { return std::sin(x[0]); });
  const auto r = advect(th, u, 1.0, sl(Interpolation::cubic));
  CHECK(r.cfl_warning);
  CHECK(r.cfl_number == doctest::Approx(3.0 / g.spacing()));
  CHECK(std::isfinite(sup_abs(r.theta)));
  CHECK_THROWS_AS(advect(th, u, -0.1, sl(Interpolation::cubic)), ValidationError);
}

TEST_CASE("linear semi-Lagrangian obeys the discrete maximum principle exactly") {
  const Grid g(2, 32);
  ScalarField th = random_field(g, 10, 3);
  const double m0 = sup_abs(th);
  const VectorField u = cellular_flow(g, 1.0);
  for (int m = 0; m < 200; ++m) {
    th = advect(th, u, 0.02, sl(Interpolation::linear)).theta;
    REQUIRE(sup_abs(th) <= m0);
  }
}

TEST_CASE("cubic semi-Lagrangian nearly preserves the sup over 1000 steps") {
  const Grid g(2, 128);
  ScalarField th = smooth_theta(g);
  const double m0 = sup_abs(th);
  const VectorField u = cellular_flow(g, 0.2);
  for (int m = 0; m < 1000; ++m) th = advect(th, u, 0.01, sl(Interpolation::cubic)).theta;
  CHECK(sup_abs(th) <= m0 * (1 + 1e-3));
}

TEST_CASE("spectral scheme preserves the mean to round-off") {
  const Grid g(2, 32);
  ScalarField th = random_field(g, 10, 5);
  const VectorField u = random_solenoidal(g, 6, 9);
  for (int m = 0; m < 50; ++m) {
    const double before = th.spectral()[0].real();
    th = advect(th, u, 0.01, rk2()).theta;
    REQUIRE(std::abs(th.spectral()[0].real() - before) <= 1e-12);
  }
}

TEST_CASE("translation error converges at the nominal spatial order") {
  // one step with a fixed fractional cell shift isolates the interpolation error
  auto error = [](int n, Interpolation kind) {
    const Grid g(2, n);
    const double shift = 0.37 * g.spacing();
    const VectorField u = constant_flow(g, 1.0, 0.0);
    const auto r = advect(smooth_theta(g), u, shift, sl(kind));
    return max_diff(r.theta, smooth_theta(g, shift));
  };
  for (auto [kind, order] : {std::pair{Interpolation::linear, 2.0}, std::pair{Interpolation::cubic, 4.0}}) {
    const double e1 = error(32, kind), e2 = error(64, kind), e3 = error(128, kind);
    const double s1 = std::log2(e1 / e2), s2 = std::log2(e2 / e3);
    MESSAGE("order " << order << " slopes " << s1 << " " << s2);
    CHECK(std::abs(s1 - order) <= 0.3);
    CHECK(std::abs(s2 - order) <= 0.3);
  }
}

TEST_CASE("gradient growth stays under the exponential bound") {
  const Grid g(2, 64);
  ScalarField th = smooth_theta(g);
  const VectorField u = cellular_flow(g, 1.0);
  const double lip = gradient_sup(u);
  const double g0 = grad_sup(th);
  const double dt = 0.01;
  for (const auto& s : {sl(Interpolation::cubic), rk2()}) {
    ScalarField t = th;
    for (int m = 1; m <= 100; ++m) {
      t = advect(t, u, dt, s).theta;
      REQUIRE(grad_sup(t) <= g0 * std::exp(lip * m * dt) * 1.05);
    }
  }
}

TEST_CASE("grad_sup examples") {
  const Grid g(2, 64);
  CHECK(grad_sup(ScalarField::from_function(g, [](const X&) { return 4.0; })) < 1e-13);
  CHECK(grad_sup(ScalarField::from_function(g, [](const X& x) { return std::sin(x[0]); })) ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(grad_sup(ScalarField::from_function(g, [](const X& x) { return std::sin(x[0]) + std::sin(x[1]); })) ==
        doctest::Approx(1.4142).epsilon(0.01));
}

TEST_CASE("interpolation reproduces samples at nodes and wraps periodically") {
  const Grid g(2, 16);
  const ScalarField f = random_field(g, 5, 11);
  const auto s = f.physical();
  for (auto kind : {Interpolation::linear, Interpolation::cubic}) {
    CHECK(interpolate(g, s, {3.0, 5.0, 0.0}, kind) == doctest::Approx(s[3 * 16 + 5]).epsilon(1e-14));
    CHECK(interpolate(g, s, {19.0, -11.0, 0.0}, kind) == doctest::Approx(s[3 * 16 + 5]).epsilon(1e-14));
  }
  CHECK(interpolate(g, s, {3.5, 5.0, 0.0}, Interpolation::linear) ==
        doctest::Approx(0.5 * (s[3 * 16 + 5] + s[4 * 16 + 5])).epsilon(1e-14));
}
