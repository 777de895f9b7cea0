#include "doctest.h"
#include "helpers.hpp"
#include "sbsim/error.hpp"
#include "sbsim/spectral.hpp"

using namespace sbsim;
using namespace testing;

namespace {

ScalarField sin_x1(const Grid& g) {
  return ScalarField::from_function(g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
}
ScalarField cos_x(const Grid& g, int axis) {
  return ScalarField::from_function(g, [axis](const std::array<double, 3>& x) { return std::cos(x[axis]); });
}
ScalarField zero(const Grid& g) { return ScalarField(g); }

VectorField vec2(ScalarField a, ScalarField b) {
  std::vector<ScalarField> c;
  c.push_back(std::move(a));
  c.push_back(std::move(b));
  return VectorField(std::move(c));
}

}  // namespace

TEST_CASE("grid rejects invalid shapes") {
  CHECK_THROWS_AS(Grid(1, 16), ValidationError);
  CHECK_THROWS_AS(Grid(4, 16), ValidationError);
  CHECK_THROWS_AS(Grid(2, 2), ValidationError);
  CHECK_THROWS_AS(Grid(2, 12), ValidationError);
  const Grid g(2, 8);
  CHECK(g.size() == 64);
  CHECK(g.spacing() == doctest::Approx(2 * pi / 8));
  CHECK(g.volume() == doctest::Approx(4 * pi * pi));
}

TEST_CASE("wavenumber layout and sample coordinates") {
  const Grid g(2, 8);
  CHECK(g.wavenumber(g.index_of({4, 0, 0}))[0] == 4);
  CHECK(g.wavenumber(g.index_of({-3, 2, 0}))[0] == -3);
  CHECK(g.wavenumber(g.index_of({-3, 2, 0}))[1] == 2);
  CHECK(g.is_nyquist(g.index_of({4, 1, 0})));
  CHECK_FALSE(g.is_nyquist(g.index_of({3, -3, 0})));
  CHECK(g.coordinate(0, 0) == doctest::Approx(-pi));
  CHECK(g.in_dealias_band(g.index_of({2, -2, 0})));
  CHECK_FALSE(g.in_dealias_band(g.index_of({3, 0, 0})));
}

TEST_CASE("constant field has only the mean coefficient") {
  const Grid g(2, 16);
  const auto f = ScalarField::from_function(g, [](const std::array<double, 3>&) { return 2.5; });
  auto c = f.spectral();
  CHECK(c[0].real() == doctest::Approx(2.5).epsilon(1e-14));
  double rest = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) rest = std::max(rest, std::abs(c[i]));
  CHECK(rest < 1e-14);
}

TEST_CASE("sin x1 coefficients follow the (2 pi)^-d convention") {
  for (int d : {2, 3}) {
    const Grid g(d, 16);
    auto c = sin_x1(g).spectral();
    const cplx plus = c[g.index_of({1, 0, 0})];
    const cplx minus = c[g.index_of({-1, 0, 0})];
    CHECK(std::abs(plus - cplx(0.0, -0.5)) < 1e-14);
    CHECK(std::abs(minus - cplx(0.0, 0.5)) < 1e-14);
    double rest = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i == g.index_of({1, 0, 0}) || i == g.index_of({-1, 0, 0})) continue;
      rest = std::max(rest, std::abs(c[i]));
    }
    CHECK(rest < 1e-14);
  }
}

TEST_CASE("transform round trip and Hermitian symmetry") {
  for (int d : {2, 3}) {
    const Grid g(d, d == 2 ? 32 : 16);
    CounterEngine rng(5, static_cast<std::uint64_t>(d));
    std::vector<double> s(g.size());
    for (auto& v : s) v = rng.normal();
    const ScalarField f = ScalarField::from_physical(g, s);
    const ScalarField back = ScalarField::from_spectral(g, {f.spectral().begin(), f.spectral().end()});
    double fmax = 0.0;
    for (double v : s) fmax = std::max(fmax, std::abs(v));
    CHECK(max_diff(back.physical(), s) <= 1e-12 * fmax);
    auto c = f.spectral();
    double asym = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto k = g.wavenumber(i);
      if (g.is_nyquist(i)) continue;
      asym = std::max(asym, std::abs(c[g.index_of({-k[0], -k[1], -k[2]})] - std::conj(c[i])));
    }
    CHECK(asym < 1e-14);
  }
}

TEST_CASE("to_spectral and to_physical leave both representations clean") {
  const Grid g(2, 8);
  const ScalarField f = sin_x1(g);
  const ScalarField s = to_spectral(f);
  CHECK(s.physical_clean());
  CHECK(s.spectral_clean());
  const ScalarField p = to_physical(ScalarField::from_spectral(g, {s.spectral().begin(), s.spectral().end()}));
  CHECK(p.physical_clean());
  CHECK(max_diff(p, f) < 1e-15);
}

TEST_CASE("sobolev norm examples") {
  const Grid g(2, 16);
  CHECK(sobolev_norm(zero(g), 3) == 0.0);
  CHECK(sobolev_norm(sin_x1(g), 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(sobolev_norm(sin_x1(g), 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(sobolev_norm(sin_x1(g), 9), ValidationError);
  const ScalarField r = random_field(g, 7, 3);
  for (int s = 0; s < 8; ++s) CHECK(sobolev_norm(r, s) <= sobolev_norm(r, s + 1));
}

TEST_CASE("lp norm examples and Parseval") {
  const Grid g(2, 32);
  const auto three = ScalarField::from_function(g, [](const std::array<double, 3>&) { return 3.0; });
  CHECK(lp_norm(three, std::numeric_limits<double>::infinity()) == 3.0);
  CHECK(lp_norm(sin_x1(g), 2.0) == doctest::Approx(std::sqrt(2.0) * pi).epsilon(1e-13));
  CHECK(lp_norm(sin_x1(g), 2.0) == doctest::Approx(4.4429).epsilon(1e-4));
  const double linf = lp_norm(sin_x1(g), std::numeric_limits<double>::infinity());
  CHECK(linf <= 1.0);
  CHECK(linf >= std::cos(pi / 32));
  const ScalarField r = random_field(g, 10, 9);
  const double p2 = lp_norm(r, 2.0);
  const double pars = kernels::l2_squared(g, r.spectral());
  CHECK(p2 * p2 == doctest::Approx(pars).epsilon(1e-12));
}

TEST_CASE("differential operators") {
  const Grid g(2, 16);
  const VectorField gr = gradient(sin_x1(g));
  CHECK(max_diff(gr[0], cos_x(g, 0)) < 1e-13);
  CHECK(max_diff(gr[1], zero(g)) < 1e-13);
  const ScalarField f = cos_x(g, 1);
  const ScalarField lap = divergence(gradient(f));
  CHECK(max_diff(lap, laplacian(f)) < 1e-13);
  const ScalarField minus_cos = ScalarField::from_function(g, [](const std::array<double, 3>& x) { return -std::cos(x[1]); });
  CHECK(max_diff(lap, minus_cos) < 1e-13);
  const ScalarField pp = perp_div_2d(perp_grad_2d(sin_x1(g)));
  const ScalarField minus_sin = ScalarField::from_function(g, [](const std::array<double, 3>& x) { return -std::sin(x[0]); });
  CHECK(max_diff(pp, minus_sin) < 1e-13);
  const ScalarField r = random_field(g, 6, 4);
  CHECK(max_diff(perp_div_2d(perp_grad_2d(r)).spectral(), laplacian(r).spectral()) < 1e-14);
  CHECK(partial(sin_x1(g), 0).spectral()[0] == cplx{});
}

TEST_CASE("perp operators are 2D only") {
  const Grid g(3, 8);
  CHECK_THROWS_AS(perp_grad_2d(ScalarField(g)), DimensionError);
  CHECK_THROWS_AS(perp_div_2d(VectorField(g)), DimensionError);
}

TEST_CASE("leray projection examples and properties") {
  const Grid g(2, 16);
  const auto one = ScalarField::from_function(g, [](const std::array<double, 3>&) { return 1.0; });
  CHECK(max_diff(leray_project(vec2(one, zero(g))), vec2(one, zero(g))) < 1e-15);
  CHECK(max_diff(leray_project(vec2(cos_x(g, 0), zero(g))), vec2(zero(g), zero(g))) < 1e-15);
  CHECK(max_diff(leray_project(vec2(cos_x(g, 1), zero(g))), vec2(cos_x(g, 1), zero(g))) < 1e-15);

  for (int d : {2, 3}) {
    const Grid gd(d, 16);
    std::vector<ScalarField> comps;
    for (int a = 0; a < d; ++a) comps.push_back(random_field(gd, 7, 100 + a));
    const VectorField v(std::move(comps));
    const VectorField pv = leray_project(v);
    const VectorField ppv = leray_project(pv);
    CHECK(max_diff(pv, ppv) < 1e-14);
    VectorField rest = v;
    for (int a = 0; a < d; ++a) {
      auto& c = rest[a].spectral_mut();
      auto p = pv[a].spectral();
      for (std::size_t i = 0; i < c.size(); ++i) c[i] -= p[i];
    }
    CHECK(std::abs(l2_inner(pv, rest)) <= 1e-12 * lp_norm(v, 2.0) * lp_norm(v, 2.0));
    CHECK(lp_norm(divergence(pv), 2.0) <= 1e-12 * sobolev_norm(v, 1));
    CHECK(max_divergence_mode(pv) <= 1e-12 * sobolev_norm(v, 1));
  }
}

TEST_CASE("galerkin projection") {
  const Grid g(2, 16);
  const ScalarField r = random_field(g, 7, 11);
  CHECK(bit_equal(galerkin_project(r, 8), r));
  const auto s3 = ScalarField::from_function(g, [](const std::array<double, 3>& x) { return std::sin(3 * x[0]); });
  CHECK(lp_norm(galerkin_project(s3, 2), std::numeric_limits<double>::infinity()) < 1e-15);
  const ScalarField once = galerkin_project(r, 3);
  const ScalarField twice = galerkin_project(once, 3);
  CHECK(max_diff(once.spectral(), twice.spectral()) == 0.0);
}

TEST_CASE("stokes operator and implicit diffusion") {
  const Grid g(2, 16);
  const auto one = ScalarField::from_function(g, [](const std::array<double, 3>&) { return 1.0; });
  CHECK(lp_norm(stokes_apply(vec2(one, one)), 2.0) < 1e-14);
  const VectorField c2 = vec2(cos_x(g, 1), zero(g));
  CHECK(max_diff(stokes_apply(c2), c2) < 1e-14);
  const VectorField half = implicit_diffusion_solve(c2, 1.0);
  const auto c2h = ScalarField::from_function(g, [](const std::array<double, 3>& x) { return 0.5 * std::cos(x[1]); });
  CHECK(max_diff(half, vec2(c2h, zero(g))) < 1e-15);
  CHECK_THROWS_AS(implicit_diffusion_solve(c2, 0.0), ValidationError);
  CHECK_THROWS_AS(implicit_diffusion_solve(c2, -1.0), ValidationError);
  // a gradient part in the right-hand side is projected away first
  const VectorField grad = vec2(cos_x(g, 0), zero(g));
  CHECK(lp_norm(implicit_diffusion_solve(grad, 0.5), 2.0) < 1e-14);
}

TEST_CASE("gradient sup norms") {
  const Grid g(2, 32);
  CHECK(gradient_sup(sin_x1(g)) == doctest::Approx(1.0).epsilon(1e-12));
  const auto u = vec2(ScalarField::from_function(g, [](const std::array<double, 3>& x) { return std::sin(x[1]); }),
                      zero(g));
  CHECK(gradient_sup(u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dual representation stays consistent under mutation") {
  const Grid g(2, 8);
  ScalarField f = sin_x1(g);
  f.physical_mut()[0] += 1.0;
  CHECK_FALSE(f.spectral_clean());
  const double mean = f.spectral()[0].real();
  CHECK(mean == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
  f.spectral_mut()[0] = 0.0;
  CHECK_FALSE(f.physical_clean());
  double s = 0.0;
  for (double v : f.physical()) s += v;
  CHECK(std::abs(s) < 1e-12);
}
