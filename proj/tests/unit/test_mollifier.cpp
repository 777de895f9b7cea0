#include "doctest.h"
#include "helpers.hpp"
#include "sbsim/error.hpp"
#include "sbsim/mollifier.hpp"

using namespace sbsim;
using namespace testing;

namespace {

using X = std::array<double, 3>;

// Gaussian-decaying spectra with widths spread over [lo, hi]
std::vector<ScalarField> corpus(const Grid& g, double lo = 2.0, double hi = 6.0) {
  std::vector<ScalarField> out;
  for (std::uint64_t s = 0; s < 20; ++s) {
    ScalarField f = random_field(g, g.resolution() / 2 - 1, 4000 + s, 0.0);
    auto& c = f.spectral_mut();
    const double width = lo + (hi - lo) * static_cast<double>(s) / 19.0;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::exp(-g.k_squared(i) / (2 * width * width));
    out.push_back(std::move(f));
  }
  return out;
}

ScalarField minus(const ScalarField& a, const ScalarField& b) {
  ScalarField r = a;
  auto& c = r.spectral_mut();
  auto d = b.spectral();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= d[i];
  return r;
}

}  // namespace

TEST_CASE("multiplier shape") {
  const MollifierSpec m(0.5);
  CHECK(m.multiplier(0.0) == 1.0);
  double prev = 1.0;
  for (double k2 = 0.0; k2 < 100; k2 += 0.5) {
    CHECK(m.multiplier(k2) <= prev);
    prev = m.multiplier(k2);
  }
  CHECK(m.multiplier(4.0) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(MollifierSpec(0.0), ValidationError);
  CHECK_THROWS_AS(MollifierSpec(-1.0), ValidationError);
}

TEST_CASE("mollify examples") {
  const Grid g(2, 32);
  const auto c = ScalarField::from_function(g, [](const X&) { return 1.3; });
  CHECK(max_diff(mollify(c, MollifierSpec(0.7)), c) < 1e-15);

  const auto s = ScalarField::from_function(g, [](const X& x) { return std::sin(x[0]); });
  const ScalarField ms = mollify(s, MollifierSpec(1.0));
  const auto expect = ScalarField::from_function(g, [](const X& x) { return std::exp(-1.0) * std::sin(x[0]); });
  CHECK(max_diff(ms, expect) < 1e-15);
  CHECK(sobolev_norm(minus(ms, s), 0) == doctest::Approx((1 - std::exp(-1.0)) * std::sqrt(0.5)).epsilon(1e-13));

  const auto bl = ScalarField::from_function(g, [](const X& x) { return std::sin(3 * x[0]) + std::cos(2 * x[1]); });
  const double eps = 1e-3;
  const double gap = lp_norm(minus(mollify(bl, MollifierSpec(eps)), bl), std::numeric_limits<double>::infinity());
  CHECK(gap <= eps * eps * 9 * lp_norm(bl, std::numeric_limits<double>::infinity()) * 1.01);
}

TEST_CASE("mollify is linear and commutes with derivatives and projection") {
  const Grid g(2, 32);
  const MollifierSpec m(0.3);
  const ScalarField a = random_field(g, 10, 1), b = random_field(g, 10, 2);
  ScalarField sum = a;
  for (std::size_t i = 0; i < g.size(); ++i) sum.spectral_mut()[i] += 2.0 * b.spectral()[i];
  ScalarField lin = mollify(a, m);
  for (std::size_t i = 0; i < g.size(); ++i) lin.spectral_mut()[i] += 2.0 * mollify(b, m).spectral()[i];
  CHECK(max_diff(mollify(sum, m).spectral(), lin.spectral()) < 1e-15);
  CHECK(max_diff(mollify(partial(a, 1), m).spectral(), partial(mollify(a, m), 1).spectral()) < 1e-15);
  std::vector<ScalarField> comps{a, b};
  const VectorField v(std::move(comps));
  const VectorField lhs = mollify(leray_project(v), m);
  const VectorField rhs = leray_project(mollify(v, m));
  for (int c = 0; c < 2; ++c) CHECK(max_diff(lhs[c].spectral(), rhs[c].spectral()) < 1e-15);
}

TEST_CASE("smoothing gain bound") {
  CHECK(smoothing_gain_bound(1e-8) == doctest::Approx(std::sqrt(0.5) * std::exp(-0.5)).epsilon(1e-9));
  // for epsilon^2 >= 1/2 the sup sits at y = 0
  CHECK(smoothing_gain_bound(1.0) == doctest::Approx(1.0));
  for (double e : {0.01, 0.1, 0.5, 0.7}) {
    double brute = 0.0;
    for (double y = 0.0; y < 3.0; y += 1e-5) brute = std::max(brute, std::sqrt(e * e + y * y) * std::exp(-y * y));
    CHECK(smoothing_gain_bound(e) == doctest::Approx(brute).epsilon(1e-8));
  }
  CHECK(smoothing_gain_bound(0.0) == doctest::Approx(std::sqrt(0.5) * std::exp(-0.5)));
}

TEST_CASE("contract (i): uniform boundedness") {
  const Grid g(2, 64);
  const auto fields = corpus(g);
  for (int s : {2, 3}) {
    for (const auto& f : fields) {
      for (int j = 1; j <= 8; ++j) {
        const MollifierSpec m(std::ldexp(1.0, -j));
        CHECK(sobolev_norm(mollify(f, m), s) <= sobolev_norm(f, s));
      }
    }
  }
}

TEST_CASE("contract (ii): smoothing gain and difference bound") {
  const Grid g(2, 64);
  const auto fields = corpus(g);
  for (int s : {2, 3}) {
    double worst_gain = 0.0, worst_diff = 0.0;
    for (int j = 1; j <= 8; ++j) {
      const double eps = std::ldexp(1.0, -j);
      const MollifierSpec m(eps);
      double gain = 0.0;
      for (const auto& f : fields) {
        const ScalarField r = mollify(f, m);
        gain = std::max(gain, eps * sobolev_norm(r, s) / sobolev_norm(f, s - 1));
        worst_diff = std::max(worst_diff, sobolev_norm(minus(r, f), s - 1) / (eps * sobolev_norm(f, s)));
      }
      CHECK(gain <= 1.1 * smoothing_gain_bound(eps));
      worst_gain = std::max(worst_gain, gain / smoothing_gain_bound(eps));
    }
    MESSAGE("s=" << s << " gain/bound " << worst_gain << " difference constant " << worst_diff);
    CHECK(worst_diff <= 1.0);
  }
}

TEST_CASE("contract (iii): the H^s gap decreases monotonically to zero") {
  const Grid g(2, 64);
  for (int s : {2, 3}) {
    for (const auto& f : corpus(g)) {
      double prev = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= 12; ++j) {
        const double ds = sobolev_norm(minus(mollify(f, MollifierSpec(std::ldexp(1.0, -j))), f), s);
        CHECK(ds < prev);
        prev = ds;
      }
      CHECK(prev <= 1e-3 * sobolev_norm(f, s));
    }
  }
}

TEST_CASE("contract (iii): difference over epsilon decreases along 2^-j") {
  // per mode (1 - e^{-eps^2 k^2}) / eps peaks near eps |k| = 1.12, so the
  // sequence is monotone from eps = 1/2 on when the spectrum is resolved there
  const Grid g(2, 64);
  for (int s : {2, 3}) {
    for (const auto& f : corpus(g, 0.75, 1.25)) {
      double prev = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= 8; ++j) {
        const double eps = std::ldexp(1.0, -j);
        const double ratio = sobolev_norm(minus(mollify(f, MollifierSpec(eps)), f), s - 1) / eps;
        CHECK(ratio < prev);
        prev = ratio;
      }
      CHECK(prev <= 0.05 * sobolev_norm(f, s));
    }
  }
}

TEST_CASE("broadband fields: difference over epsilon still tends to zero") {
  const Grid g(2, 64);
  for (const auto& f : corpus(g)) {
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 4; j <= 12; ++j) {
      const double eps = std::ldexp(1.0, -j);
      const double ratio = sobolev_norm(minus(mollify(f, MollifierSpec(eps)), f), 1) / eps;
      if (j >= 6) CHECK(ratio < prev);
      prev = ratio;
    }
    CHECK(prev <= 0.01 * sobolev_norm(f, 2));
  }
}
