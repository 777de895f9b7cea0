#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "sbsim/field.hpp"
#include "sbsim/rng.hpp"
#include "sbsim/spectral.hpp"

namespace testing {

using sbsim::cplx;
using sbsim::Grid;
using sbsim::ScalarField;
using sbsim::VectorField;

inline constexpr double pi = std::numbers::pi;

inline double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) { return max_diff(a.physical(), b.physical()); }

inline double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < a.dimension(); ++c) m = std::max(m, max_diff(a[c], b[c]));
  return m;
}

inline bool bit_equal(const VectorField& a, const VectorField& b) {
  for (int c = 0; c < a.dimension(); ++c) {
    auto x = a[c].spectral();
    auto y = b[c].spectral();
    if (!std::equal(x.begin(), x.end(), y.begin())) return false;
  }
  return true;
}

inline bool bit_equal(const ScalarField& a, const ScalarField& b) {
  auto x = a.physical();
  auto y = b.physical();
  return std::equal(x.begin(), x.end(), y.begin());
}

/// Real random field with |k|_inf <= kmax, coefficients ~ N(0,1)/(1+|k|^2)^decay.
inline ScalarField random_field(const Grid& g, int kmax, std::uint64_t seed, double decay = 1.0,
                                bool mean_free = false) {
  sbsim::CounterEngine rng(seed, 0, sbsim::StreamTag::test);
  std::vector<cplx> c(g.size(), cplx{});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.wavenumber(i);
    if (g.max_abs_component(i) > kmax || g.is_nyquist(i)) continue;
    bool upper = false;
    for (int a = 0; a < 3; ++a) {
      if (k[a] != 0) {
        upper = k[a] > 0;
        break;
      }
    }
    const double s = std::pow(1.0 + g.k_squared(i), -decay);
    if (i == 0) {
      if (!mean_free) c[0] = s * rng.normal();
      continue;
    }
    if (!upper) continue;
    const cplx v{s * rng.normal(), s * rng.normal()};
    c[i] = v;
    c[g.index_of({-k[0], -k[1], -k[2]})] = std::conj(v);
  }
  return ScalarField::from_spectral(g, std::move(c));
}

inline VectorField random_solenoidal(const Grid& g, int kmax, std::uint64_t seed, bool mean_free = true) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < g.dimension(); ++a) comps.push_back(random_field(g, kmax, seed * 31 + a, 1.0, mean_free));
  return sbsim::leray_project(VectorField(std::move(comps)));
}

}  // namespace testing
