#include "sbsim/noise.hpp"

#include <cmath>
#include <string>

#include "sbsim/error.hpp"
#include "sbsim/spectral.hpp"

namespace sbsim {

QWienerSpec::QWienerSpec(std::vector<NoiseMode> modes) : modes_(std::move(modes)) {
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const auto& m = modes_[j];
    if (!(m.lambda >= 0.0) || !std::isfinite(m.lambda)) {
      throw ValidationError("noise eigenvalue lambda_" + std::to_string(j) +
                            " must be finite and nonnegative");
    }
    const bool zero = m.k[0] == 0 && m.k[1] == 0 && m.k[2] == 0;
    if (zero && m.tag == BasisTag::sin) {
      throw ValidationError("noise mode " + std::to_string(j) + ": sin(0.x) vanishes identically");
    }
    if (!zero && m.tag == BasisTag::constant) {
      throw ValidationError("noise mode " + std::to_string(j) +
                            ": the constant basis function needs k = 0");
    }
  }
}

QWienerSpec QWienerSpec::power_law(int dimension, int max_wavenumber, double gamma, bool include_mean,
                                   double lambda0) {
  if (dimension != 2 && dimension != 3) throw ValidationError("noise dimension must be 2 or 3");
  if (max_wavenumber < 0) throw ValidationError("noise max_wavenumber must be nonnegative");
  std::vector<NoiseMode> modes;
  if (include_mean) modes.push_back({{0, 0, 0}, BasisTag::constant, lambda0});
  const int K = max_wavenumber;
  const int kz_range = dimension == 3 ? K : 0;
  for (int k0 = -K; k0 <= K; ++k0) {
    for (int k1 = -K; k1 <= K; ++k1) {
      for (int k2 = -kz_range; k2 <= kz_range; ++k2) {
        const Wavenumber k{k0, k1, k2};
        // half space: first nonzero component positive
        int first = 0;
        for (int v : k) {
          if (v != 0) {
            first = v;
            break;
          }
        }
        if (first <= 0) continue;
        const double k2sum = double(k0) * k0 + double(k1) * k1 + double(k2) * k2;
        const double lambda = std::pow(k2sum, -gamma);
        modes.push_back({k, BasisTag::cos, lambda});
        modes.push_back({k, BasisTag::sin, lambda});
      }
    }
  }
  return QWienerSpec(std::move(modes));
}

double QWienerSpec::trace() const noexcept {
  double t = 0.0;
  for (const auto& m : modes_) t += m.lambda;
  return t;
}

void QWienerSpec::check_grid(const Grid& grid) const {
  const int half = grid.resolution() / 2;
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    for (int a = 0; a < 3; ++a) {
      const int ka = modes_[j].k[a];
      if (a >= grid.dimension() && ka != 0) {
        throw ValidationError("noise mode " + std::to_string(j) + " has a component beyond the grid dimension");
      }
      if (std::abs(ka) >= half) {
        throw ValidationError("noise mode " + std::to_string(j) + " wavenumber " + std::to_string(ka) +
                              " is not resolved below the Nyquist mode " + std::to_string(half));
      }
    }
  }
}

ScalarField basis_function(const NoiseMode& mode, const Grid& grid) {
  return ScalarField::from_function(grid, [&](const std::array<double, 3>& x) {
    double phase = 0.0;
    for (int a = 0; a < grid.dimension(); ++a) phase += mode.k[a] * x[a];
    switch (mode.tag) {
      case BasisTag::constant:
        return 1.0;
      case BasisTag::cos:
        return std::cos(phase);
      case BasisTag::sin:
        return std::sin(phase);
    }
    return 0.0;
  });
}

NoiseIncrement sample_increment(const QWienerSpec& spec, double dt, const RandomStream& stream,
                                std::uint64_t step, int substeps) {
  if (!(dt > 0.0)) throw ValidationError("noise increment needs dt > 0");
  if (substeps < 1) throw ValidationError("noise substeps must be >= 1");
  NoiseIncrement inc;
  inc.dt = dt;
  inc.dW.assign(spec.size(), 0.0);
  const double scale = std::sqrt(dt / substeps);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    double acc = 0.0;
    for (int s = 0; s < substeps; ++s) {
      acc += stream.normal(step * static_cast<std::uint64_t>(substeps) + static_cast<std::uint64_t>(s),
                           static_cast<std::uint32_t>(j));
    }
    inc.dW[j] = scale * acc;
  }
  return inc;
}

std::array<double, 3> default_direction(const Wavenumber& k, int dimension) {
  const double kn = std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2]);
  if (kn == 0.0) return {1.0, 0.0, 0.0};
  if (dimension == 2) return {-k[1] / kn, k[0] / kn, 0.0};
  // k x a with a = e3, or e1 when k is parallel to e3
  std::array<double, 3> a{0.0, 0.0, 1.0};
  if (k[0] == 0 && k[1] == 0) a = {1.0, 0.0, 0.0};
  std::array<double, 3> c{k[1] * a[2] - k[2] * a[1], k[2] * a[0] - k[0] * a[2], k[0] * a[1] - k[1] * a[0]};
  const double cn = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  return {c[0] / cn, c[1] / cn, c[2] / cn};
}

NoiseIntensity NoiseIntensity::off() { return {}; }

NoiseIntensity NoiseIntensity::additive(const QWienerSpec& spec, int dimension, double amplitude) {
  NoiseIntensity f;
  f.kind = NoiseKind::additive;
  for (const auto& m : spec.modes()) {
    f.directions.push_back(default_direction(m.k, dimension));
    f.amplitudes.push_back(amplitude);
  }
  return f;
}

NoiseIntensity NoiseIntensity::multiplicative(const QWienerSpec& spec, int dimension, double a0, double a1,
                                              double a2, double amplitude) {
  NoiseIntensity f = additive(spec, dimension, amplitude);
  f.kind = NoiseKind::multiplicative;
  f.a0 = a0;
  f.a1 = a1;
  f.a2 = a2;
  return f;
}

double NoiseIntensity::growth_constant() const noexcept {
  if (kind == NoiseKind::multiplicative) return std::abs(a0) + std::abs(a1) + std::abs(a2);
  return kind == NoiseKind::additive ? 1.0 : 0.0;
}

double NoiseIntensity::lipschitz_constant() const noexcept {
  return kind == NoiseKind::multiplicative ? std::abs(a1) + std::abs(a2) : 0.0;
}

namespace {

// Coefficients of sigma e_j(x) d on the grid, unprojected.
void basis_coefficients(const Grid& g, const NoiseMode& m, double sigma, const std::array<double, 3>& d,
                        std::vector<std::size_t>& index, std::vector<std::array<cplx, 3>>& value) {
  const Wavenumber neg{-m.k[0], -m.k[1], -m.k[2]};
  auto push = [&](const Wavenumber& k, cplx c) {
    const std::size_t i = g.index_of(k);
    std::array<cplx, 3> v{};
    for (int a = 0; a < g.dimension(); ++a) v[a] = c * sigma * d[a];
    for (std::size_t q = 0; q < index.size(); ++q) {
      if (index[q] == i) {
        for (int a = 0; a < 3; ++a) value[q][a] += v[a];
        return;
      }
    }
    index.push_back(i);
    value.push_back(v);
  };
  switch (m.tag) {
    case BasisTag::constant:
      push(m.k, 1.0);
      break;
    case BasisTag::cos:
      push(m.k, 0.5);
      push(neg, 0.5);
      break;
    case BasisTag::sin:
      push(m.k, cplx(0.0, -0.5));
      push(neg, cplx(0.0, 0.5));
      break;
  }
}

void project_sparse(const Grid& g, std::vector<std::size_t>& index, std::vector<std::array<cplx, 3>>& value) {
  const int d = g.dimension();
  for (std::size_t q = 0; q < index.size(); ++q) {
    const std::size_t i = index[q];
    const double k2 = g.k_squared(i);
    if (k2 == 0.0) continue;
    cplx kv{};
    for (int a = 0; a < d; ++a) kv += g.k_component(i, a) * value[q][a];
    for (int a = 0; a < d; ++a) value[q][a] -= g.k_component(i, a) * kv / k2;
  }
}

}  // namespace

NoiseOperator::NoiseOperator(const Grid& grid, QWienerSpec spec, NoiseIntensity intensity)
    : grid_(grid), spec_(std::move(spec)), intensity_(std::move(intensity)) {
  if (intensity_.kind == NoiseKind::off) return;
  spec_.check_grid(grid_);
  const std::size_t nw = spec_.size();
  const bool custom = intensity_.kind == NoiseKind::additive && !intensity_.custom_fields.empty();
  if (custom) {
    if (intensity_.custom_fields.size() != nw) {
      throw ValidationError("noise intensity has " + std::to_string(intensity_.custom_fields.size()) +
                            " custom fields but the Q-Wiener spec has " + std::to_string(nw) + " modes");
    }
    for (const auto& f : intensity_.custom_fields) {
      if (f.grid() != grid_) throw ValidationError("custom noise field lives on a different grid");
      const VectorField pf = leray_project(f);
      std::vector<std::vector<cplx>> comps;
      for (int a = 0; a < grid_.dimension(); ++a) {
        auto c = pf[a].spectral();
        comps.emplace_back(c.begin(), c.end());
      }
      dense_.push_back(std::move(comps));
    }
    return;
  }
  if (intensity_.directions.size() != nw || intensity_.amplitudes.size() != nw) {
    throw ValidationError("noise intensity mode count (" + std::to_string(intensity_.directions.size()) +
                          ") does not match the Q-Wiener spec (" + std::to_string(nw) + ")");
  }
  for (std::size_t j = 0; j < nw; ++j) {
    SparseMode raw;
    basis_coefficients(grid_, spec_.mode(j), intensity_.amplitudes[j], intensity_.directions[j], raw.index,
                       raw.value);
    SparseMode projected = raw;
    project_sparse(grid_, projected.index, projected.value);
    raw_fields_.push_back(std::move(raw));
    unit_fields_.push_back(std::move(projected));
  }
}

bool NoiseOperator::active() const noexcept { return intensity_.kind != NoiseKind::off && spec_.size() > 0; }

void NoiseOperator::accumulate(const VectorField& u, const ScalarField& theta, std::span<const double> coeffs,
                               double t, double scale, std::span<std::span<cplx>> out) const {
  if (!active()) return;
  if (coeffs.size() != spec_.size()) {
    throw ValidationError("noise coefficient count " + std::to_string(coeffs.size()) +
                          " does not match the Q-Wiener spec (" + std::to_string(spec_.size()) + ")");
  }
  const int d = grid_.dimension();
  const auto& modes = spec_.modes();
  if (intensity_.kind == NoiseKind::additive) {
    const double env = intensity_.envelope ? intensity_.envelope(t) : 1.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const double w = scale * env * std::sqrt(modes[j].lambda) * coeffs[j];
      if (w == 0.0) continue;
      if (!dense_.empty()) {
        for (int a = 0; a < d; ++a) {
          const auto& c = dense_[j][static_cast<std::size_t>(a)];
          for (std::size_t i = 0; i < c.size(); ++i) out[a][i] += w * c[i];
        }
      } else {
        const auto& sm = unit_fields_[j];
        for (std::size_t q = 0; q < sm.index.size(); ++q) {
          for (int a = 0; a < d; ++a) out[a][sm.index[q]] += w * sm.value[q][a];
        }
      }
    }
    return;
  }

  // multiplicative: P( b ⊙ G ), G = sum_j sqrt(lambda_j) c_j sigma_j e_j d_j
  const std::size_t size = grid_.size();
  std::vector<std::vector<cplx>> gspec(static_cast<std::size_t>(d), std::vector<cplx>(size, cplx{}));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double w = std::sqrt(modes[j].lambda) * coeffs[j];
    if (w == 0.0) continue;
    const auto& sm = raw_fields_[j];
    for (std::size_t q = 0; q < sm.index.size(); ++q) {
      for (int a = 0; a < d; ++a) gspec[static_cast<std::size_t>(a)][sm.index[q]] += w * sm.value[q][a];
    }
  }
  auto th = theta.physical();
  std::vector<double> gphys(size);
  std::vector<std::vector<cplx>> prod(static_cast<std::size_t>(d), std::vector<cplx>(size));
  for (int a = 0; a < d; ++a) {
    grid_.inverse(gspec[static_cast<std::size_t>(a)], gphys);
    auto ua = u[a].physical();
    for (std::size_t i = 0; i < size; ++i) {
      gphys[i] *= intensity_.a0 + intensity_.a1 * ua[i] + intensity_.a2 * th[i];
    }
    grid_.forward(gphys, prod[static_cast<std::size_t>(a)]);
    kernels::zero_nyquist(grid_, prod[static_cast<std::size_t>(a)]);
  }
  std::vector<std::span<cplx>> spans(prod.begin(), prod.end());
  kernels::leray(grid_, spans);
  for (int a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < size; ++i) out[a][i] += scale * prod[static_cast<std::size_t>(a)][i];
  }
}

VectorField NoiseOperator::evaluate(const VectorField& u, const ScalarField& theta,
                                    std::span<const double> coeffs, double t) const {
  const int d = grid_.dimension();
  std::vector<std::vector<cplx>> acc(static_cast<std::size_t>(d), std::vector<cplx>(grid_.size(), cplx{}));
  std::vector<std::span<cplx>> spans(acc.begin(), acc.end());
  accumulate(u, theta, coeffs, t, 1.0, spans);
  std::vector<ScalarField> comps;
  for (auto& c : acc) comps.push_back(ScalarField::from_spectral(grid_, std::move(c)));
  return VectorField(std::move(comps));
}

std::array<double, 3> NoiseOperator::mean(const VectorField& u, const ScalarField& theta,
                                          std::span<const double> coeffs, double t) const {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  if (!active()) return m;
  const VectorField f = evaluate(u, theta, coeffs, t);
  for (int a = 0; a < grid_.dimension(); ++a) m[a] = f[a].spectral()[0].real();
  return m;
}

VectorField apply_noise(const NoiseIntensity& f, const QWienerSpec& spec, const VectorField& u,
                        const ScalarField& theta, const NoiseIncrement& inc, double t) {
  if (u.grid() != theta.grid()) throw ValidationError("state components live on different grids");
  if (f.kind == NoiseKind::off) return VectorField(u.grid());
  if (inc.dW.size() != spec.size()) {
    throw ValidationError("noise increment length " + std::to_string(inc.dW.size()) +
                          " does not match the Q-Wiener spec (" + std::to_string(spec.size()) + ")");
  }
  const NoiseOperator op(u.grid(), spec, f);
  return op.evaluate(u, theta, inc.dW, t);
}

double hs_norm(const NoiseIntensity& f, const QWienerSpec& spec, const VectorField& u, const ScalarField& theta,
               int s) {
  if (f.kind == NoiseKind::off || spec.size() == 0) return 0.0;
  const NoiseOperator op(u.grid(), spec, f);
  const Grid& g = u.grid();
  std::vector<double> unit(spec.size(), 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (spec.mode(j).lambda == 0.0) continue;
    unit[j] = 1.0;
    const VectorField fj = op.evaluate(u, theta, unit);
    unit[j] = 0.0;
    const double n = sobolev_norm(fj, s);
    acc += n * n;
  }
  return std::sqrt(g.volume() * acc);
}

ItoIsometryEstimate ito_isometry_estimate(const NoiseIntensity& f, const QWienerSpec& spec, const VectorField& u,
                                          const ScalarField& theta, double dt, int n_steps, int n_paths,
                                          std::uint64_t master_seed) {
  if (n_paths <= 0) throw ValidationError("ito_isometry_estimate needs n_paths > 0");
  if (n_steps <= 0) throw ValidationError("ito_isometry_estimate needs n_steps > 0");
  ItoIsometryEstimate est;
  const double hs = hs_norm(f, spec, u, theta, 0);
  est.rhs = n_steps * dt * hs * hs;
  if (f.kind == NoiseKind::off || spec.size() == 0) return est;
  const NoiseOperator op(u.grid(), spec, f);
  const Grid& g = u.grid();
  const int d = g.dimension();
  std::vector<double> samples(static_cast<std::size_t>(n_paths));
  std::vector<std::vector<cplx>> acc(static_cast<std::size_t>(d), std::vector<cplx>(g.size()));
  std::vector<std::span<cplx>> spans(acc.begin(), acc.end());
  for (int p = 0; p < n_paths; ++p) {
    const RandomStream stream(master_seed, static_cast<std::uint64_t>(p));
    for (auto& c : acc) std::fill(c.begin(), c.end(), cplx{});
    for (int m = 0; m < n_steps; ++m) {
      const NoiseIncrement inc = sample_increment(spec, dt, stream, static_cast<std::uint64_t>(m));
      op.accumulate(u, theta, inc.dW, m * dt, 1.0, spans);
    }
    double norm2 = 0.0;
    for (const auto& c : acc) norm2 += kernels::l2_squared(g, c);
    samples[static_cast<std::size_t>(p)] = norm2;
  }
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n_paths;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= std::max(1, n_paths - 1);
  est.lhs = mean;
  est.standard_error = std::sqrt(var / n_paths);
  est.relative_gap = est.rhs > 0.0 ? std::abs(est.lhs - est.rhs) / est.rhs : std::abs(est.lhs);
  return est;
}

}  // namespace sbsim
