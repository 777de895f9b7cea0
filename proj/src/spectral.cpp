#include "sbsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sbsim/error.hpp"

namespace sbsim {
namespace kernels {

void zero_nyquist(const Grid& g, std::span<cplx> c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (g.is_nyquist(i)) c[i] = cplx{};
  }
}

void dealias(const Grid& g, std::span<cplx> c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!g.in_dealias_band(i)) c[i] = cplx{};
  }
}

void derivative(const Grid& g, std::span<const cplx> in, std::span<cplx> out, int axis) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = g.is_nyquist(i) ? cplx{} : cplx(0.0, g.k_component(i, axis)) * in[i];
  }
}

void leray(const Grid& g, std::span<std::span<cplx>> components) {
  const int d = g.dimension();
  const auto& k2 = g.k_squared_table();
  const auto& kt = g.wavenumber_table();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (k2[i] == 0.0) continue;
    const Wavenumber& k = kt[i];
    cplx kdotv{};
    for (int a = 0; a < d; ++a) kdotv += static_cast<double>(k[a]) * components[a][i];
    const cplx factor = kdotv / k2[i];
    for (int a = 0; a < d; ++a) components[a][i] -= static_cast<double>(k[a]) * factor;
  }
}

void galerkin(const Grid& g, std::span<cplx> c, int cutoff_modes) {
  if (cutoff_modes >= g.resolution() / 2) return;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (g.max_abs_component(i) > cutoff_modes) c[i] = cplx{};
  }
}

void implicit_diffusion(const Grid& g, std::span<cplx> c, double dt_times_viscosity) {
  const auto& k2 = g.k_squared_table();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] /= (1.0 + dt_times_viscosity * k2[i]);
}

double l2_squared(const Grid& g, std::span<const cplx> c) {
  double acc = 0.0;
  for (const auto& v : c) acc += std::norm(v);
  return g.volume() * acc;
}

double sobolev_squared(const Grid& g, std::span<const cplx> c, int s) {
  const auto& k2 = g.k_squared_table();
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) acc += std::pow(1.0 + k2[i], s) * std::norm(c[i]);
  return acc;
}

}  // namespace kernels

namespace {

void require_2d(const Grid& g, const char* op) {
  if (g.dimension() != 2) {
    throw DimensionError(std::string(op) + " is only defined in 2D, grid has dimension " +
                         std::to_string(g.dimension()));
  }
}

std::vector<cplx> copy_spectral(const ScalarField& f) {
  auto c = f.spectral();
  return {c.begin(), c.end()};
}

}  // namespace

ScalarField to_spectral(const ScalarField& f) {
  ScalarField out = f;
  out.sync();
  return out;
}

ScalarField to_physical(const ScalarField& f) { return to_spectral(f); }

double sobolev_norm(const ScalarField& f, int s, int cap) {
  if (s < 0 || s > cap) {
    throw ValidationError("Sobolev index " + std::to_string(s) + " outside [0, " +
                          std::to_string(cap) + "]");
  }
  return std::sqrt(kernels::sobolev_squared(f.grid(), f.spectral(), s));
}

double sobolev_norm(const VectorField& v, int s, int cap) {
  double acc = 0.0;
  for (int a = 0; a < v.dimension(); ++a) {
    const double n = sobolev_norm(v[a], s, cap);
    acc += n * n;
  }
  return std::sqrt(acc);
}

namespace {

double lp_from_pointwise(const Grid& g, std::span<const double> magnitude, double p) {
  if (!(p >= 1.0)) throw ValidationError("L^p norm needs p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : magnitude) m = std::max(m, std::abs(v));
    return m;
  }
  const double weight = g.volume() / static_cast<double>(g.size());
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : magnitude) acc += v * v;
    return std::sqrt(weight * acc);
  }
  for (double v : magnitude) acc += std::pow(std::abs(v), p);
  return std::pow(weight * acc, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) { return lp_from_pointwise(f.grid(), f.physical(), p); }

double lp_norm(const VectorField& v, double p) {
  const Grid& g = v.grid();
  std::vector<double> mag(g.size(), 0.0);
  for (int a = 0; a < v.dimension(); ++a) {
    auto s = v[a].physical();
    for (std::size_t i = 0; i < g.size(); ++i) mag[i] += s[i] * s[i];
  }
  for (double& m : mag) m = std::sqrt(m);
  return lp_from_pointwise(g, mag, p);
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ValidationError("fields live on different grids");
  auto ca = a.spectral();
  auto cb = b.spectral();
  double acc = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) acc += (ca[i] * std::conj(cb[i])).real();
  return a.grid().volume() * acc;
}

double l2_inner(const VectorField& a, const VectorField& b) {
  double acc = 0.0;
  for (int i = 0; i < a.dimension(); ++i) acc += l2_inner(a[i], b[i]);
  return acc;
}

ScalarField partial(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dimension()) throw ValidationError("derivative axis out of range");
  std::vector<cplx> out(g.size());
  kernels::derivative(g, f.spectral(), out, axis);
  return ScalarField::from_spectral(g, std::move(out));
}

VectorField gradient(const ScalarField& f) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < f.grid().dimension(); ++a) comps.push_back(partial(f, a));
  return VectorField(std::move(comps));
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  std::vector<cplx> out(g.size(), cplx{});
  std::vector<cplx> tmp(g.size());
  for (int a = 0; a < v.dimension(); ++a) {
    kernels::derivative(g, v[a].spectral(), tmp, a);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += tmp[i];
  }
  return ScalarField::from_spectral(g, std::move(out));
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  auto c = copy_spectral(f);
  for (std::size_t i = 0; i < g.size(); ++i) c[i] *= -g.k_squared(i);
  return ScalarField::from_spectral(g, std::move(c));
}

VectorField perp_grad_2d(const ScalarField& f) {
  require_2d(f.grid(), "perp_grad_2d");
  ScalarField d2 = partial(f, 1);
  auto& c = d2.spectral_mut();
  for (auto& v : c) v = -v;
  return VectorField({std::move(d2), partial(f, 0)});
}

ScalarField perp_div_2d(const VectorField& v) {
  require_2d(v.grid(), "perp_div_2d");
  const Grid& g = v.grid();
  std::vector<cplx> a(g.size()), b(g.size());
  kernels::derivative(g, v[0].spectral(), a, 1);
  kernels::derivative(g, v[1].spectral(), b, 0);
  for (std::size_t i = 0; i < g.size(); ++i) a[i] = b[i] - a[i];
  return ScalarField::from_spectral(g, std::move(a));
}

VectorField leray_project(const VectorField& v) {
  const Grid& g = v.grid();
  std::vector<std::vector<cplx>> comps;
  for (int a = 0; a < v.dimension(); ++a) comps.push_back(copy_spectral(v[a]));
  std::vector<std::span<cplx>> spans(comps.begin(), comps.end());
  kernels::leray(g, spans);
  std::vector<ScalarField> out;
  for (auto& c : comps) out.push_back(ScalarField::from_spectral(g, std::move(c)));
  return VectorField(std::move(out));
}

ScalarField galerkin_project(const ScalarField& f, int cutoff_modes) {
  const Grid& g = f.grid();
  if (cutoff_modes < 0) throw ValidationError("Galerkin cutoff must be nonnegative");
  if (cutoff_modes >= g.resolution() / 2) return f;
  auto c = copy_spectral(f);
  kernels::galerkin(g, c, cutoff_modes);
  return ScalarField::from_spectral(g, std::move(c));
}

VectorField galerkin_project(const VectorField& v, int cutoff_modes) {
  std::vector<ScalarField> out;
  for (int a = 0; a < v.dimension(); ++a) out.push_back(galerkin_project(v[a], cutoff_modes));
  return VectorField(std::move(out));
}

VectorField stokes_apply(const VectorField& u) {
  const Grid& g = u.grid();
  std::vector<ScalarField> comps;
  for (int a = 0; a < u.dimension(); ++a) {
    auto c = copy_spectral(u[a]);
    for (std::size_t i = 0; i < g.size(); ++i) c[i] *= g.k_squared(i);
    comps.push_back(ScalarField::from_spectral(g, std::move(c)));
  }
  return leray_project(VectorField(std::move(comps)));
}

double max_divergence_mode(const VectorField& v) {
  const Grid& g = v.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx kdotv{};
    for (int a = 0; a < v.dimension(); ++a) kdotv += g.k_component(i, a) * v[a].spectral()[i];
    worst = std::max(worst, std::abs(kdotv));
  }
  return worst;
}

VectorField implicit_diffusion_solve(const VectorField& rhs, double dt, double viscosity) {
  if (!(dt > 0.0)) throw ValidationError("implicit diffusion solve needs dt > 0");
  if (viscosity < 0.0) throw ValidationError("viscosity must be nonnegative");
  const Grid& g = rhs.grid();
  const double tol = 1e-12 * (1.0 + sobolev_norm(rhs, 1));
  VectorField v = max_divergence_mode(rhs) > tol ? leray_project(rhs) : rhs;
  for (int a = 0; a < v.dimension(); ++a) {
    kernels::implicit_diffusion(g, v[a].spectral_mut(), dt * viscosity);
  }
  return v;
}

double gradient_sup(const ScalarField& f) {
  const VectorField grad = gradient(f);
  return lp_norm(grad, std::numeric_limits<double>::infinity());
}

double gradient_sup(const VectorField& u) {
  const Grid& g = u.grid();
  std::vector<double> frob(g.size(), 0.0);
  std::vector<cplx> tmp(g.size());
  std::vector<double> phys(g.size());
  for (int c = 0; c < u.dimension(); ++c) {
    for (int a = 0; a < g.dimension(); ++a) {
      kernels::derivative(g, u[c].spectral(), tmp, a);
      g.inverse(tmp, phys);
      for (std::size_t i = 0; i < g.size(); ++i) frob[i] += phys[i] * phys[i];
    }
  }
  double m = 0.0;
  for (double v : frob) m = std::max(m, v);
  return std::sqrt(m);
}

}  // namespace sbsim
