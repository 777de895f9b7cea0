#include "sbsim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbsim/error.hpp"
#include "sbsim/spectral.hpp"

namespace sbsim {
namespace {

struct AxisStencil {
  int index[4];
  double weight[4];
  int count;
};

inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

inline AxisStencil make_stencil(double s, int n, Interpolation kind) {
  const double fl = std::floor(s);
  const int i0 = static_cast<int>(fl);
  const double t = s - fl;
  AxisStencil st{};
  if (kind == Interpolation::linear) {
    st.count = 2;
    st.index[0] = wrap(i0, n);
    st.index[1] = wrap(i0 + 1, n);
    st.weight[0] = 1.0 - t;
    st.weight[1] = t;
    return st;
  }
  // four-point Lagrange on nodes -1, 0, 1, 2
  st.count = 4;
  for (int q = 0; q < 4; ++q) st.index[q] = wrap(i0 - 1 + q, n);
  const double tm1 = t - 1.0;
  const double tm2 = t - 2.0;
  const double tp1 = t + 1.0;
  st.weight[0] = -t * tm1 * tm2 / 6.0;
  st.weight[1] = tp1 * tm1 * tm2 / 2.0;
  st.weight[2] = -tp1 * t * tm2 / 2.0;
  st.weight[3] = tp1 * t * tm1 / 6.0;
  return st;
}

}  // namespace

double interpolate(const Grid& grid, std::span<const double> samples, const std::array<double, 3>& position,
                   Interpolation kind) {
  const int n = grid.resolution();
  const std::size_t nn = static_cast<std::size_t>(n);
  if (grid.dimension() == 2) {
    const AxisStencil a = make_stencil(position[0], n, kind);
    const AxisStencil b = make_stencil(position[1], n, kind);
    double acc = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int p = 0; p < a.count; ++p) {
      const std::size_t row = static_cast<std::size_t>(a.index[p]) * nn;
      double racc = 0.0;
      for (int q = 0; q < b.count; ++q) {
        const double v = samples[row + static_cast<std::size_t>(b.index[q])];
        racc += b.weight[q] * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      acc += a.weight[p] * racc;
    }
    if (kind == Interpolation::linear) acc = std::clamp(acc, lo, hi);
    return acc;
  }
  const AxisStencil a = make_stencil(position[0], n, kind);
  const AxisStencil b = make_stencil(position[1], n, kind);
  const AxisStencil c = make_stencil(position[2], n, kind);
  double acc = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int p = 0; p < a.count; ++p) {
    double pacc = 0.0;
    for (int q = 0; q < b.count; ++q) {
      const std::size_t base = (static_cast<std::size_t>(a.index[p]) * nn + static_cast<std::size_t>(b.index[q])) * nn;
      double qacc = 0.0;
      for (int r = 0; r < c.count; ++r) {
        const double v = samples[base + static_cast<std::size_t>(c.index[r])];
        qacc += c.weight[r] * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      pacc += b.weight[q] * qacc;
    }
    acc += a.weight[p] * pacc;
  }
  if (kind == Interpolation::linear) acc = std::clamp(acc, lo, hi);
  return acc;
}

namespace {

double max_speed(const VectorField& u) { return lp_norm(u, std::numeric_limits<double>::infinity()); }

ScalarField semi_lagrangian(const ScalarField& theta, const VectorField& u, double dt, Interpolation kind) {
  const Grid& g = theta.grid();
  const int d = g.dimension();
  const std::size_t n = static_cast<std::size_t>(g.resolution());
  const double scale = dt / g.spacing();
  std::array<std::span<const double>, 3> uc{};
  for (int a = 0; a < d; ++a) uc[a] = u[a].physical();
  auto th = theta.physical();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::array<double, 3> node{0.0, 0.0, 0.0};
    std::size_t rem = i;
    for (int a = d - 1; a >= 0; --a) {
      node[a] = static_cast<double>(rem % n);
      rem /= n;
    }
    std::array<double, 3> mid = node;
    for (int a = 0; a < d; ++a) mid[a] -= 0.5 * scale * uc[a][i];
    std::array<double, 3> dep = node;
    for (int a = 0; a < d; ++a) dep[a] -= scale * interpolate(g, uc[a], mid, kind);
    out[i] = interpolate(g, th, dep, kind);
  }
  return ScalarField::from_physical(g, std::move(out));
}

class SpectralTransportRhs {
 public:
  SpectralTransportRhs(const VectorField& u, bool dealias) : grid_(u.grid()), dealias_(dealias) {
    const int d = grid_.dimension();
    std::vector<cplx> tmp(grid_.size());
    for (int a = 0; a < d; ++a) {
      auto c = u[a].spectral();
      tmp.assign(c.begin(), c.end());
      if (dealias_) kernels::dealias(grid_, tmp);
      velocity_[a].resize(grid_.size());
      grid_.inverse(tmp, velocity_[a]);
    }
  }

  // out = -u . grad theta
  void operator()(std::span<const cplx> theta, std::span<cplx> out) const {
    const int d = grid_.dimension();
    const std::size_t size = grid_.size();
    std::vector<cplx> th(theta.begin(), theta.end());
    if (dealias_) kernels::dealias(grid_, th);
    std::vector<cplx> dth(size);
    std::vector<double> dphys(size);
    std::vector<double> prod(size, 0.0);
    for (int a = 0; a < d; ++a) {
      kernels::derivative(grid_, th, dth, a);
      grid_.inverse(dth, dphys);
      for (std::size_t i = 0; i < size; ++i) prod[i] -= velocity_[a][i] * dphys[i];
    }
    grid_.forward(prod, out);
    if (dealias_) kernels::dealias(grid_, out);
    kernels::zero_nyquist(grid_, out);
  }

 private:
  Grid grid_;
  bool dealias_;
  std::array<std::vector<double>, 3> velocity_;
};

ScalarField spectral_rk2(const ScalarField& theta, const VectorField& u, double dt, bool dealias) {
  const Grid& g = theta.grid();
  const SpectralTransportRhs rhs(u, dealias);
  auto th0 = theta.spectral();
  std::vector<cplx> k1(g.size()), k2(g.size()), stage(g.size());
  rhs(th0, k1);
  for (std::size_t i = 0; i < g.size(); ++i) stage[i] = th0[i] + dt * k1[i];
  rhs(stage, k2);
  std::vector<cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = th0[i] + 0.5 * dt * (k1[i] + k2[i]);
  return ScalarField::from_spectral(g, std::move(out));
}

}  // namespace

AdvectResult advect(const ScalarField& theta, const VectorField& u, double dt, const AdvectionScheme& scheme) {
  if (theta.grid() != u.grid()) throw ValidationError("advect: theta and u live on different grids");
  if (!(dt >= 0.0)) throw ValidationError("advect needs dt >= 0");
  const Grid& g = theta.grid();
  const double cfl = dt * max_speed(u) / g.spacing();
  AdvectResult result{theta, cfl > scheme.cfl_cap, cfl};
  if (cfl == 0.0) return result;
  if (scheme.kind == AdvectionKind::semi_lagrangian) {
    result.theta = semi_lagrangian(theta, u, dt, scheme.interpolation);
  } else {
    result.theta = spectral_rk2(theta, u, dt, scheme.dealias);
  }
  return result;
}

double grad_sup(const ScalarField& theta) { return gradient_sup(theta); }

}  // namespace sbsim
