#pragma once

#include <span>

#include "sbsim/field.hpp"

namespace sbsim {

inline constexpr int kDefaultSobolevCap = 8;

ScalarField to_spectral(const ScalarField& f);
ScalarField to_physical(const ScalarField& f);

/// sqrt(sum_k (1 + |k|^2)^s |u_hat(k)|^2); vector fields sum over components.
double sobolev_norm(const ScalarField& f, int s, int cap = kDefaultSobolevCap);
double sobolev_norm(const VectorField& v, int s, int cap = kDefaultSobolevCap);

/// Discrete L^p norm with (2 pi)^d / n^d quadrature weights; p = infinity
/// gives the sample maximum. Vector fields use the pointwise Euclidean norm.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& v, double p);

/// (a, b)_{L^2} computed from coefficients (exact for band-limited fields).
double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_inner(const VectorField& a, const VectorField& b);

ScalarField partial(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
/// (-d2 f, d1 f); 2D only.
VectorField perp_grad_2d(const ScalarField& f);
/// -d2 v1 + d1 v2; 2D only.
ScalarField perp_div_2d(const VectorField& v);

VectorField leray_project(const VectorField& v);
/// Zeroes every coefficient with |k|_inf > cutoff_modes.
ScalarField galerkin_project(const ScalarField& f, int cutoff_modes);
VectorField galerkin_project(const VectorField& v, int cutoff_modes);
/// A u = -P Laplacian u.
VectorField stokes_apply(const VectorField& u);
/// Solves (I + dt * viscosity * A) v = rhs; rhs is Leray-projected first when
/// it is not divergence-free.
VectorField implicit_diffusion_solve(const VectorField& rhs, double dt, double viscosity = 1.0);

/// max_k |k . v_hat(k)|
double max_divergence_mode(const VectorField& v);

/// Sample max of the Euclidean norm of the spectral gradient.
double gradient_sup(const ScalarField& f);
/// Sample max of the Frobenius norm of the velocity gradient tensor.
double gradient_sup(const VectorField& u);

/// In-place coefficient kernels shared by the time steppers.
namespace kernels {

void zero_nyquist(const Grid& g, std::span<cplx> c);
void dealias(const Grid& g, std::span<cplx> c);
/// out = i k_axis * in, Nyquist zeroed.
void derivative(const Grid& g, std::span<const cplx> in, std::span<cplx> out, int axis);
/// components[a] are the d coefficient arrays of one vector field.
void leray(const Grid& g, std::span<std::span<cplx>> components);
void galerkin(const Grid& g, std::span<cplx> c, int cutoff_modes);
void implicit_diffusion(const Grid& g, std::span<cplx> c, double dt_times_viscosity);
/// (2 pi)^d sum |c|^2
double l2_squared(const Grid& g, std::span<const cplx> c);
double sobolev_squared(const Grid& g, std::span<const cplx> c, int s);

}  // namespace kernels

}  // namespace sbsim
