#pragma once

#include <span>

#include "sbsim/field.hpp"

namespace sbsim {

enum class AdvectionKind { semi_lagrangian, spectral_rk2 };
enum class Interpolation { cubic, linear };

/// Linear interpolation keeps the discrete maximum principle; cubic does not.
struct AdvectionScheme {
  AdvectionKind kind = AdvectionKind::semi_lagrangian;
  Interpolation interpolation = Interpolation::cubic;
  bool dealias = true;
  /// dt * ||u||_inf / h above this raises the CFL warning flag.
  double cfl_cap = 1.0;
};

struct AdvectResult {
  ScalarField theta;
  bool cfl_warning = false;
  double cfl_number = 0.0;
};

/// One step of d theta + (u . grad) theta dt = 0.
///
/// Semi-Lagrangian: theta'(x) = theta(X), X = x - dt u(x - dt/2 u(x)),
/// periodic, with the configured interpolation. Spectral: Heun (RK2) on
/// -u . grad theta with the product dealiased by the 2/3 rule.
AdvectResult advect(const ScalarField& theta, const VectorField& u, double dt, const AdvectionScheme& scheme);

/// max over grid points of |grad theta| (spectral gradient).
double grad_sup(const ScalarField& theta);

/// Periodic interpolation of grid samples at a point given in index units
/// (position s along axis a means x = -pi + s h).
double interpolate(const Grid& grid, std::span<const double> samples, const std::array<double, 3>& position,
                   Interpolation kind);

}  // namespace sbsim
