#pragma once

#include "sbsim/field.hpp"

namespace sbsim {

/// Velocity/temperature pair at time t. u is divergence-free.
struct State {
  double t = 0.0;
  VectorField u;
  ScalarField theta;

  explicit State(const Grid& grid) : u(grid), theta(grid) {}
  State(double time, VectorField velocity, ScalarField temperature)
      : t(time), u(std::move(velocity)), theta(std::move(temperature)) {}

  const Grid& grid() const noexcept { return theta.grid(); }
};

/// Builds a State, Leray-projecting the velocity.
State make_state(VectorField u, ScalarField theta, double t = 0.0);

}  // namespace sbsim
