#pragma once

#include "sbsim/field.hpp"

namespace sbsim {

/// Gaussian Fourier multiplier m(k) = exp(-epsilon^2 |k|^2).
struct MollifierSpec {
  double epsilon = 1.0;

  explicit MollifierSpec(double eps);
  double multiplier(double k_squared) const noexcept;
};

ScalarField mollify(const ScalarField& f, const MollifierSpec& spec);
VectorField mollify(const VectorField& v, const MollifierSpec& spec);

/// sup_{y >= 0} sqrt(epsilon^2 + y^2) e^{-y^2}, the analytic bound on
/// epsilon ||rho f||_{H^s} / ||f||_{H^{s-1}}. Tends to sup y e^{-y^2} as
/// epsilon -> 0.
double smoothing_gain_bound(double epsilon);

}  // namespace sbsim
