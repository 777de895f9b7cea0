#include "sbsim/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbsim/error.hpp"

namespace sbsim {

MollifierSpec::MollifierSpec(double eps) : epsilon(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ValidationError("mollifier epsilon must be positive, got " + std::to_string(eps));
  }
}

double MollifierSpec::multiplier(double k_squared) const noexcept {
  return std::exp(-epsilon * epsilon * k_squared);
}

ScalarField mollify(const ScalarField& f, const MollifierSpec& spec) {
  if (!(spec.epsilon > 0.0)) throw ValidationError("mollifier epsilon must be positive");
  const Grid& g = f.grid();
  auto c = f.spectral();
  std::vector<cplx> out(c.begin(), c.end());
  const auto& k2 = g.k_squared_table();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= spec.multiplier(k2[i]);
  return ScalarField::from_spectral(g, std::move(out));
}

VectorField mollify(const VectorField& v, const MollifierSpec& spec) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < v.dimension(); ++a) comps.push_back(mollify(v[a], spec));
  return VectorField(std::move(comps));
}

double smoothing_gain_bound(double epsilon) {
  // y^2 = z; maximise (e^2 + z) e^{-2z}: stationary at z = 1/2 - e^2
  const double e2 = epsilon * epsilon;
  const double z = std::max(0.0, 0.5 - e2);
  return std::sqrt(e2 + z) * std::exp(-z);
}

}  // namespace sbsim
