#include "sbsim/field.hpp"

#include "sbsim/error.hpp"

namespace sbsim {

ScalarField::ScalarField(Grid grid)
    : grid_(std::move(grid)), physical_(grid_.size(), 0.0), spectral_(grid_.size(), cplx{}) {}

ScalarField ScalarField::from_physical(Grid grid, std::vector<double> samples) {
  if (samples.size() != grid.size()) {
    throw ValidationError("sample count " + std::to_string(samples.size()) +
                          " does not match grid size " + std::to_string(grid.size()));
  }
  ScalarField f(std::move(grid));
  f.physical_ = std::move(samples);
  f.spectral_clean_ = false;
  return f;
}

ScalarField ScalarField::from_spectral(Grid grid, std::vector<cplx> coefficients) {
  if (coefficients.size() != grid.size()) {
    throw ValidationError("coefficient count " + std::to_string(coefficients.size()) +
                          " does not match grid size " + std::to_string(grid.size()));
  }
  ScalarField f(std::move(grid));
  f.spectral_ = std::move(coefficients);
  f.physical_clean_ = false;
  return f;
}

ScalarField ScalarField::from_function(
    Grid grid, const std::function<double(const std::array<double, 3>&)>& f) {
  std::vector<double> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dimension(); ++a) x[a] = grid.coordinate(i, a);
    samples[i] = f(x);
  }
  return from_physical(std::move(grid), std::move(samples));
}

std::span<const double> ScalarField::physical() const {
  if (!physical_clean_) {
    grid_.inverse(spectral_, physical_);
    physical_clean_ = true;
  }
  return physical_;
}

std::span<const cplx> ScalarField::spectral() const {
  if (!spectral_clean_) {
    grid_.forward(physical_, spectral_);
    spectral_clean_ = true;
  }
  return spectral_;
}

std::vector<double>& ScalarField::physical_mut() {
  physical();
  spectral_clean_ = false;
  return physical_;
}

std::vector<cplx>& ScalarField::spectral_mut() {
  spectral();
  physical_clean_ = false;
  return spectral_;
}

void ScalarField::sync() const {
  physical();
  spectral();
}

VectorField::VectorField(Grid grid) {
  for (int i = 0; i < grid.dimension(); ++i) components_.emplace_back(grid);
}

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("vector field needs at least one component");
  const Grid& g = components_.front().grid();
  if (static_cast<int>(components_.size()) != g.dimension()) {
    throw ValidationError("vector field component count must equal grid dimension");
  }
  for (const auto& c : components_) {
    if (c.grid() != g) throw ValidationError("vector field components must share one grid");
  }
}

void VectorField::sync() const {
  for (const auto& c : components_) c.sync();
}

}  // namespace sbsim
