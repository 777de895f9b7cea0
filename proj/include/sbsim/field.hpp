#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "sbsim/grid.hpp"

namespace sbsim {

/// Real scalar field on the torus holding samples and Fourier coefficients.
///
/// Either representation may be stale; accessors synchronise lazily. The
/// lazy synchronisation mutates the cache, so a field whose representations
/// are not both clean must not be read from two threads at once. Call
/// `sync()` first when sharing.
class ScalarField {
 public:
  explicit ScalarField(Grid grid);

  static ScalarField from_physical(Grid grid, std::vector<double> samples);
  static ScalarField from_spectral(Grid grid, std::vector<cplx> coefficients);
  /// Samples f(x) at every grid point; x has `dimension()` meaningful entries.
  static ScalarField from_function(Grid grid,
                                   const std::function<double(const std::array<double, 3>&)>& f);

  const Grid& grid() const noexcept { return grid_; }

  std::span<const double> physical() const;
  std::span<const cplx> spectral() const;

  /// Mutable access; invalidates the other representation.
  std::vector<double>& physical_mut();
  std::vector<cplx>& spectral_mut();

  bool physical_clean() const noexcept { return physical_clean_; }
  bool spectral_clean() const noexcept { return spectral_clean_; }

  /// Makes both representations clean.
  void sync() const;

 private:
  Grid grid_;
  mutable std::vector<double> physical_;
  mutable std::vector<cplx> spectral_;
  mutable bool physical_clean_ = true;
  mutable bool spectral_clean_ = true;
};

/// d components sharing one grid.
class VectorField {
 public:
  explicit VectorField(Grid grid);
  explicit VectorField(std::vector<ScalarField> components);

  const Grid& grid() const noexcept { return components_.front().grid(); }
  int dimension() const noexcept { return static_cast<int>(components_.size()); }

  ScalarField& operator[](int i) { return components_[static_cast<std::size_t>(i)]; }
  const ScalarField& operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }

  void sync() const;

 private:
  std::vector<ScalarField> components_;
};

}  // namespace sbsim
