#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sbsim {

using cplx = std::complex<double>;
using Wavenumber = std::array<int, 3>;

namespace detail {
struct GridData;
}

/// Uniform periodic grid on the torus (-pi, pi)^d, d in {2, 3}.
///
/// Samples and coefficients are stored row-major with axis 0 slowest. Sample
/// j along an axis sits at x = -pi + j * (2 pi / n). Spectral index j carries
/// wavenumber j for j <= n/2 and j - n otherwise, so the wavenumber set is
/// {-n/2+1, ..., n/2}.
///
/// Copies share immutable tables and FFT plans. Transforms may run
/// concurrently from several threads.
class Grid {
 public:
  Grid(int dimension, int resolution);

  int dimension() const noexcept;
  int resolution() const noexcept;
  std::size_t size() const noexcept;
  double spacing() const noexcept;
  /// (2 pi)^d
  double volume() const noexcept;

  Wavenumber wavenumber(std::size_t index) const noexcept;
  double k_squared(std::size_t index) const noexcept;
  /// Component `axis` of the wavenumber at `index`, as a double.
  double k_component(std::size_t index, int axis) const noexcept;
  /// Any component equals n/2.
  bool is_nyquist(std::size_t index) const noexcept;
  /// Every |k_i| <= n/3.
  bool in_dealias_band(std::size_t index) const noexcept;
  int max_abs_component(std::size_t index) const noexcept;
  /// Flat index of wavenumber k (components reduced modulo n).
  std::size_t index_of(const Wavenumber& k) const noexcept;
  /// Physical coordinate along `axis` of sample `index`.
  double coordinate(std::size_t index, int axis) const noexcept;

  const std::vector<double>& k_squared_table() const noexcept;
  const std::vector<Wavenumber>& wavenumber_table() const noexcept;

  /// Samples -> coefficients with u_hat(k) = (2 pi)^-d Int u e^{-ik.x} dx.
  void forward(std::span<const double> physical, std::span<cplx> spectral) const;
  /// Coefficients -> samples (real part of the synthesis sum).
  void inverse(std::span<const cplx> spectral, std::span<double> physical) const;

  bool operator==(const Grid& other) const noexcept;
  bool operator!=(const Grid& other) const noexcept { return !(*this == other); }

 private:
  std::shared_ptr<const detail::GridData> data_;
};

}  // namespace sbsim
