#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sbsim/field.hpp"
#include "sbsim/rng.hpp"

namespace sbsim {

enum class BasisTag { constant, cos, sin };

/// One retained eigenpair of the covariance Q: e(x) = cos(k.x), sin(k.x) or 1.
struct NoiseMode {
  Wavenumber k{0, 0, 0};
  BasisTag tag = BasisTag::cos;
  double lambda = 1.0;
};

/// Truncated Q-Wiener process W = sum_k sqrt(lambda_k) e_k W_k.
class QWienerSpec {
 public:
  QWienerSpec() = default;
  explicit QWienerSpec(std::vector<NoiseMode> modes);

  /// All k with 1 <= |k|_inf <= max_wavenumber in a half space, each with a
  /// cos and a sin member, lambda_k = |k|^(-2 gamma); optionally the constant
  /// mode with lambda_0.
  static QWienerSpec power_law(int dimension, int max_wavenumber, double gamma,
                               bool include_mean = false, double lambda0 = 1.0);

  std::size_t size() const noexcept { return modes_.size(); }
  const std::vector<NoiseMode>& modes() const noexcept { return modes_; }
  const NoiseMode& mode(std::size_t j) const { return modes_.at(j); }
  double trace() const noexcept;

  /// Checks every mode is representable on `grid` (no Nyquist components).
  void check_grid(const Grid& grid) const;

 private:
  std::vector<NoiseMode> modes_;
};

/// Samples of the basis function e_j on `grid`.
ScalarField basis_function(const NoiseMode& mode, const Grid& grid);

struct NoiseIncrement {
  std::vector<double> dW;
  double dt = 0.0;
};

/// dW_j ~ N(0, dt), a pure function of (stream, step). With substeps > 1 the
/// increment is the sum of `substeps` finer increments of size dt/substeps, so
/// runs at dt and dt/2 can share one Brownian path.
NoiseIncrement sample_increment(const QWienerSpec& spec, double dt, const RandomStream& stream,
                                std::uint64_t step, int substeps = 1);

enum class NoiseKind { off, additive, multiplicative };

/// Noise intensity f. Mode j acts as
///   additive:       f e_j = sigma_j e_j(x) d_j            (or a custom field)
///   multiplicative: f(u, theta) e_j = sigma_j e_j(x) (b(u, theta) * d_j)
/// with b_i = a0 + a1 u_i + a2 theta taken componentwise and d_j a unit
/// direction. With a0 = 1, a1 = a2 = 0 the two coincide.
struct NoiseIntensity {
  NoiseKind kind = NoiseKind::off;
  std::vector<std::array<double, 3>> directions;
  std::vector<double> amplitudes;
  double a0 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  /// Additive only; when non-empty replaces sigma_j e_j d_j mode by mode.
  std::vector<VectorField> custom_fields;
  /// Additive only; scalar time envelope, identity when empty.
  std::function<double(double)> envelope;

  static NoiseIntensity off();
  /// Directions default to the unit vector perpendicular to k (2D: k_perp/|k|).
  static NoiseIntensity additive(const QWienerSpec& spec, int dimension, double amplitude = 1.0);
  static NoiseIntensity multiplicative(const QWienerSpec& spec, int dimension, double a0, double a1,
                                       double a2, double amplitude = 1.0);

  /// C1 = |a0| + |a1| + |a2| (multiplicative), reported for the growth bound.
  double growth_constant() const noexcept;
  /// C2 = |a1| + |a2| (multiplicative), 0 for additive.
  double lipschitz_constant() const noexcept;
};

std::array<double, 3> default_direction(const Wavenumber& k, int dimension);

/// Evaluates P sum_j sqrt(lambda_j) c_j f(u, theta) e_j on one grid.
///
/// Immutable after construction, so one instance may serve many threads.
class NoiseOperator {
 public:
  NoiseOperator() = default;
  NoiseOperator(const Grid& grid, QWienerSpec spec, NoiseIntensity intensity);

  bool active() const noexcept;
  const QWienerSpec& spec() const noexcept { return spec_; }
  const NoiseIntensity& intensity() const noexcept { return intensity_; }

  /// out[a] += scale * P sum_j sqrt(lambda_j) c_j f(u, theta) e_j
  void accumulate(const VectorField& u, const ScalarField& theta, std::span<const double> coeffs,
                  double t, double scale, std::span<std::span<cplx>> out) const;

  VectorField evaluate(const VectorField& u, const ScalarField& theta,
                       std::span<const double> coeffs, double t = 0.0) const;

  /// Mean (k = 0) value of each velocity component of the evaluated field.
  std::array<double, 3> mean(const VectorField& u, const ScalarField& theta,
                             std::span<const double> coeffs, double t = 0.0) const;

 private:
  struct SparseMode {
    std::vector<std::size_t> index;
    std::vector<std::array<cplx, 3>> value;
  };

  Grid grid_{2, 4};
  QWienerSpec spec_;
  NoiseIntensity intensity_;
  std::vector<SparseMode> unit_fields_;                  // P(sigma e_j d_j), sparse
  std::vector<std::vector<std::vector<cplx>>> dense_;   // P(custom field j)
  std::vector<SparseMode> raw_fields_;                   // sigma e_j d_j before P
};

/// P sum_j sqrt(lambda_j) f(u, theta) e_j dW_j
VectorField apply_noise(const NoiseIntensity& f, const QWienerSpec& spec, const VectorField& u,
                        const ScalarField& theta, const NoiseIncrement& inc, double t = 0.0);

/// sqrt(sum_j lambda_j ||P f(u, theta) e_j||^2_{H^s}) with the H^s norm
/// normalised so that s = 0 is the L^2 norm.
double hs_norm(const NoiseIntensity& f, const QWienerSpec& spec, const VectorField& u,
               const ScalarField& theta, int s);

struct ItoIsometryEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of E||sum_m P f dW_m||^2_{L^2} at a frozen state
/// against n_steps * dt * hs_norm(s = 0)^2.
ItoIsometryEstimate ito_isometry_estimate(const NoiseIntensity& f, const QWienerSpec& spec,
                                          const VectorField& u, const ScalarField& theta, double dt,
                                          int n_steps, int n_paths, std::uint64_t master_seed);

}  // namespace sbsim
