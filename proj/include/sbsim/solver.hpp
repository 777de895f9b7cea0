#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbsim/noise.hpp"
#include "sbsim/record.hpp"
#include "sbsim/rng.hpp"
#include "sbsim/state.hpp"
#include "sbsim/transport.hpp"

namespace sbsim {

/// Deterministic control h in H_0 coordinates: the drift it induces is
/// P sum_k sqrt(lambda_k) h_k f e_k, the same mode indexing as the noise.
/// Piecewise constant; piece p holds on [starts[p], starts[p+1]).
struct Control {
  std::vector<double> starts;
  std::vector<std::vector<double>> values;
  double t_end = 0.0;

  static Control zero(std::size_t modes, double t_end);
  /// Constant in time.
  static Control constant(std::vector<double> value, double t_end);
  /// `blocks` equal pieces over [0, t_end]; params is blocks x modes, piece-major.
  static Control blocks(std::size_t modes, double t_end, int blocks, std::span<const double> params);

  std::size_t modes() const noexcept { return values.empty() ? 0 : values.front().size(); }
  std::span<const double> at(double t) const;
  /// sum over pieces of duration * |h|^2 (no 1/2).
  double squared_norm() const;
  Control scaled(double factor) const;
  void validate(std::size_t modes, double horizon) const;
};

enum class DiagnosticsLevel { full, light, none };

struct SolverConfig {
  Grid grid{2, 32};
  int sobolev_index = 3;
  double dt = 1e-2;
  double t_end = 1.0;
  double viscosity = 1.0;
  /// 0 disables the cutoff (phi = 1).
  double cutoff_R = 0.0;
  std::optional<int> galerkin_modes;
  double epsilon = 1.0;
  /// false drops u.grad u and the temperature transport (linearized runs).
  bool nonlinear = true;
  QWienerSpec spec;
  NoiseIntensity noise;
  int noise_substeps = 1;
  std::optional<Control> control;
  AdvectionScheme advection;
  std::optional<StoppingRule> stopping;
  DiagnosticsLevel diagnostics = DiagnosticsLevel::full;
  /// Coefficient magnitude treated as blow-up even when still finite.
  double blowup_limit = 1e100;

  static int default_sobolev_index(int dimension);
  void validate() const;
  int buoyancy_axis() const noexcept { return grid.dimension() - 1; }
  std::size_t step_count() const;
};

/// Smooth partition: 1 on [0, R], 0 on [2R, inf), nonincreasing.
double cutoff(double x, double R);

struct MomentumDrift {
  VectorField drift;
  double phi = 1.0;
};

struct StepInfo {
  double phi = 1.0;
  bool cfl_warning = false;
};

/// Semi-implicit Euler-Maruyama stepper for one configuration.
///
/// Safe to share between threads once constructed; each call only reads it.
class Stepper {
 public:
  explicit Stepper(SolverConfig config);

  const SolverConfig& config() const noexcept { return config_; }
  const NoiseOperator& noise_operator() const noexcept { return noise_; }

  /// phi at this state (1 when the cutoff is disabled).
  double phi(const State& state) const;
  MomentumDrift momentum_rhs(const State& state) const;

  /// Advances state by dt using the increment drawn from `stream` at step m.
  StepInfo step(State& state, const RandomStream* stream, std::uint64_t m) const;
  /// Same, with an explicit Brownian increment (size spec().size()).
  StepInfo step_with_increment(State& state, std::span<const double> dW, std::uint64_t m) const;

  /// Control drift P f h at time t (zero field when no control).
  VectorField control_field(const State& state, double t) const;

 private:
  SolverConfig config_;
  NoiseOperator noise_;
};

using StepObserver = std::function<void(const State&, const DiagnosticRow&)>;

/// Diagnostics of a single state. `phi` is stored as given.
DiagnosticRow compute_row(const State& state, const SolverConfig& config, DiagnosticsLevel level, double phi);

/// Galerkin-projects the initial velocity when configured.
State prepare_initial(const State& initial, const SolverConfig& config);

TrajectoryRecord run(const Stepper& stepper, const State& initial, const RandomStream* stream,
                     const std::vector<StepObserver>& observers = {});
TrajectoryRecord run(const SolverConfig& config, const State& initial, const RandomStream* stream,
                     const std::vector<StepObserver>& observers = {});

struct TrajectoryFunctional {
  std::string name;
  std::function<double(const TrajectoryRecord&)> evaluate;
};

/// ||u(T)||^2, sup_t ||u||^2, sup_t ||grad u||_inf, ||theta(T)||_inf.
std::vector<TrajectoryFunctional> default_functionals();

struct FunctionalSummary {
  std::string name;
  double mean = 0.0;
  double variance = 0.0;
  double max = 0.0;
};

struct EnsembleSummary {
  std::size_t n_paths = 0;
  std::size_t blown_up = 0;
  std::vector<FunctionalSummary> functionals;
  /// values[f][path]
  std::vector<std::vector<double>> values;
  const FunctionalSummary& get(const std::string& name) const;
};

/// Evaluates fn(path) for path in [0, count) across `threads` workers
/// (0 = hardware concurrency). Results are stored by index.
std::vector<double> parallel_map(std::size_t count, const std::function<double(std::size_t)>& fn,
                                 unsigned threads = 0);

/// Sum with pairwise reduction; the result does not depend on thread count.
double pairwise_sum(std::span<const double> values);

EnsembleSummary run_ensemble(const SolverConfig& config, const State& initial, std::size_t n_paths,
                             std::uint64_t master_seed,
                             const std::vector<TrajectoryFunctional>& functionals = default_functionals(),
                             unsigned threads = 0);

}  // namespace sbsim
