#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbsim/solver.hpp"

namespace sbsim {

enum class EventDirection { at_least, at_most };

/// {F(U) >= a} or {F(U) <= a} for a trajectory functional F.
struct RareEvent {
  TrajectoryFunctional functional;
  double threshold = 0.0;
  EventDirection direction = EventDirection::at_least;

  /// Nonnegative exactly when the event occurs.
  double margin(const TrajectoryRecord& record) const;
  bool occurs(const TrajectoryRecord& record) const { return margin(record) >= 0.0; }
};

/// Terminal amplitude x of the velocity component x e(x) d along the basis
/// function of `mode` and unit direction d.
TrajectoryFunctional mode_amplitude(const NoiseMode& mode, const std::array<double, 3>& direction);
/// sup_t ||u(t)||_{L^2} (needs diagnostic rows).
TrajectoryFunctional sup_l2_norm();

/// 1/2 sum_pieces duration |h|^2 in H_0 coordinates.
double control_cost(const Control& h, const QWienerSpec& spec);
/// Same, also rejecting a control whose time grid does not end at `horizon`.
double control_cost(const Control& h, const QWienerSpec& spec, double horizon);

/// Deterministic controlled run (epsilon = 0); 2D only.
TrajectoryRecord solve_skeleton(const SolverConfig& config, const State& initial, const Control& h);

struct McEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t hits = 0;
  std::size_t n_paths = 0;
};

/// 95% normal-approximation interval; rule of three when no (or every) path hits.
McEstimate binomial_estimate(std::size_t hits, std::size_t n);

McEstimate mc_rare_event(const SolverConfig& config, const State& initial, const RareEvent& event,
                         double epsilon, std::size_t n_paths, std::uint64_t master_seed, unsigned threads = 0);

struct SmallNoiseEstimate {
  double epsilon = 0.0;
  /// E sup_t (||u^eps - u^0||^2 + ||theta^eps - theta^0||^2)^{1/2}
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n_paths = 0;
  std::size_t blown_up = 0;
};

/// Distance in C([0,T]; L^2) between noisy paths and the eps = 0 path with
/// the same control; blown-up paths are excluded from the mean.
SmallNoiseEstimate small_noise_distance(const SolverConfig& config, const State& initial, double epsilon,
                                        std::size_t n_paths, std::uint64_t master_seed, unsigned threads = 0);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Piecewise-constant controls: `blocks` equal time pieces per active noise
/// mode, each value in [-bound, bound].
struct ControlFamily {
  int blocks = 5;
  double bound = 50.0;
  /// Noise modes the control may use; empty means all.
  std::vector<std::size_t> active_modes;
  int restarts = 3;
  std::uint64_t seed = 1;
  int max_sweeps = 30;
  double tolerance = 1e-9;
};

struct CostResult {
  bool feasible = false;
  Control control;
  double cost = 0.0;
  std::vector<double> params;
  std::size_t skeleton_solves = 0;
  std::string message;
};

/// Smallest control cost found in the family whose skeleton realizes the
/// event. An upper bound on the rate at the realized trajectory set.
CostResult minimize_cost(const RareEvent& event, const ControlFamily& family, const SolverConfig& config,
                         const State& initial);

struct VaradhanRow {
  double epsilon = 0.0;
  std::size_t n_paths = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double neg_eps_log_p = 0.0;
  double best_cost = 0.0;
};

struct VaradhanTable {
  std::vector<VaradhanRow> rows;
  /// -eps log p_hat monotone in the row order (reported, not asserted).
  bool monotone = true;
  CostResult optimum;
};

VaradhanTable varadhan_gap(const SolverConfig& config, const State& initial, const RareEvent& event,
                           const std::vector<double>& epsilons, std::size_t n_paths, const ControlFamily& family,
                           std::uint64_t master_seed, unsigned threads = 0);

/// Linear single-mode oracles for dx = (-kappa x + b h) dt + sqrt(eps) b dW, x(0) = 0.
struct LinearModeOracle {
  double kappa = 1.0;
  double b = 1.0;
  double T = 1.0;
  /// Var x(T) / eps
  double variance() const;
  /// min 1/2 Int h^2 subject to x(T) = a
  double minimal_cost(double a) const;
  /// -eps log P(x(T) >= a) under the exact Gaussian law
  double finite_eps_rate(double a, double eps) const;
};

}  // namespace sbsim
