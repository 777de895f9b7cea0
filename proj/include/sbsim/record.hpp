#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sbsim/state.hpp"

namespace sbsim {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Per-step diagnostics. Entries not computed at the configured level are NaN.
struct DiagnosticRow {
  double t = 0.0;
  double l2_u = kNaN;
  double hs_u = kNaN;
  double hs1_u = kNaN;
  double hs_theta = kNaN;
  double linf_grad_u = kNaN;
  double linf_grad_theta = kNaN;
  double linf_theta = kNaN;
  double linf_u = kNaN;
  double l2_w = kNaN;
  double l4_w = kNaN;
  double l2_grad_w = kNaN;
  double l4_grad_w = kNaN;
  double phi_value = 1.0;
  double energy_residual = 0.0;
  bool stop_flag = false;
  // energy budget ingredients
  double grad_l2_u = kNaN;      ///< ||grad u||_{L^2}
  double buoyancy_work = kNaN;  ///< (theta e_d, u)_{L^2}
  double control_work = 0.0;    ///< trapezoid (P f h, u) over the step ending here
  double h_norm = 0.0;          ///< ||h(t)||_{H_0}
  bool cfl_warning = false;
};

enum class StopKind { tau_R, gamma_R, custom };

/// Blow-up monitor. tau_R: ||grad u||_inf > R. gamma_R: ||w||_2 + ||w||_4 +
/// Int ||grad w||_2 (+ Int ||h||_{H_0} when include_control) > R, integrals by
/// left-endpoint quadrature.
struct StoppingRule {
  StopKind kind = StopKind::tau_R;
  double threshold = std::numeric_limits<double>::infinity();
  bool include_control = false;
  /// custom: raw functional value at history index m
  std::function<double(const std::vector<DiagnosticRow>&, std::size_t)> functional;
  std::string name() const;
};

/// Raw functional value at every history entry.
std::vector<double> stopping_functional(const std::vector<DiagnosticRow>& history, const StoppingRule& rule);
/// Running supremum of the raw functional (nondecreasing).
std::vector<double> running_functional(const std::vector<DiagnosticRow>& history, const StoppingRule& rule);
/// First time the functional exceeds the threshold.
std::optional<double> check_stopping(const std::vector<DiagnosticRow>& history, const StoppingRule& rule);

/// Incremental evaluation of a stopping rule as rows are appended.
class StopMonitor {
 public:
  explicit StopMonitor(StoppingRule rule);
  /// Evaluates the rule at history.back(); true once the threshold is exceeded.
  bool push(const std::vector<DiagnosticRow>& history);
  double value() const noexcept { return value_; }
  double running() const noexcept { return running_; }

 private:
  StoppingRule rule_;
  double integral_ = 0.0;
  double value_ = 0.0;
  double running_ = -std::numeric_limits<double>::infinity();
};

struct TrajectoryRecord {
  std::vector<DiagnosticRow> rows;
  std::optional<State> final_state;
  std::string stop_reason = "t_end";
  std::optional<double> stop_time;
  bool blew_up = false;
  std::string blowup_diagnostic;
  double epsilon = 0.0;
  double viscosity = 1.0;
  double dt = 0.0;
  bool controlled = false;
};

}  // namespace sbsim
