#pragma once

#include <vector>

#include "sbsim/record.hpp"
#include "sbsim/solver.hpp"

namespace sbsim {

/// w = -d2 u1 + d1 u2 (2D only).
ScalarField curl_2d(const VectorField& u);

/// u = grad_perp Lap^-1 w with u_hat(0) = 0. Rejects vorticity with a
/// nonzero mean. Nyquist modes of w are dropped.
VectorField biot_savart(const ScalarField& w);

struct GronwallRecord {
  double t = 0.0;
  double Y = 1.0;
  double g = 1.0;
  double sigma = 1.0;
  double Z_bound = 1.0;
  /// Int |grad^2 w|^2 |grad w|^2, recorded only.
  double hessian_term = 0.0;
};

/// Log-Gronwall quantities at one state; 2D only. g includes ||h||_{H_0}
/// when the configuration carries a control.
GronwallRecord gronwall_record(const State& state, const SolverConfig& config);

/// ||grad u||_inf / (||grad u||_2 + ||grad w||_4); 2D only.
double embedding_ratio(const VectorField& u);

/// Energy identity residual per step of a deterministic record.
std::vector<double> energy_budget(const TrajectoryRecord& record);

struct VorticityConsistency {
  std::vector<double> t;
  /// ||curl u_primal - w||_{L^2} at every step
  std::vector<double> gap;
  /// |mean(u_primal) - tracked mean|
  std::vector<double> mean_gap;
  double sup_gap = 0.0;
  double sup_mean_gap = 0.0;
};

/// Integrates the vorticity form next to the primal solver with the same
/// Brownian increments and compares the two (2D only).
VorticityConsistency vorticity_consistency(const SolverConfig& config, const State& initial,
                                           const RandomStream* stream);

}  // namespace sbsim
