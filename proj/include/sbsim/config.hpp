#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbsim/ldp.hpp"
#include "sbsim/solver.hpp"

namespace sbsim {

/// Initial data profiles. Velocity: zero, shear (A sin x2 e1), taylor_green,
/// constant (A e_d), random. Temperature: zero, constant, sin_x1, random.
struct InitialSettings {
  std::string velocity = "zero";
  double velocity_amplitude = 1.0;
  std::string temperature = "zero";
  double temperature_amplitude = 1.0;
  int random_modes = 4;
  std::uint64_t seed = 0;
  /// Snapshot to start from; overrides the profiles.
  std::string snapshot;
};

struct OutputSettings {
  std::string dir = "out";
  /// Steps between snapshots; 0 writes the final state only.
  int snapshot_every = 0;
  bool timeseries = true;
  std::size_t ensemble_paths = 16;
};

struct LdpSettings {
  std::vector<double> epsilons{0.04, 0.02, 0.01};
  std::size_t paths = 1000;
  std::string functional = "mode_amplitude";
  std::size_t mode = 0;
  std::optional<double> threshold;
  EventDirection direction = EventDirection::at_least;
  int blocks = 5;
  double bound = 50.0;
  int restarts = 3;
  std::uint64_t optimizer_seed = 1;
};

struct RunConfig {
  SolverConfig solver;
  InitialSettings initial;
  OutputSettings output;
  LdpSettings ldp;
  std::uint64_t seed = 0;
  /// Control CSV named in [control].file, resolved against the config directory.
  std::string control_file;
  /// Raw text of the parsed file, for provenance.
  std::string source_text;
};

/// INI document with sections [domain] [physics] [time] [noise] [control]
/// [output] [ldp] [initial]. Unknown keys and malformed values raise
/// ValidationError naming [section].key.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_string(const std::string& text, const std::string& base_dir = ".");

/// CSV rows `t, mode, value` (header optional). Values carry forward per mode
/// until overwritten; unspecified modes are zero.
Control parse_control_csv(const std::string& path, std::size_t modes, double t_end);
Control parse_control_text(const std::string& text, std::size_t modes, double t_end);

State build_initial_state(const RunConfig& config);

/// Builds the rare event described by the [ldp] section.
RareEvent build_event(const RunConfig& config);
ControlFamily build_family(const RunConfig& config);

}  // namespace sbsim
