#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbsim/ldp.hpp"
#include "sbsim/record.hpp"
#include "sbsim/state.hpp"

namespace sbsim {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// "BQSF", u32 version, u32 dimension, u32 resolution per axis, f64 time,
/// u32 field count, then u_1..u_d and theta as f64 samples, all little-endian.
void write_snapshot(const State& state, const std::string& path);
/// Reads a snapshot; when `expected` is given the grid must match it.
State read_snapshot(const std::string& path, std::optional<Grid> expected = std::nullopt);
std::size_t snapshot_size(const Grid& grid);

/// The time-series column names, in file order.
const std::vector<std::string>& timeseries_columns();
void write_timeseries(const TrajectoryRecord& record, const std::string& path);

void write_varadhan_csv(const VaradhanTable& table, const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct ManifestFile {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string version;
  std::string start_time;
  std::string stop_time;
  std::string stop_reason;
  std::vector<ManifestFile> files;

  /// Checksums `path` (relative to `root`) and lists it.
  void add_file(const std::string& root, const std::string& path);
};

/// UTC wall clock, ISO 8601.
std::string utc_now();
void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

}  // namespace sbsim
