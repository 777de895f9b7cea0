#include "sbsim/io.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "sbsim/error.hpp"

namespace sbsim {

namespace {

constexpr char kMagic[4] = {'B', 'Q', 'S', 'F'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw IoError("snapshot '" + path_ + "' is truncated");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::size_t snapshot_size(const Grid& grid) {
  const auto d = static_cast<std::size_t>(grid.dimension());
  return 4 + 4 + 4 + 4 * d + 8 + 4 + (d + 1) * grid.size() * 8;
}

void write_snapshot(const State& state, const std::string& path) {
  const Grid& g = state.grid();
  const int d = g.dimension();
  std::string out;
  out.reserve(snapshot_size(g));
  out.append(kMagic, 4);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(d));
  for (int a = 0; a < d; ++a) put_u32(out, static_cast<std::uint32_t>(g.resolution()));
  put_f64(out, state.t);
  put_u32(out, static_cast<std::uint32_t>(d + 1));
  for (int a = 0; a < d; ++a) {
    for (double v : state.u[a].physical()) put_f64(out, v);
  }
  for (double v : state.theta.physical()) put_f64(out, v);
  write_all(path, out);
}

State read_snapshot(const std::string& path, std::optional<Grid> expected) {
  const std::string bytes = read_all(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, std::string(kMagic, 4)) != 0) {
    throw IoError("'" + path + "' is not a snapshot (magic mismatch)");
  }
  Reader r(bytes, path);
  r.u32();  // magic
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion) throw IoError("snapshot version " + std::to_string(version) + " is not supported");
  const std::uint32_t d = r.u32();
  if (d != 2 && d != 3) throw IoError("snapshot dimension " + std::to_string(d) + " is not supported");
  std::vector<std::uint32_t> res(d);
  for (auto& n : res) n = r.u32();
  for (auto n : res) {
    if (n != res[0]) throw IoError("snapshot has unequal resolutions per axis");
  }
  const double t = r.f64();
  const std::uint32_t count = r.u32();
  if (count != d + 1) throw IoError("snapshot holds " + std::to_string(count) + " fields, expected " + std::to_string(d + 1));
  Grid g = [&] {
    try {
      return Grid(static_cast<int>(d), static_cast<int>(res[0]));
    } catch (const ValidationError& e) {
      throw IoError(std::string("snapshot grid: ") + e.what());
    }
  }();
  if (expected && *expected != g) {
    throw IoError("snapshot grid " + std::to_string(d) + "D/" + std::to_string(res[0]) + " does not match the expected " +
                  std::to_string(expected->dimension()) + "D/" + std::to_string(expected->resolution()));
  }
  r.need(static_cast<std::size_t>(count) * g.size() * 8);
  std::vector<ScalarField> comps;
  for (std::uint32_t a = 0; a < d; ++a) {
    std::vector<double> s(g.size());
    for (auto& v : s) v = r.f64();
    comps.push_back(ScalarField::from_physical(g, std::move(s)));
  }
  std::vector<double> th(g.size());
  for (auto& v : th) v = r.f64();
  if (r.remaining() != 0) throw IoError("snapshot '" + path + "' has trailing bytes");
  return State(t, VectorField(std::move(comps)), ScalarField::from_physical(g, std::move(th)));
}

const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> cols{"t",          "l2_u",       "hs_u",           "hs1_u",     "hs_theta",
                                             "linf_grad_u", "linf_grad_theta", "linf_theta", "l2_w",      "l4_grad_w",
                                             "phi_value",  "energy_residual", "stop_flag"};
  return cols;
}

void write_timeseries(const TrajectoryRecord& record, const std::string& path) {
  std::string out;
  const auto& cols = timeseries_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& r : record.rows) {
    const double vals[] = {r.t,          r.l2_u,          r.hs_u,       r.hs1_u, r.hs_theta, r.linf_grad_u,
                           r.linf_grad_theta, r.linf_theta, r.l2_w,    r.l4_grad_w, r.phi_value, r.energy_residual};
    for (double v : vals) {
      out += fmt17(v);
      out += ",";
    }
    out += r.stop_flag ? "1\n" : "0\n";
  }
  write_all(path, out);
}

void write_varadhan_csv(const VaradhanTable& table, const std::string& path) {
  std::string out = "epsilon,n_paths,p_hat,ci_low,ci_high,neg_eps_log_p,best_cost\n";
  for (const auto& r : table.rows) {
    out += fmt17(r.epsilon) + "," + std::to_string(r.n_paths) + "," + fmt17(r.p_hat) + "," + fmt17(r.ci_low) + "," +
           fmt17(r.ci_high) + "," + fmt17(r.neg_eps_log_p) + "," + fmt17(r.best_cost) + "\n";
  }
  write_all(path, out);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_all(path)); }

void RunManifest::add_file(const std::string& root, const std::string& path) {
  const std::filesystem::path full = std::filesystem::path(root) / path;
  ManifestFile f;
  f.path = path;
  f.sha256 = sha256_file(full.string());
  f.bytes = std::filesystem::file_size(full);
  files.push_back(std::move(f));
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["master_seed"] = m.master_seed;
  j["version"] = m.version;
  j["start_time"] = m.start_time;
  j["stop_time"] = m.stop_time;
  j["stop_reason"] = m.stop_reason;
  j["files"] = nlohmann::json::array();
  for (const auto& f : m.files) {
    j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  write_all(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::string& path) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(read_all(path));
    m.command = j.at("command").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.start_time = j.at("start_time").get<std::string>();
    m.stop_time = j.at("stop_time").get<std::string>();
    m.stop_reason = j.at("stop_reason").get<std::string>();
    for (const auto& f : j.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uintmax_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest '" + path + "': " + e.what());
  }
  return m;
}

}  // namespace sbsim
