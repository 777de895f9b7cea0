#include "sbsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace sbsim {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in (0, 1): never returns 0, so log() is safe.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t path_index) noexcept
    : seed_(master_seed), path_(path_index) {}

PhiloxBlock RandomStream::block(std::uint64_t step, std::uint32_t mode, StreamTag tag) const noexcept {
  const PhiloxBlock ctr{
      mode,
      static_cast<std::uint32_t>(step),
      static_cast<std::uint32_t>((step >> 32) & 0xFFFFu) |
          (static_cast<std::uint32_t>(tag) << 16),
      static_cast<std::uint32_t>(path_) ^ static_cast<std::uint32_t>(path_ >> 32) * 0x85EBCA6Bu,
  };
  const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

double RandomStream::uniform(std::uint64_t step, std::uint32_t mode, StreamTag tag) const noexcept {
  const auto b = block(step, mode, tag);
  return to_open_unit(b[0], b[1]);
}

double RandomStream::normal(std::uint64_t step, std::uint32_t mode, StreamTag tag) const noexcept {
  const auto b = block(step, mode, tag);
  const double u1 = to_open_unit(b[0], b[1]);
  const double u2 = to_open_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterEngine::result_type CounterEngine::operator()() noexcept {
  const double u = stream_.uniform(counter_++, 0, tag_);
  return static_cast<result_type>(u * 0x1.0p64);
}

double CounterEngine::uniform() noexcept { return stream_.uniform(counter_++, 0, tag_); }

double CounterEngine::normal() noexcept { return stream_.normal(counter_++, 0, tag_); }

}  // namespace sbsim
