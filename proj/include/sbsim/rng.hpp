#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sbsim {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key) noexcept;

/// Purpose tags keep unrelated draws of one path in disjoint counter ranges.
enum class StreamTag : std::uint16_t {
  noise = 0,
  initial_data = 1,
  optimizer = 2,
  test = 3,
};

/// Counter-based random stream keyed by (master seed, path index).
///
/// Every draw is a pure function of (seed, path, tag, step, mode), so paths
/// can be simulated in any order or in parallel with identical results.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t path_index) noexcept;

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_; }

  /// Standard normal draw for the given (step, mode).
  double normal(std::uint64_t step, std::uint32_t mode, StreamTag tag = StreamTag::noise) const noexcept;
  /// Uniform in (0, 1).
  double uniform(std::uint64_t step, std::uint32_t mode, StreamTag tag = StreamTag::noise) const noexcept;

 private:
  PhiloxBlock block(std::uint64_t step, std::uint32_t mode, StreamTag tag) const noexcept;

  std::uint64_t seed_;
  std::uint64_t path_;
};

/// Sequential UniformRandomBitGenerator over a RandomStream, for code that
/// wants a classic engine (test corpora, optimizer restarts).
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, std::uint64_t path, StreamTag tag = StreamTag::test) noexcept
      : stream_(seed, path), tag_(tag) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  double uniform() noexcept;
  double normal() noexcept;

 private:
  RandomStream stream_;
  StreamTag tag_;
  std::uint64_t counter_ = 0;
};

}  // namespace sbsim
