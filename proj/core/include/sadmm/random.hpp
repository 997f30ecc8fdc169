#pragma once

#include <cstddef>
#include <cstdint>

namespace sadmm {

/// Independent draw families. Each consumer uses its own stream so that
/// adding draws to one never shifts another.
enum class Stream : std::uint64_t {
  kBatch = 1,
  kRestart = 2,
  kOutput = 3,
  kData = 4,
  kPowerStart = 5,
};

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter, index). Replays in any order, on any thread,
/// reproduce the same values.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(Stream stream, std::uint64_t counter, std::uint64_t index) const noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(Stream stream, std::uint64_t counter, std::uint64_t index) const noexcept;

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n, Stream stream, std::uint64_t counter,
                    std::uint64_t index) const noexcept;

  /// Standard normal via Box-Muller; consumes sub-draws 2*index and 2*index+1.
  double normal(Stream stream, std::uint64_t counter, std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
};

}  // namespace sadmm
