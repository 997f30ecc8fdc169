#include "sadmm/random.hpp"

#include <cmath>
#include <numbers>

namespace sadmm {
namespace {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(Stream stream, std::uint64_t counter,
                               std::uint64_t index) const noexcept {
  std::uint64_t h = mix64(seed_ + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1));
  h = mix64(h ^ mix64(counter + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ mix64(index + 0x85157af5d8e6a4c3ULL));
  return h;
}

double CounterRng::uniform(Stream stream, std::uint64_t counter,
                           std::uint64_t index) const noexcept {
  return static_cast<double>(bits(stream, counter, index) >> 11) * 0x1.0p-53;
}

std::size_t CounterRng::below(std::size_t n, Stream stream, std::uint64_t counter,
                              std::uint64_t index) const noexcept {
  // Multiply-shift range reduction; bias is at most n / 2^64.
  const unsigned __int128 product =
      static_cast<unsigned __int128>(bits(stream, counter, index)) * n;
  return static_cast<std::size_t>(product >> 64);
}

double CounterRng::normal(Stream stream, std::uint64_t counter,
                          std::uint64_t index) const noexcept {
  const double u1 = 1.0 - uniform(stream, counter, 2 * index);  // (0, 1]
  const double u2 = uniform(stream, counter, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sadmm
