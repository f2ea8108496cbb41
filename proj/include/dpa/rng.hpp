#pragma once

#include <cstdint>
#include <random>

namespace dpa {

// splitmix64 finalizer; used only to derive substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t index) {
  std::uint64_t s = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  s = mix64(s ^ tag);
  return mix64(s ^ index);
}

// Deterministic uniform stream. Doubles come from the top 53 bits of a
// mt19937_64 draw, so sequences are identical across platforms and never
// depend on the standard library's distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream substream(std::uint64_t seed, std::uint64_t tag,
                             std::uint64_t index) {
    return RngStream(substream_seed(seed, tag, index));
  }

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Tags keep substreams for different purposes decorrelated under one seed.
namespace stream_tag {
inline constexpr std::uint64_t kCosts = 0x11;
inline constexpr std::uint64_t kOptimizer = 0x14;
inline constexpr std::uint64_t kBestResponse = 0x15;
inline constexpr std::uint64_t kIc = 0x21;
inline constexpr std::uint64_t kIr = 0x22;
inline constexpr std::uint64_t kWbb = 0x23;
inline constexpr std::uint64_t kMono = 0x24;
inline constexpr std::uint64_t kPayment = 0x25;
inline constexpr std::uint64_t kEfrp = 0x26;
inline constexpr std::uint64_t kEf = 0x27;
inline constexpr std::uint64_t kRevEq = 0x28;
}  // namespace stream_tag

}  // namespace dpa
