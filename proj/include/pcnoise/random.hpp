#pragma once

#include <cstdint>
#include <string_view>

namespace pcnoise {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// What a sub-stream is used for. Values are part of the reproducibility
// contract: changing them changes every generated dataset.
enum class DrawPurpose : std::uint64_t {
  kRangeNoise = 1,
  kOutlier = 2,
};

// Counter-based random stream.
//
// A stream is identified by (seed, purpose, index); the j-th 64-bit word is
// mix64(key + j * golden) where key = mix64(mix64(seed ^ purpose_salt) + index
// * odd_constant). Streams for different indices are independent of each
// other, so per-point draws do not depend on evaluation order or threading.
//
// Gaussian variates use the basic Box-Muller transform on two consecutive
// uniforms; the sine branch is discarded so each variate costs exactly two
// words and the stream position is a pure function of the draw count.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, DrawPurpose purpose, std::uint64_t index);

  std::uint64_t next_u64();
  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  // Uniform on (0, 1], 53-bit resolution.
  double uniform_open_zero();
  // Standard normal.
  double gaussian();

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pcnoise
