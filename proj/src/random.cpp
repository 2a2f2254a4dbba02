#include "pcnoise/random.hpp"

#include <cmath>
#include <numbers>

namespace pcnoise {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kIndexStride = 0xD1B54A32D192ED03ULL;
constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, DrawPurpose purpose,
                           std::uint64_t index)
    : key_(mix64(mix64(seed ^ (static_cast<std::uint64_t>(purpose) * kGolden)) +
                 index * kIndexStride)) {}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * kInv53;
}

double RandomStream::uniform_open_zero() {
  return static_cast<double>((next_u64() >> 11) + 1) * kInv53;
}

double RandomStream::gaussian() {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pcnoise
