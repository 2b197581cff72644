#pragma once

#include <cstdint>

namespace uquant {

// splitmix64 finalizer: full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Counter-based generator: the state walks by the golden-ratio increment and
// every output is the mixed counter. The stream depends only on (seed, call
// index), so replicate streams are reproducible across platforms and thread
// schedules.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // uniform on the open interval (0,1): 53-bit mantissa offset by half an
  // ulp, so inverse-CDF transforms never see 0 or 1
  double uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal by quantile inversion; exactly one uniform per draw,
  // which keeps stream positions independent of the values drawn
  double normal() noexcept;

  double rademacher() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
};

// Independent stream for replicate `index` of a study keyed by `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

}  // namespace uquant
