#pragma once

#include <cstdint>

namespace tailmat {

namespace detail {

// SplitMix64 finalizer (Stafford mix 13).  Bijective on uint64, so distinct
// counters never collide within a stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

}  // namespace detail

// Counter-based generator: output i of a stream is mix64(key + i*golden).
// Keys are scrambled from the user seed, so nearby seeds (base_seed ^ r,
// r = 0,1,2,...) give effectively independent streams; `split` derives a
// keyed substream, which the field simulator uses to attach one stream to
// every noise-panel cell independent of panel padding.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : key_(detail::mix64(seed ^ 0xD1B54A32D192ED03ull)), counter_(0) {}

  std::uint64_t next_u64() {
    return detail::mix64(key_ + (++counter_) * detail::kGolden);
  }

  // uniform on [0,1), 53 random bits
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0,1); safe as a log/pow argument
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  Rng split(std::uint64_t label) const {
    Rng child(0);
    child.key_ = detail::mix64(key_ ^ detail::mix64(label + detail::kGolden));
    child.counter_ = 0;
    return child;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

// Replicate seed derivation used by every ensemble runner.
inline std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t replicate) {
  return base_seed ^ replicate;
}

}  // namespace tailmat
