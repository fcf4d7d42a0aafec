#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace mpfluct::random {

/// Philox4x32-10 block: a keyed bijection of 128-bit counters.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser, used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replicate r under a master seed.
inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) {
  return mix64(master ^ mix64(replicate + 0x9E3779B97F4A7C15ULL));
}

/// Counter-based stream keyed by (seed, class id, within-class index):
/// draw(slot) depends only on those four numbers.
class EntryStream {
 public:
  EntryStream(std::uint64_t seed, std::uint64_t class_id, std::uint32_t index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        class_lo_(static_cast<std::uint32_t>(class_id)),
        class_hi_(static_cast<std::uint32_t>(class_id >> 32)),
        index_(index) {}

  std::array<std::uint32_t, 4> bits(std::uint32_t slot) const {
    return philox4x32({class_lo_, class_hi_, index_, slot}, key_);
  }
  /// Two independent uniforms on the open interval (0, 1).
  std::pair<double, double> uniforms(std::uint32_t slot) const;
  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normals(std::uint32_t slot) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t class_lo_;
  std::uint32_t class_hi_;
  std::uint32_t index_;
};

}  // namespace mpfluct::random
