#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace shorsim {

using Rng = std::mt19937_64;

/// Purpose tags that keep derived streams disjoint.
enum class StreamTag : std::uint64_t {
  disorder = 0xD15,
  measurement = 0x3EA,
  test = 0x7E5,
};

/// Deterministic stream derived from a master seed and a key path
/// (seed_seq is fully specified by the standard, so streams are portable).
Rng make_stream(std::uint64_t master_seed, StreamTag tag, std::initializer_list<std::uint64_t> key);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11U) * 0x1.0p-53; }

/// Bit pattern of a double, for keying streams on real parameters.
std::uint64_t bits_of(double value);

}  // namespace shorsim
