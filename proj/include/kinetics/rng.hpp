#pragma once

// Counter-based random numbers (Philox4x32-10). Every draw is a pure function
// of (key, counter), so Monte Carlo sums can be split across workers without
// changing a single bit of the result.

#include <array>
#include <cmath>
#include <cstdint>

#include "kinetics/types.hpp"

namespace kinetics {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Mixes a user seed with a stream identifier into a Philox key.
constexpr PhiloxKey make_key(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

/// Uniform double in [0, 1) from 64 random bits (53-bit mantissa).
constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
constexpr double to_unit_open_low(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

inline Vec3 unit_vector_from(double u_cos, double u_phi) {
  const double z = 2.0 * u_cos - 1.0;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * kPi * u_phi;
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

/// Random access draws: block `b` of sample `i` in a keyed stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(make_key(seed, stream)) {}

  /// Two uniforms in [0,1) for (sample, block).
  std::array<double, 2> uniforms(std::uint64_t sample, std::uint32_t block) const {
    const PhiloxCounter out = philox4x32(
        {block, static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32), 0u},
        key_);
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
  }

 private:
  PhiloxKey key_;
};

/// Sequential stream over the same generator, for inherently serial
/// algorithms (DSMC pair selection, ensemble sampling).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : key_(make_key(seed, stream)) {}

  double uniform() {
    const auto [hi, lo] = next_pair();
    return to_unit(hi, lo);
  }

  double uniform_open_low() {
    const auto [hi, lo] = next_pair();
    return to_unit_open_low(hi, lo);
  }

  /// Integer uniformly distributed on [0, n).
  std::uint64_t below(std::uint64_t n) {
    const auto [hi, lo] = next_pair();
    const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(bits) * n) >> 64);
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open_low()));
    const double phi = 2.0 * kPi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  Vec3 unit_vector() {
    const double a = uniform();
    const double b = uniform();
    return unit_vector_from(a, b);
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::array<std::uint32_t, 2> next_pair() {
    if (slot_ == 0) {
      block_ = philox4x32({static_cast<std::uint32_t>(counter_),
                           static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u},
                          key_);
      ++counter_;
    }
    const std::array<std::uint32_t, 2> pair{block_[2 * slot_], block_[2 * slot_ + 1]};
    slot_ ^= 1;
    return pair;
  }

  PhiloxKey key_;
  PhiloxCounter block_{};
  std::uint64_t counter_ = 0;
  int slot_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kinetics
