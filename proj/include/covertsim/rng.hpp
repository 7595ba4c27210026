#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>

namespace covertsim {

/// Splittable counter-style mixing used to derive independent substream
/// seeds from a master seed plus a path of identifiers (trial index,
/// sweep cell coordinates, role tag, ...). Two distinct paths yield
/// statistically independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash64(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t id : path) h = splitmix64(h ^ id);
  return h;
}

/// xoshiro256++ stream with explicit, implementation-independent sampling
/// helpers. All distributions are built from the raw 64-bit output with
/// fixed arithmetic, so a given seed reproduces identical doubles on any
/// IEEE-754 platform; nothing is delegated to <random> distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) {
      x = splitmix64(x);
      w = x;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double next_unit_pos() { return 1.0 - next_unit(); }

  /// One standard normal draw (Box-Muller, cosine branch).
  double next_normal() {
    const double r = std::sqrt(-2.0 * std::log(next_unit_pos()));
    return r * std::cos(two_pi * next_unit());
  }

  /// Fills `out` with independent N(0, stddev^2) draws, consuming one
  /// uniform pair per two outputs.
  void fill_normals(std::span<double> out, double stddev) {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
      const double r = stddev * std::sqrt(-2.0 * std::log(next_unit_pos()));
      const double phi = two_pi * next_unit();
      out[i] = r * std::cos(phi);
      out[i + 1] = r * std::sin(phi);
    }
    if (i < out.size()) {
      const double r = stddev * std::sqrt(-2.0 * std::log(next_unit_pos()));
      out[i] = r * std::cos(two_pi * next_unit());
    }
  }

  /// Exponential draw with the given rate (mean 1/rate).
  double next_exponential(double rate) { return -std::log(next_unit_pos()) / rate; }

 private:
  static constexpr double two_pi = 6.283185307179586476925286766559;
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

}  // namespace covertsim
