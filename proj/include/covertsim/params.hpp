#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "covertsim/rng.hpp"

namespace covertsim {

/// Sample alphabet at the adversary: real scalars or complex symbols.
/// Complex symbols carry two real components, each with the stated
/// per-component variance.
enum class Field { real, complex };

inline const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

inline Field field_from_string(const std::string& s) {
  if (s == "real") return Field::real;
  if (s == "complex") return Field::complex;
  throw std::invalid_argument("unknown field '" + s + "' (expected real|complex)");
}

/// Full parameterization of one covert-channel scenario seen by the
/// adversary: n channel uses split into num_blocks fading blocks of
/// block_len symbols, exponential per-block power gain with rate
/// fading_rate, noise variance noise_var per real component, and Alice's
/// per-symbol power alice_power.
struct SystemParams {
  std::int64_t n = 0;
  std::int64_t num_blocks = 0;
  std::int64_t block_len = 0;
  double fading_rate = 0.0;
  double noise_var = 0.0;
  double alice_power = 0.0;
  Field field = Field::complex;

  static SystemParams create(std::int64_t n, std::int64_t num_blocks, double fading_rate,
                             double noise_var, double alice_power,
                             Field field = Field::complex) {
    if (n <= 0) throw std::invalid_argument("n must be positive");
    if (num_blocks <= 0) throw std::invalid_argument("num_blocks must be positive");
    if (n % num_blocks != 0)
      throw std::invalid_argument("num_blocks must divide n exactly (n=" + std::to_string(n) +
                                  ", M=" + std::to_string(num_blocks) + ")");
    if (!(fading_rate > 0.0)) throw std::invalid_argument("fading_rate must be > 0");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise_var must be > 0");
    if (!(alice_power >= 0.0)) throw std::invalid_argument("alice_power must be >= 0");
    SystemParams p;
    p.n = n;
    p.num_blocks = num_blocks;
    p.block_len = n / num_blocks;
    p.fading_rate = fading_rate;
    p.noise_var = noise_var;
    p.alice_power = alice_power;
    p.field = field;
    return p;
  }

  /// Copy with a different per-symbol transmit power (used by sweeps).
  SystemParams with_alice_power(double power) const {
    return create(n, num_blocks, fading_rate, noise_var, power, field);
  }

  /// Real components per symbol: 1 (real field) or 2 (complex).
  int components() const { return field == Field::complex ? 2 : 1; }

  /// Gaussian shape parameter of one block's energy under H0:
  /// S_i / noise_var ~ chi^2 with 2*kappa degrees of freedom.
  double kappa() const { return 0.5 * static_cast<double>(block_len * components()); }

  /// Order-sensitive hash of every field; calibrated detectors pin the
  /// exact scenario they were calibrated for.
  std::uint64_t fingerprint() const {
    std::uint64_t h = splitmix64(0x5eedf00dULL);
    auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
    auto mixd = [&mix](double v) {
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof v);
      __builtin_memcpy(&bits, &v, sizeof bits);
      mix(bits);
    };
    mix(static_cast<std::uint64_t>(n));
    mix(static_cast<std::uint64_t>(num_blocks));
    mix(static_cast<std::uint64_t>(block_len));
    mixd(fading_rate);
    mixd(noise_var);
    mixd(alice_power);
    mix(field == Field::complex ? 2u : 1u);
    return h;
  }

  bool operator==(const SystemParams&) const = default;
};

}  // namespace covertsim
