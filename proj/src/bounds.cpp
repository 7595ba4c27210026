#include "covertsim/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "covertsim/detectors.hpp"
#include "covertsim/errors.hpp"
#include "covertsim/parallel.hpp"
#include "covertsim/rng.hpp"
#include "covertsim/sampling.hpp"
#include "covertsim/special_functions.hpp"

namespace covertsim {

const char* to_string(KlDirection direction) {
  return direction == KlDirection::f1_f0 ? "f1_f0" : "f0_f1";
}

KlDirection kl_direction_from_string(const std::string& s) {
  if (s == "f1_f0") return KlDirection::f1_f0;
  if (s == "f0_f1") return KlDirection::f0_f1;
  throw std::invalid_argument("unknown KL direction '" + s + "' (expected f1_f0|f0_f1)");
}

double kl_bound_ei(const SystemParams& params) {
  if (params.alice_power == 0.0) return 0.0;
  const double r = params.fading_rate * params.noise_var / params.alice_power;
  return static_cast<double>(params.block_len) * (ei_exp_scaled(r) + 1.0 / r);
}

double kl_bound_simple(const SystemParams& params) {
  const double ratio = params.alice_power / (params.fading_rate * params.noise_var);
  return 0.5 * static_cast<double>(params.block_len) * ratio * ratio;
}

KlEstimate kl_mc(const SystemParams& params, KlDirection direction, std::int64_t samples,
                 std::uint64_t seed, const QuadratureSpec& spec, int workers) {
  if (samples < 10000)
    throw std::invalid_argument("kl_mc: needs at least 10^4 samples for a usable estimate");

  // Single-block scenario: the divergence is per block and blocks are
  // i.i.d., so each sample is one fresh block from the numerator density.
  const SystemParams block = SystemParams::create(
      params.block_len, 1, params.fading_rate, params.noise_var, params.alice_power,
      params.field);
  const BlockLlrEvaluator llr(block, spec);
  const std::uint64_t tag =
      hash64(direction == KlDirection::f1_f0 ? "kl-mc-f1-f0" : "kl-mc-f0-f1");

  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](std::int64_t i) {
    RngStream rng(derive_seed(seed, {tag, static_cast<std::uint64_t>(i)}));
    if (direction == KlDirection::f1_f0) {
      const std::vector<double> energies = sample_h1_energies(block, rng);
      values[static_cast<std::size_t>(i)] = llr(energies[0]);
    } else {
      const std::vector<double> energies = sample_h0_energies(block, rng);
      values[static_cast<std::size_t>(i)] = -llr(energies[0]);
    }
  });

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(samples);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(samples - 1);

  KlEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(variance / static_cast<double>(samples));
  return est;
}

double pe_floor(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("pe_floor: divergence must be >= 0");
  const double v = 1.0 - std::sqrt(0.5 * d);
  return v > 0.0 ? v : 0.0;
}

ConverseMoments converse_moments(const SystemParams& params) {
  if (params.field != Field::complex)
    throw UnsupportedConfiguration(
        "converse_moments: moment formulas are derived for the complex field only");
  const double b = static_cast<double>(params.block_len);
  const double root_b = std::sqrt(b);
  const double s0 = params.noise_var;
  const double sa = params.alice_power;
  const double lam = params.fading_rate;
  ConverseMoments m;
  m.e0_yp = 0.0;
  m.var0_yp = s0 * s0;
  m.e1_yp = root_b * sa / lam;
  m.var1_yp = s0 * s0 + 2.0 * sa * sa / (lam * lam) + 2.0 * sa * s0 / lam +
              b * sa * sa / (lam * lam);
  m.mean_gap = m.e1_yp - m.e0_yp;
  return m;
}

KlReport make_kl_report(const SystemParams& params, std::int64_t samples, std::uint64_t seed,
                        const QuadratureSpec& spec, KlDirection floor_direction, int workers) {
  KlReport report;
  report.d_f1_f0 = kl_mc(params, KlDirection::f1_f0, samples, seed, spec, workers);
  report.d_f0_f1 = kl_mc(params, KlDirection::f0_f1, samples, seed, spec, workers);
  report.bound_ei = kl_bound_ei(params);
  report.bound_simple = kl_bound_simple(params);
  report.num_blocks = params.num_blocks;
  report.samples = samples;
  report.floor_direction = floor_direction;
  const double d = floor_direction == KlDirection::f1_f0 ? report.d_f1_f0.value
                                                         : report.d_f0_f1.value;
  report.pe_floor_value = pe_floor(static_cast<double>(params.num_blocks) * std::max(d, 0.0));
  return report;
}

}  // namespace covertsim
