#include "covertsim/detectors.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "covertsim/parallel.hpp"
#include "covertsim/rng.hpp"
#include "covertsim/sampling.hpp"
#include "covertsim/special_functions.hpp"
#include "covertsim/stats.hpp"

namespace covertsim {

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::lrt: return "lrt";
    case DetectorKind::power: return "power";
    case DetectorKind::mean_threshold: return "mean_threshold";
  }
  return "?";
}

DetectorKind detector_from_string(const std::string& s) {
  if (s == "lrt") return DetectorKind::lrt;
  if (s == "power") return DetectorKind::power;
  if (s == "mean_threshold") return DetectorKind::mean_threshold;
  throw std::invalid_argument("unknown detector '" + s +
                              "' (expected lrt|power|mean_threshold)");
}

BlockLlrEvaluator::BlockLlrEvaluator(const SystemParams& params, const QuadratureSpec& spec)
    : params_(params), spec_(spec) {
  spec_.validate();
  kappa_ = params.kappa();
  if (params.alice_power == 0.0) {
    s_crit_ = std::numeric_limits<double>::infinity();
    return;
  }
  s_crit_ = 2.0 * params.noise_var * kappa_ +
            2.0 * params.noise_var * params.noise_var * params.fading_rate / params.alice_power;
  if (spec_.method != QuadratureMethod::gauss_laguerre) return;
  const GaussLaguerreRule& rule = laguerre_rule(spec_.node_count);
  const int n = spec_.node_count;
  base_.resize(n);
  slope_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = rule.nodes[i] / params.fading_rate;
    const double theta = params.noise_var + params.alice_power * x;
    base_[i] = rule.log_weights[i] - kappa_ * std::log(theta / params.noise_var);
    slope_[i] = 0.5 * (1.0 / params.noise_var - 1.0 / theta);
  }
}

double BlockLlrEvaluator::interior_peak(double energy) const {
  // Stationary point of g(x) - lambda*x in t = 1/theta:
  // (S/2)*sa2*t^2 - kappa*sa2*t - lambda = 0, positive root.
  const double sa2 = params_.alice_power;
  const double t_plus =
      (kappa_ * sa2 + std::sqrt(kappa_ * kappa_ * sa2 * sa2 +
                                2.0 * energy * sa2 * params_.fading_rate)) /
      (energy * sa2);
  const double theta_star = 1.0 / t_plus;
  return (theta_star - params_.noise_var) / sa2;
}

double BlockLlrEvaluator::operator()(double energy) const {
  if (!(energy >= 0.0)) throw std::invalid_argument("block_llr: energy must be >= 0");
  if (params_.alice_power == 0.0) return 0.0;

  if (spec_.method == QuadratureMethod::gauss_laguerre && energy <= s_crit_) {
    // Boundary peak: the precomputed Gauss-Laguerre terms are affine in
    // the energy. Two passes (max, then sum) avoid a per-call buffer;
    // terms more than 40 nats below the peak cannot move the sum.
    const std::size_t n = base_.size();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = base_[i] + energy * slope_[i];
      if (v > mx) mx = v;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = base_[i] + energy * slope_[i];
      if (v > mx - 40.0) sum += std::exp(v - mx);
    }
    return mx + std::log(sum);
  }

  const double sa2 = params_.alice_power;
  const double s0 = params_.noise_var;
  const double kappa = kappa_;
  const auto g = [sa2, s0, kappa, energy](double x) {
    const double theta = s0 + sa2 * x;
    return -kappa * std::log(theta / s0) + 0.5 * energy * (1.0 / s0 - 1.0 / theta);
  };
  const double x_star = energy > s_crit_ ? interior_peak(energy) : 0.0;
  return exp_mixture_log_integral_at_peak(g, params_.fading_rate, x_star, spec_);
}

double block_llr(double energy, const SystemParams& params, const QuadratureSpec& spec) {
  return BlockLlrEvaluator(params, spec)(energy);
}

double lrt_from_energies(std::span<const double> energies, const BlockLlrEvaluator& llr) {
  double sum = 0.0;
  for (double s : energies) sum += llr(s);
  return sum;
}

double power_from_energies(std::span<const double> energies) {
  double sum = 0.0;
  for (double s : energies) sum += s;
  return sum;
}

double mean_threshold_from_energies(std::span<const double> energies,
                                    const SystemParams& params) {
  const double root_b = std::sqrt(static_cast<double>(params.block_len));
  double sum = 0.0;
  for (double s : energies) sum += s / (2.0 * root_b) - root_b * params.noise_var;
  return sum / static_cast<double>(energies.size());
}

double lrt_statistic(const Observation& obs, const SystemParams& params,
                     const QuadratureSpec& spec) {
  const BlockLlrEvaluator llr(params, spec);
  return lrt_from_energies(obs.block_energies, llr);
}

double power_statistic(const Observation& obs) { return power_from_energies(obs.block_energies); }

double mean_threshold_statistic(const Observation& obs, const SystemParams& params) {
  return mean_threshold_from_energies(obs.block_energies, params);
}

namespace {

double statistic_from_energies(DetectorKind kind, std::span<const double> energies,
                               const SystemParams& params, const BlockLlrEvaluator* llr) {
  switch (kind) {
    case DetectorKind::lrt: return lrt_from_energies(energies, *llr);
    case DetectorKind::power: return power_from_energies(energies);
    case DetectorKind::mean_threshold: return mean_threshold_from_energies(energies, params);
  }
  throw std::logic_error("unreachable detector kind");
}

}  // namespace

CalibratedDetector calibrate(DetectorKind kind, const SystemParams& params, double target_pfa,
                             std::int64_t trials, std::uint64_t seed,
                             const QuadratureSpec& spec, int workers) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0))
    throw std::invalid_argument("calibrate: target_pfa must be in (0,1)");
  if (static_cast<double>(trials) * target_pfa < 50.0 * (1.0 - 1e-12))
    throw std::invalid_argument(
        "calibrate: trials * target_pfa must be >= 50 for a usable quantile (got " +
        std::to_string(static_cast<double>(trials) * target_pfa) + ")");

  std::optional<BlockLlrEvaluator> llr;
  if (kind == DetectorKind::lrt) llr.emplace(params, spec);
  std::vector<double> stats(static_cast<std::size_t>(trials));
  parallel_for(trials, workers, [&](std::int64_t i) {
    RngStream rng(derive_seed(seed, {hash64("calibrate-h0"), static_cast<std::uint64_t>(i)}));
    const std::vector<double> energies = sample_h0_energies(params, rng);
    stats[static_cast<std::size_t>(i)] =
        statistic_from_energies(kind, energies, params, llr ? &*llr : nullptr);
  });

  CalibratedDetector det;
  det.kind = kind;
  det.threshold = empirical_quantile_upper(std::move(stats), target_pfa);
  det.target_pfa = target_pfa;
  det.calibration_trials = trials;
  det.calibration_seed = seed;
  det.params_fingerprint = params.fingerprint();
  return det;
}

double pd_threshold_analytic(const SystemParams& params, double target_pfa) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0))
    throw std::invalid_argument("pd_threshold_analytic: target_pfa must be in (0,1)");
  const double a = params.field == Field::complex ? static_cast<double>(params.n)
                                                  : 0.5 * static_cast<double>(params.n);
  return 2.0 * params.noise_var * reg_gamma_q_inv(a, target_pfa);
}

ErrorEstimate estimate_errors(const CalibratedDetector& det, const SystemParams& params,
                              std::int64_t trials, std::uint64_t seed,
                              const QuadratureSpec& spec, int workers) {
  if (trials <= 0) throw std::invalid_argument("estimate_errors: trials must be positive");
  if (det.params_fingerprint != params.fingerprint())
    throw std::invalid_argument(
        "estimate_errors: detector was calibrated for different system parameters");

  std::optional<BlockLlrEvaluator> llr;
  if (det.kind == DetectorKind::lrt) llr.emplace(params, spec);
  const BlockLlrEvaluator* llr_ptr = llr ? &*llr : nullptr;

  std::vector<std::uint8_t> fa(static_cast<std::size_t>(trials));
  std::vector<std::uint8_t> md(static_cast<std::size_t>(trials));
  parallel_for(trials, workers, [&](std::int64_t i) {
    RngStream rng(derive_seed(seed, {hash64("evaluate-h0"), static_cast<std::uint64_t>(i)}));
    const std::vector<double> energies = sample_h0_energies(params, rng);
    const double stat = statistic_from_energies(det.kind, energies, params, llr_ptr);
    fa[static_cast<std::size_t>(i)] = stat > det.threshold ? 1 : 0;
  });
  parallel_for(trials, workers, [&](std::int64_t i) {
    RngStream rng(derive_seed(seed, {hash64("evaluate-h1"), static_cast<std::uint64_t>(i)}));
    const std::vector<double> energies = sample_h1_energies(params, rng);
    const double stat = statistic_from_energies(det.kind, energies, params, llr_ptr);
    md[static_cast<std::size_t>(i)] = stat > det.threshold ? 0 : 1;
  });

  std::int64_t n_fa = 0, n_md = 0;
  for (std::uint8_t v : fa) n_fa += v;
  for (std::uint8_t v : md) n_md += v;

  ErrorEstimate est;
  est.trials = trials;
  est.p_fa = static_cast<double>(n_fa) / static_cast<double>(trials);
  est.p_md = static_cast<double>(n_md) / static_cast<double>(trials);
  est.p_e = est.p_fa + est.p_md;
  est.half_width_fa = binomial_half_width(n_fa, trials);
  est.half_width_md = binomial_half_width(n_md, trials);
  return est;
}

}  // namespace covertsim
