#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covertsim/observation.hpp"
#include "covertsim/params.hpp"
#include "covertsim/quadrature.hpp"

namespace covertsim {

enum class DetectorKind { lrt, power, mean_threshold };

const char* to_string(DetectorKind kind);
DetectorKind detector_from_string(const std::string& s);

/// A detector bound to a threshold and to the exact scenario it was
/// calibrated for (via the params fingerprint). Decision rule:
/// accept H1 iff statistic > threshold (strict, so golden outputs are
/// stable under the tie convention).
struct CalibratedDetector {
  DetectorKind kind = DetectorKind::lrt;
  double threshold = 0.0;
  double target_pfa = 0.0;
  std::int64_t calibration_trials = 0;
  std::uint64_t calibration_seed = 0;
  std::uint64_t params_fingerprint = 0;
};

/// Monte Carlo error probabilities with 95% Wilson half-widths.
/// p_e = p_fa + p_md, so it lives in [0, 2].
struct ErrorEstimate {
  double p_fa = 0.0;
  double p_md = 0.0;
  double p_e = 0.0;
  double half_width_fa = 0.0;
  double half_width_md = 0.0;
  std::int64_t trials = 0;
};

/// Block log-likelihood ratio log f1(S)/f0(S) as a reusable evaluator:
/// the per-node quantities that do not depend on the block energy are
/// precomputed once per scenario. With theta(x) = noise_var +
/// alice_power*x and kappa = B (complex) or B/2 (real), the ratio is the
/// log of the Exp(fading_rate) mixture of
///   g(x) = -kappa*log(theta(x)/noise_var) + (S/2)(1/noise_var - 1/theta(x)).
/// g - lambda*x peaks at x = 0 for S <= s_crit (pure Gauss-Laguerre sum,
/// affine in S per node) and at a closed-form interior point beyond it.
/// Evaluation is const and thread-safe.
class BlockLlrEvaluator {
 public:
  BlockLlrEvaluator(const SystemParams& params, const QuadratureSpec& spec);

  double operator()(double energy) const;

  /// Energy above which the mixture integrand peaks at interior x.
  double s_crit() const { return s_crit_; }

 private:
  double interior_peak(double energy) const;

  SystemParams params_;
  QuadratureSpec spec_;
  double kappa_ = 0.0;
  double s_crit_ = 0.0;
  std::vector<double> base_;   // log w_i + g(x_i) part without the energy term
  std::vector<double> slope_;  // d(term_i)/d(energy)
};

/// One-shot block LLR (builds an evaluator internally).
double block_llr(double energy, const SystemParams& params, const QuadratureSpec& spec);

/// Detector statistics on precomputed block energies. The Observation
/// overloads below delegate to these.
double lrt_from_energies(std::span<const double> energies, const BlockLlrEvaluator& llr);
double power_from_energies(std::span<const double> energies);
double mean_threshold_from_energies(std::span<const double> energies,
                                    const SystemParams& params);

/// Sum of block LLRs; accept H1 iff > threshold.
double lrt_statistic(const Observation& obs, const SystemParams& params,
                     const QuadratureSpec& spec);

/// Total received energy.
double power_statistic(const Observation& obs);

/// Mean of the centered, scaled block energies
/// Y'_i = S_i/(2 sqrt(B)) - sqrt(B)*noise_var.
double mean_threshold_statistic(const Observation& obs, const SystemParams& params);

/// Empirical (1 - target_pfa) quantile of the detector statistic over
/// fresh noise-only trials; ties break upward so the realized false
/// alarm rate is <= target. Requires trials * target_pfa >= 50.
/// Trials are independent derived streams of the seed, so the result is
/// identical for any worker count.
CalibratedDetector calibrate(DetectorKind kind, const SystemParams& params, double target_pfa,
                             std::int64_t trials, std::uint64_t seed,
                             const QuadratureSpec& spec, int workers = 1);

/// Exact power-detector threshold from the gamma law of the total H0
/// energy: 2*noise_var * Qinv(n/2, pfa) (real) or 2*noise_var * Qinv(n, pfa)
/// (complex). Cross-check for calibrate.
double pd_threshold_analytic(const SystemParams& params, double target_pfa);

/// False-alarm and missed-detection rates of a calibrated detector over
/// fresh trials (streams disjoint from calibration's by construction).
ErrorEstimate estimate_errors(const CalibratedDetector& det, const SystemParams& params,
                              std::int64_t trials, std::uint64_t seed,
                              const QuadratureSpec& spec, int workers = 1);

}  // namespace covertsim
