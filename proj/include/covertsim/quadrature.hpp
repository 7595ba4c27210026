#pragma once

#include <functional>
#include <span>
#include <vector>

namespace covertsim {

enum class QuadratureMethod { gauss_laguerre, adaptive_subdivision };

/// How to evaluate the fading-mixture integrals. gauss_laguerre is the
/// production path; adaptive_subdivision is the independent cross-check.
struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::gauss_laguerre;
  int node_count = 64;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;

  void validate() const;
};

/// Nodes and log-weights for integrating f against e^{-u} on [0, inf).
/// Log-weights, because every consumer works in log space.
struct GaussLaguerreRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

/// Nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Shared, lazily built rule tables (thread-safe, built once per order).
const GaussLaguerreRule& laguerre_rule(int n);
const GaussLegendreRule& legendre_rule(int n);

/// log(sum_i exp(terms[i])), max-shifted; -inf terms are skipped.
double log_sum_exp(std::span<const double> terms);

/// Maximizer of h on [0, inf) for a continuous h with h -> -inf, found by
/// geometric scan at scale 1/lambda plus golden-section refinement.
/// Returns 0 when the maximum sits on the boundary.
double argmax_on_halfline(const std::function<double(double)>& h, double lambda);

/// log of integral_0^inf e^{g(x)} lambda e^{-lambda x} dx for g
/// continuous and bounded above with g(x) - lambda x -> -inf.
/// The integrand's peak x* is located first; mass to either side of an
/// interior peak is captured by a Gauss-Legendre panel on [0, x*] plus a
/// Gauss-Laguerre tail anchored at x*, all accumulated with log-sum-exp.
/// The adaptive method integrates the peak-normalized integrand by
/// recursive Simpson subdivision instead and fails loudly (rather than
/// silently losing mass) when the subdivision budget runs out.
double exp_mixture_log_integral(const std::function<double(double)>& g, double lambda,
                                const QuadratureSpec& spec);

/// Same, but with the integrand peak supplied by the caller (used when
/// x* is available in closed form).
double exp_mixture_log_integral_at_peak(const std::function<double(double)>& g, double lambda,
                                        double x_star, const QuadratureSpec& spec);

}  // namespace covertsim
