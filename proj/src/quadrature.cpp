#include "covertsim/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "covertsim/errors.hpp"

namespace covertsim {

void QuadratureSpec::validate() const {
  if (node_count < 2) throw std::invalid_argument("quadrature: node_count must be >= 2");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("quadrature: tolerances must be positive");
  if (max_subdivisions < 1)
    throw std::invalid_argument("quadrature: max_subdivisions must be >= 1");
}

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

GaussLaguerreRule compute_laguerre(int n) {
  GaussLaguerreRule rule;
  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    // Stroud/Secrest starting guesses, then Newton on the recurrence.
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
    }
    double pp = 0.0;
    double p2 = 0.0;
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (p1 - p2) / z;
      const double z1 = z;
      z = z1 - p1 / pp;
      converged = std::fabs(z - z1) <= 1e-14 * std::max(z, 1.0);
    }
    if (!converged)
      throw NumericalFailure("laguerre rule: Newton failed for order " + std::to_string(n) +
                             " node " + std::to_string(i));
    rule.nodes[i] = z;
    const double w = -1.0 / (pp * n * p2);
    if (!(w > 0.0) || !std::isfinite(w))
      throw NumericalFailure("laguerre rule: weight under/overflow at order " +
                             std::to_string(n) + " (order too large for double precision)");
    rule.log_weights[i] = std::log(w);
  }
  return rule;
}

GaussLegendreRule compute_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      converged = std::fabs(z - z1) <= 1e-15;
    }
    if (!converged)
      throw NumericalFailure("legendre rule: Newton failed for order " + std::to_string(n));
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return rule;
}

}  // namespace

const GaussLaguerreRule& laguerre_rule(int n) {
  if (n < 2) throw std::invalid_argument("laguerre_rule: order must be >= 2");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLaguerreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLaguerreRule>(compute_laguerre(n));
  return *slot;
}

const GaussLegendreRule& legendre_rule(int n) {
  if (n < 2) throw std::invalid_argument("legendre_rule: order must be >= 2");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(compute_legendre(n));
  return *slot;
}

double log_sum_exp(std::span<const double> terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms)
    if (t > mx) mx = t;
  if (!std::isfinite(mx)) return mx;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - mx);
  return mx + std::log(sum);
}

double argmax_on_halfline(const std::function<double(double)>& h, double lambda) {
  const double scale = 1.0 / lambda;
  std::vector<double> xs{0.0};
  std::vector<double> vs{h(0.0)};
  std::size_t best = 0;
  for (int k = -8; k <= 70; ++k) {
    const double x = scale * std::pow(2.0, k);
    const double v = h(x);
    xs.push_back(x);
    vs.push_back(v);
    if (v > vs[best]) best = xs.size() - 1;
    if (x > xs[best] && v < vs[best] - 500.0) break;
  }
  double lo = best == 0 ? 0.0 : xs[best - 1];
  double hi = best + 1 < xs.size() ? xs[best + 1] : xs[best] * 2.0;

  // Golden-section refinement of the bracket.
  constexpr double gr = 0.6180339887498949;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = h(c);
  double fd = h(d);
  for (int it = 0; it < 200 && hi - lo > 1e-10 * (hi + 1.0); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = h(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = h(d);
    }
  }
  const double xm = fc > fd ? c : d;
  const double vm = fc > fd ? fc : fd;
  if (h(0.0) >= vm) return 0.0;
  return xm;
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int budget;
};

double simpson_rec(SimpsonState& st, double a, double m, double b, double fa, double fm,
                   double fb, double whole, double eps, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * eps || depth >= 52) return left + right + delta / 15.0;
  if (--st.budget < 0)
    throw NumericalFailure(fmt(
        "adaptive quadrature: subdivision budget exhausted on [%.6g, %.6g], local error %.3g",
        a, b, std::fabs(delta) / 15.0));
  return simpson_rec(st, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
         simpson_rec(st, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

// Integrates f >= 0 over [a, b] starting from `panels` uniform panels so
// that a narrow peak cannot hide between the first sample points; the
// caller arranges for a panel boundary to land on the peak.
double adaptive_panels(SimpsonState& st, double a, double b, int panels, double eps_total) {
  double total = 0.0;
  const double step = (b - a) / panels;
  const double eps = eps_total / panels;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + p * step;
    const double pb = p + 1 == panels ? b : pa + step;
    const double pm = 0.5 * (pa + pb);
    const double fa = st.f(pa);
    const double fm = st.f(pm);
    const double fb = st.f(pb);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_rec(st, pa, pm, pb, fa, fm, fb, whole, eps, 0);
  }
  return total;
}

double laguerre_log_integral(const std::function<double(double)>& g, double lambda,
                             double x_star, const QuadratureSpec& spec) {
  const GaussLaguerreRule& lag = laguerre_rule(spec.node_count);
  const int n = spec.node_count;
  if (x_star <= 0.0) {
    std::vector<double> terms(n);
    for (int i = 0; i < n; ++i) terms[i] = lag.log_weights[i] + g(lag.nodes[i] / lambda);
    return log_sum_exp(terms);
  }
  // Interior peak: Gauss-Legendre panel on [0, x*], Gauss-Laguerre tail
  // anchored at x*.
  const GaussLegendreRule& leg = legendre_rule(n);
  std::vector<double> terms(2 * n);
  const double half = 0.5 * x_star;
  const double log_jac = std::log(lambda * half);
  for (int j = 0; j < n; ++j) {
    const double xj = half * (leg.nodes[j] + 1.0);
    terms[j] = log_jac + std::log(leg.weights[j]) + g(xj) - lambda * xj;
  }
  for (int i = 0; i < n; ++i)
    terms[n + i] = -lambda * x_star + lag.log_weights[i] + g(x_star + lag.nodes[i] / lambda);
  return log_sum_exp(terms);
}

double adaptive_log_integral(const std::function<double(double)>& g, double lambda,
                             double x_star, const QuadratureSpec& spec) {
  const auto h = [&](double x) { return g(x) - lambda * x; };
  const double h_star = h(x_star);

  // Truncation point: far enough past the peak that the discarded tail is
  // negligible against every tolerance in play.
  const double drop = std::log(std::min(spec.rel_tol, 1e-6)) - 25.0;
  double upper = x_star + 1.0 / lambda;
  int guard = 0;
  while (h(upper) - h_star > drop) {
    upper = x_star + (upper - x_star) * 2.0;
    if (++guard > 400)
      throw NumericalFailure("adaptive quadrature: no integrable tail found (integrand does "
                             "not decay)");
  }

  const std::function<double(double)> f = [&](double x) { return std::exp(h(x) - h_star); };
  SimpsonState st{f, spec.max_subdivisions};

  // Coarse scale estimate to set the absolute tolerance target.
  double coarse = 0.0;
  {
    const int probes = 64;
    const double step = upper / probes;
    double prev = f(0.0);
    for (int i = 1; i <= probes; ++i) {
      const double cur = f(i * step);
      coarse += 0.5 * (prev + cur) * step;
      prev = cur;
    }
    coarse = std::max(coarse, 1e-300);
  }
  const double eps = std::max(spec.abs_tol, spec.rel_tol * coarse);

  double integral = 0.0;
  if (x_star > 0.0) {
    integral += adaptive_panels(st, 0.0, x_star, 16, 0.5 * eps);
    integral += adaptive_panels(st, x_star, upper, 16, 0.5 * eps);
  } else {
    integral = adaptive_panels(st, 0.0, upper, 32, eps);
  }
  if (!(integral > 0.0))
    throw NumericalFailure("adaptive quadrature: nonpositive integral (lost mass)");
  return h_star + std::log(lambda) + std::log(integral);
}

}  // namespace

double exp_mixture_log_integral_at_peak(const std::function<double(double)>& g, double lambda,
                                        double x_star, const QuadratureSpec& spec) {
  spec.validate();
  if (!(lambda > 0.0))
    throw std::invalid_argument("exp_mixture_log_integral: lambda must be positive");
  if (!(x_star >= 0.0))
    throw std::invalid_argument("exp_mixture_log_integral: peak must be nonnegative");
  if (spec.method == QuadratureMethod::gauss_laguerre)
    return laguerre_log_integral(g, lambda, x_star, spec);
  return adaptive_log_integral(g, lambda, x_star, spec);
}

double exp_mixture_log_integral(const std::function<double(double)>& g, double lambda,
                                const QuadratureSpec& spec) {
  spec.validate();
  if (!(lambda > 0.0))
    throw std::invalid_argument("exp_mixture_log_integral: lambda must be positive");
  const double x_star =
      argmax_on_halfline([&](double x) { return g(x) - lambda * x; }, lambda);
  return exp_mixture_log_integral_at_peak(g, lambda, x_star, spec);
}

}  // namespace covertsim
