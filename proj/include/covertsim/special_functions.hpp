#pragma once

namespace covertsim {

/// Exponential integral Ei(x) for x != 0. Power series below |x| = 6,
/// continued fraction beyond (negative axis); accurate to >= 10
/// significant digits on [-700, -1e-6].
double ei(double x);

/// e^r * Ei(-r) for r > 0, formed without ever materializing the huge
/// exponential: for r > 6 the continued fraction yields the scaled value
/// directly. Needed by the closed-form divergence bound, whose two terms
/// cancel to leading order.
double ei_exp_scaled(double r);

/// Integral of log(1 + c*x) against the Exp(lambda) density on [0, inf),
/// i.e. -e^{lambda/c} * Ei(-lambda/c), via the scaled product.
double log_int_identity(double c, double lambda);

/// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double reg_gamma_q(double a, double x);

/// Inverse of reg_gamma_q in x: returns x with Q(a, x) = q, by bracketed
/// bisection; round-trips to |Q(a, Q^-1(a, q)) - q| <= 1e-10.
double reg_gamma_q_inv(double a, double q);

}  // namespace covertsim
