#include <cmath>
#include <stdexcept>
#include <vector>

#include "covertsim/bounds.hpp"
#include "covertsim/detectors.hpp"
#include "covertsim/errors.hpp"
#include "covertsim/rng.hpp"
#include "covertsim/sampling.hpp"
#include "covertsim/special_functions.hpp"
#include "doctest.h"

using namespace covertsim;

namespace {
QuadratureSpec default_spec() { return QuadratureSpec{}; }
}  // namespace

TEST_CASE("closed-form divergence bounds at pinned points") {
  // r = 1, B = 1: e*Ei(-1) + 1 = 0.4036526376768060.
  const SystemParams unit = SystemParams::create(1, 1, 1.0, 1.0, 1.0, Field::complex);
  CHECK(kl_bound_ei(unit) == doctest::Approx(0.4036526376768060).epsilon(1e-13));
  CHECK(kl_bound_simple(unit) == doctest::Approx(0.5).epsilon(1e-15));

  // r = 10, B = 1: e^10*Ei(-10) + 0.1 = 0.00843666606021192.
  const SystemParams r10 = SystemParams::create(1, 1, 10.0, 1.0, 1.0, Field::complex);
  CHECK(kl_bound_ei(r10) == doctest::Approx(0.00843666606021192).epsilon(1e-13));
  CHECK(kl_bound_simple(r10) == doctest::Approx(0.005).epsilon(1e-15));

  // Block-length factor and parameter scaling: B = 4, lambda = 2,
  // alice_power = 1, noise_var = 1 gives r = 2 and simple bound 4/(2*4).
  const SystemParams b4 = SystemParams::create(8, 2, 2.0, 1.0, 1.0, Field::complex);
  CHECK(kl_bound_simple(b4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kl_bound_ei(b4) == doctest::Approx(4.0 * (std::exp(2.0) * ei(-2.0) + 0.5)).epsilon(1e-13));

  // r depends only on lambda*noise_var/alice_power, and the bound is
  // proportional to B.
  const SystemParams scaled = SystemParams::create(8, 2, 1.0, 2.0, 4.0, Field::complex);
  CHECK(kl_bound_ei(scaled) == doctest::Approx(4.0 * kl_bound_ei(SystemParams::create(
                                   1, 1, 1.0, 2.0, 4.0, Field::complex))).epsilon(1e-13));

  // Ordering in the regime where the simple bound is the looser one.
  for (double r : {0.25, 0.5, 1.0, 1.5}) {
    const SystemParams p = SystemParams::create(1, 1, r, 1.0, 1.0, Field::complex);
    CHECK(kl_bound_ei(p) <= kl_bound_simple(p));
    CHECK(kl_bound_ei(p) > 0.0);
  }

  // No signal, no divergence.
  const SystemParams off = SystemParams::create(1, 1, 1.0, 1.0, 0.0, Field::complex);
  CHECK(kl_bound_ei(off) == 0.0);
  CHECK(kl_bound_simple(off) == 0.0);
}

TEST_CASE("per-slot simple bound is scale-exact under root-n power decay") {
  // With alice_power = c/sqrt(n) and B = 1, n * bound_simple is a constant.
  const double c = 0.4;
  std::vector<double> slot;
  for (std::int64_t n : {100, 1000, 10000, 100000}) {
    const SystemParams p =
        SystemParams::create(n, n, 1.0, 1.0, c / std::sqrt(double(n)), Field::complex);
    slot.push_back(double(n) * kl_bound_simple(p));
  }
  for (std::size_t i = 1; i < slot.size(); ++i)
    CHECK(slot[i] == doctest::Approx(slot[0]).epsilon(1e-12));
  CHECK(slot[0] == doctest::Approx(0.5 * c * c).epsilon(1e-12));
}

TEST_CASE("error floor from divergence") {
  CHECK(pe_floor(0.0) == 1.0);
  CHECK(pe_floor(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pe_floor(2.0) == 0.0);
  CHECK(pe_floor(50.0) == 0.0);
  CHECK_THROWS_AS(pe_floor(-0.1), std::invalid_argument);
}

TEST_CASE("monte carlo divergence: guard, degenerate case, and bound consistency") {
  const QuadratureSpec spec = default_spec();
  const SystemParams unit = SystemParams::create(1, 1, 1.0, 1.0, 1.0, Field::complex);
  CHECK_THROWS_AS(kl_mc(unit, KlDirection::f1_f0, 9999, 1, spec), std::invalid_argument);

  const SystemParams off = SystemParams::create(1, 1, 1.0, 1.0, 0.0, Field::complex);
  const KlEstimate zero = kl_mc(off, KlDirection::f1_f0, 10000, 2, spec);
  CHECK(zero.value == 0.0);
  CHECK(zero.std_error == 0.0);

  const std::int64_t n_samples = 200000;
  const KlEstimate fwd = kl_mc(unit, KlDirection::f1_f0, n_samples, 3, spec);
  const KlEstimate rev = kl_mc(unit, KlDirection::f0_f1, n_samples, 4, spec);
  // Divergences are nonnegative and the forward one obeys the closed-form
  // upper bound.
  CHECK(fwd.value > 0.0);
  CHECK(rev.value > 0.0);
  CHECK(fwd.value <= kl_bound_ei(unit) + 3.0 * fwd.std_error);
  CHECK(fwd.std_error > 0.0);
  CHECK(fwd.std_error < 0.01);

  // Same seed, same estimate; different worker counts, same estimate.
  const KlEstimate fwd2 = kl_mc(unit, KlDirection::f1_f0, n_samples, 3, spec);
  CHECK(fwd2.value == fwd.value);
  const KlEstimate fwd4 = kl_mc(unit, KlDirection::f1_f0, n_samples, 3, spec, 4);
  CHECK(fwd4.value == fwd.value);
}

TEST_CASE("monte carlo divergence uses only the block geometry of the scenario") {
  // Divergence is per block, so num_blocks must not affect the estimate.
  const QuadratureSpec spec = default_spec();
  const SystemParams one = SystemParams::create(4, 1, 1.0, 1.0, 0.8, Field::complex);
  const SystemParams many = SystemParams::create(32, 8, 1.0, 1.0, 0.8, Field::complex);
  const KlEstimate a = kl_mc(one, KlDirection::f1_f0, 20000, 5, spec);
  const KlEstimate b = kl_mc(many, KlDirection::f1_f0, 20000, 5, spec);
  CHECK(a.value == b.value);
}

TEST_CASE("converse moments: closed forms, limits, and field guard") {
  // Unit parameters, B = 1 (complex): E0 = 0, VAR0 = 1, E1 = 1, VAR1 = 6.
  const SystemParams unit = SystemParams::create(1, 1, 1.0, 1.0, 1.0, Field::complex);
  const ConverseMoments m = converse_moments(unit);
  CHECK(m.e0_yp == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m.var0_yp == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.e1_yp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.var1_yp == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(m.mean_gap == doctest::Approx(1.0).epsilon(1e-14));

  // General point: B = 4, lambda = 2, noise_var = 1.5, alice_power = 0.9.
  const SystemParams g = SystemParams::create(8, 2, 2.0, 1.5, 0.9, Field::complex);
  const ConverseMoments mg = converse_moments(g);
  const double B = 4.0, lam = 2.0, s0 = 1.5, sa = 0.9;
  CHECK(mg.e0_yp == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mg.var0_yp == doctest::Approx(s0 * s0).epsilon(1e-14));
  CHECK(mg.e1_yp == doctest::Approx(std::sqrt(B) * sa / lam).epsilon(1e-14));
  const double expected_var1 =
      s0 * s0 + 2.0 * sa * sa / (lam * lam) + 2.0 * sa * s0 / lam + B * sa * sa / (lam * lam);
  CHECK(mg.var1_yp == doctest::Approx(expected_var1).epsilon(1e-14));

  // alice_power -> 0 collapses H1 onto H0.
  const SystemParams off = SystemParams::create(8, 2, 2.0, 1.5, 0.0, Field::complex);
  const ConverseMoments m0 = converse_moments(off);
  CHECK(m0.e1_yp == m0.e0_yp);
  CHECK(m0.var1_yp == doctest::Approx(m0.var0_yp).epsilon(1e-15));
  CHECK(m0.mean_gap == 0.0);

  const SystemParams real = SystemParams::create(8, 2, 2.0, 1.5, 0.9, Field::real);
  CHECK_THROWS_AS(converse_moments(real), UnsupportedConfiguration);
}

TEST_CASE("converse moments match simulated block statistics") {
  const SystemParams p = SystemParams::create(12, 3, 2.0, 1.2, 1.5, Field::complex);
  const ConverseMoments m = converse_moments(p);
  const double B = double(p.block_len);
  const double root_b = std::sqrt(B);

  RngStream rng(91);
  const std::int64_t reps = 40000;
  double s1 = 0.0, s2 = 0.0, h0s1 = 0.0, h0s2 = 0.0;
  std::int64_t count = 0;
  for (std::int64_t t = 0; t < reps / p.num_blocks; ++t) {
    for (double e : sample_h1_energies(p, rng)) {
      const double yp = e / (2.0 * root_b) - root_b * p.noise_var;
      s1 += yp;
      s2 += yp * yp;
      ++count;
    }
    for (double e : sample_h0_energies(p, rng)) {
      const double yp = e / (2.0 * root_b) - root_b * p.noise_var;
      h0s1 += yp;
      h0s2 += yp * yp;
    }
  }
  const double n = double(count);
  const double mean1 = s1 / n, var1 = s2 / n - mean1 * mean1;
  const double mean0 = h0s1 / n, var0 = h0s2 / n - mean0 * mean0;
  // 4-sigma bands from the sample size (kurtosis absorbed into a factor).
  const double tol1 = 4.0 * std::sqrt(m.var1_yp / n);
  CHECK(std::fabs(mean1 - m.e1_yp) < tol1);
  CHECK(std::fabs(mean0 - m.e0_yp) < 4.0 * std::sqrt(m.var0_yp / n));
  CHECK(std::fabs(var1 - m.var1_yp) < 0.1 * m.var1_yp);
  CHECK(std::fabs(var0 - m.var0_yp) < 0.1 * m.var0_yp);
}

TEST_CASE("mean gap follows the power law of the signal amplitude") {
  // alice_power = c * n^{-rho} with B fixed: mean_gap scales as n^{-rho}.
  const double rho = 0.7, c = 2.0;
  const SystemParams p1 = SystemParams::create(
      100, 100, 1.0, 1.0, c * std::pow(100.0, -rho), Field::complex);
  const SystemParams p2 = SystemParams::create(
      10000, 10000, 1.0, 1.0, c * std::pow(10000.0, -rho), Field::complex);
  const double ratio = converse_moments(p1).mean_gap / converse_moments(p2).mean_gap;
  CHECK(ratio == doctest::Approx(std::pow(100.0, rho)).epsilon(1e-12));
}

TEST_CASE("kl report bundles bounds, estimates, and the floor") {
  const QuadratureSpec spec = default_spec();
  const SystemParams p = SystemParams::create(4, 4, 2.0, 1.0, 0.5, Field::complex);
  const KlReport rep = make_kl_report(p, 20000, 7, spec);
  CHECK(rep.bound_ei == doctest::Approx(kl_bound_ei(p)).epsilon(1e-15));
  CHECK(rep.bound_simple == doctest::Approx(kl_bound_simple(p)).epsilon(1e-15));
  CHECK(rep.num_blocks == 4);
  CHECK(rep.samples == 20000);
  CHECK(rep.floor_direction == KlDirection::f0_f1);
  const double d_slot = 4.0 * std::max(rep.d_f0_f1.value, 0.0);
  CHECK(rep.pe_floor_value == doctest::Approx(pe_floor(d_slot)).epsilon(1e-15));
  CHECK(rep.d_f1_f0.value <= rep.bound_ei + 3.0 * rep.d_f1_f0.std_error);

  const KlReport alt = make_kl_report(p, 20000, 7, spec, KlDirection::f1_f0);
  CHECK(alt.floor_direction == KlDirection::f1_f0);
  CHECK(alt.pe_floor_value ==
        doctest::Approx(pe_floor(4.0 * std::max(alt.d_f1_f0.value, 0.0))).epsilon(1e-15));
}

TEST_CASE("direction names round-trip") {
  CHECK(kl_direction_from_string("f1_f0") == KlDirection::f1_f0);
  CHECK(kl_direction_from_string("f0_f1") == KlDirection::f0_f1);
  CHECK(to_string(KlDirection::f1_f0) == std::string("f1_f0"));
  CHECK_THROWS_AS(kl_direction_from_string("sideways"), std::invalid_argument);
}
