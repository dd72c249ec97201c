#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lpconc/closed_forms.hpp"
#include "lpconc/errors.hpp"
#include "lpconc/rate_engine.hpp"

using namespace lpconc;
using namespace lpconc::rate;

namespace {

double kl(double q, double r) { return q * std::log(q / r) + (1 - q) * std::log((1 - q) / (1 - r)); }

}  // namespace

TEST_CASE("generic rates match independent quadrature oracles at delta = 0.2") {
  struct Row {
    Distribution d;
    double p, plus, minus;
  };
  const Row rows[] = {
      {Distribution::uniform_symmetric(1.0), 0.5, 0.0386924030944387, 0.0425280859496098},
      {Distribution::uniform_symmetric(1.0), 1.0, 0.0607386855667293, 0.0607386855667294},
      {Distribution::uniform_symmetric(1.0), 2.0, 0.112392545862560, 0.0909741528046294},
      {Distribution::diff_uniform(), 1.0, 0.0382357977808688, 0.0426171607372185},
      {Distribution::standard_normal(), 1.0, 0.0323350863737286, 0.0386250773239522},
  };
  for (const Row& r : rows) {
    CAPTURE(r.d.to_string());
    CAPTURE(r.p);
    const RateResult plus = rate::rate(r.d, r.p, 0.2, Sign::Plus);
    const RateResult minus = rate::rate(r.d, r.p, 0.2, Sign::Minus);
    CHECK(plus.value == doctest::Approx(r.plus).epsilon(1e-8));
    CHECK(minus.value == doctest::Approx(r.minus).epsilon(1e-8));
    CHECK(plus.tolerance_met);
    CHECK(plus.regime == Regime::InteriorOptimum);
  }
  const RateResult u1 = rate::rate(Distribution::uniform_symmetric(1.0), 1.0, 0.2, Sign::Plus);
  REQUIRE(u1.argmax_t);
  CHECK(*u1.argmax_t == doctest::Approx(1.22993).epsilon(1e-5));
}

TEST_CASE("lambda at a fixed t") {
  const double v = lambda_value(Distribution::uniform_unit(), 0.0, 1.0, 0.2, Sign::Plus);
  CHECK(v == 0.0);
  // TwoPoint a = 0.5, r = 1, t = 1, p = 1: 0.6 - log((1 + e) / 2).
  const double tp = lambda_value(Distribution::two_point(0.5), 1.0, 1.0, 0.2, Sign::Plus);
  CHECK(tp == doctest::Approx(0.6 - std::log((1.0 + std::numbers::e) / 2.0)).epsilon(1e-13));
  CHECK(tp == doctest::Approx(-0.0201145).epsilon(1e-5));
}

TEST_CASE("lambda is concave in t") {
  const Distribution d = Distribution::standard_normal();
  for (double t : {0.05, 0.2, 0.5, 1.0}) {
    const double a = lambda_value(d, t, 1.5, 0.3, Sign::Plus);
    const double b = lambda_value(d, t + 0.1, 1.5, 0.3, Sign::Plus);
    const double c = lambda_value(d, t + 0.2, 1.5, 0.3, Sign::Plus);
    CHECK(b >= 0.5 * (a + c) - 1e-12);
  }
}

TEST_CASE("two-point analytic rate equals the Bernoulli divergence and the optimizer") {
  for (double a : {0.25, 0.5, 0.75}) {
    for (double p : {0.01, 0.5, 1.0, 3.0}) {
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        CAPTURE(a);
        CAPTURE(p);
        const double scale = std::pow(1.0 + sign_value(s) * 0.2, p);
        const double q = scale * (1.0 - a);
        const RateResult r = rate::rate(Distribution::two_point(a, 2.0), p, 0.2, s);
        if (q >= 1.0) {
          CHECK(std::isinf(r.value));
          CHECK(r.regime == Regime::Divergent);
          continue;
        }
        CHECK(r.value == doctest::Approx(kl(q, 1.0 - a)).epsilon(1e-9));
        const RateResult n = rate_numeric(Distribution::two_point(a, 2.0), p, 0.2, s);
        CHECK(n.value == doctest::Approx(r.value).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("minus rate is infinite for delta >= 1") {
  const RateResult r = rate::rate(Distribution::uniform_unit(), 1.0, 1.0, Sign::Minus);
  CHECK(std::isinf(r.value));
  CHECK(small_p_rate(Distribution::uniform_unit(), 1.5, Sign::Minus) == kInf);
}

TEST_CASE("tail order bounds p for the normal law") {
  CHECK_NOTHROW(rate::rate(Distribution::standard_normal(), 2.0, 0.2, Sign::Plus));
  CHECK_THROWS_AS(rate::rate(Distribution::standard_normal(), 2.5, 0.2, Sign::Plus), DomainError);
}

TEST_CASE("small-p limit: closed form, numeric route and rate at p = 1e-3") {
  for (double delta : {0.1, 0.2}) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      for (const Distribution& d : {Distribution::uniform_symmetric(1.0), Distribution::diff_uniform()}) {
        CAPTURE(delta);
        CAPTURE(d.to_string());
        const double closed = small_p_rate(d, delta, s);
        CHECK(small_p_rate_numeric(d, delta, s) == doctest::Approx(closed).epsilon(1e-8));
        CHECK(rate::rate(d, 1e-3, delta, s).value == doctest::Approx(closed).epsilon(0.01));
      }
    }
  }
  CHECK_THROWS_AS(small_p_rate(Distribution::two_point(0.5), 0.1, Sign::Plus), DomainError);
}

TEST_CASE("small-delta rate approaches phi delta^2") {
  const Distribution u = Distribution::uniform_symmetric(1.0);
  for (double p : {0.1, 0.5, 1.0, 2.0}) {
    CAPTURE(p);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const double v = rate::rate(u, p, 1e-2, s).value / 1e-4;
      CHECK(v == doctest::Approx(phi(u, p)).epsilon(0.02));
    }
  }
}

TEST_CASE("phi and C*") {
  CHECK(phi(Distribution::uniform_symmetric(3.0), 1.0) == 1.5);
  CHECK(phi(Distribution::diff_uniform(), 1.0) == doctest::Approx(1.0));
  // Generic route on a zero-inflated law: p^2/2 mu^2 / Var.
  const Distribution z = Distribution::zero_inflated(0.5, Distribution::uniform_unit());
  const double mu = 0.25, var = 0.5 / 3.0 - mu * mu;
  CHECK(phi(z, 1.0) == doctest::Approx(0.5 * mu * mu / var).epsilon(1e-10));
  CHECK(c_star(Distribution::uniform_symmetric(1.0)) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c_star(Distribution::diff_uniform()) == doctest::Approx(0.4).epsilon(1e-9));
  // Normal phi rises from 4/pi^2 then decays like p^2 2^-p: the grid edge p = 100 wins.
  CHECK(c_star(Distribution::standard_normal()) ==
        doctest::Approx(5.5711209029072555e-27).epsilon(1e-9));
  CHECK(c_star(Distribution::two_point(0.5)) == 0.0);
}

TEST_CASE("large-p limits") {
  const LargePLimits u = large_p_limits(Distribution::uniform_symmetric(1.0), 0.2);
  CHECK(std::isinf(u.plus));
  CHECK(u.minus == doctest::Approx(-std::log(0.8)));
  CHECK_FALSE(u.bracket);
  const LargePLimits d = large_p_limits(Distribution::diff_uniform(), 0.2);
  CHECK(d.minus == doctest::Approx(-std::log(1.0 - 0.04)));
  const LargePLimits t = large_p_limits(Distribution::two_point(0.3), 0.2);
  CHECK(t.minus == doctest::Approx(-std::log(0.3)));
  CHECK(t.bracket);
  CHECK_THROWS_AS(large_p_limits(Distribution::standard_normal(), 0.2), DomainError);
}

TEST_CASE("uniform rates match the confluent hypergeometric oracle across p") {
  // E exp(c |x|^p) = 1F1(1/p; 1/p + 1; c) for |x| ~ U[0,1]; maximized in extended precision.
  struct Row {
    double p, plus, minus;
  };
  const Row rows[] = {
      {0.001, 0.019001517137873077, 0.021764564399853244},
      {0.5, 0.038692403094438418, 0.042528085949609632},
      {1.9, 0.1067319495513802, 0.088280299803395028},
      {10.0, 1.2858613381019547, 0.18254743648573085},
  };
  const Distribution u = Distribution::uniform_symmetric(1.0);
  for (const Row& r : rows) {
    CAPTURE(r.p);
    CHECK(rate::rate(u, r.p, 0.2, Sign::Plus).value == doctest::Approx(r.plus).epsilon(1e-11));
    CHECK(rate::rate(u, r.p, 0.2, Sign::Minus).value == doctest::Approx(r.minus).epsilon(1e-11));
  }
  // Incomplete-gamma oracle; the optimum sits near t = 5e9.
  CHECK(rate::rate(u, 100.0, 0.2, Sign::Minus).value ==
        doctest::Approx(0.21893336256881108).epsilon(1e-11));
  CHECK(rate::lambda_value(u, 4958184400.0, 100.0, 0.2, Sign::Minus) ==
        doctest::Approx(0.21893336256881108).epsilon(1e-11));
  CHECK(rate::lambda_value(u, 1000.0, 0.001, 0.2, Sign::Minus) ==
        doctest::Approx(-2.4662308828521778).epsilon(1e-11));
}

TEST_CASE("large-p rates") {
  // Above the support the upper event is empty.
  const RateResult up = rate::rate(Distribution::uniform_symmetric(1.0), 30.0, 0.2, Sign::Plus);
  CHECK(std::isinf(up.value));
  CHECK(up.regime == Regime::Divergent);
  CHECK(up.iterations == 0);
  // mu_p ~ 2.5e26 here; scipy quadrature oracle.
  const RateResult d = rate::rate(Distribution::diff_uniform(), 100.0, 0.2, Sign::Minus);
  CHECK(d.value == doctest::Approx(0.04961460781259907).epsilon(1e-9));
  CHECK(d.value > large_p_limits(Distribution::diff_uniform(), 0.2).minus);
  CHECK(rate::rate(Distribution::diff_uniform(), 10.0, 0.2, Sign::Minus).value ==
        doctest::Approx(0.0687816491391421).epsilon(1e-10));
}

TEST_CASE("cube plus rate increases in p and its infimum is the small-p limit") {
  const Distribution u = Distribution::uniform_symmetric(1.0);
  double prev = 0.0;
  for (int i = 0; i < 30; ++i) {
    const double p = 0.1 * std::pow(100.0, i / 29.0);
    const double v = rate::rate(u, p, 0.2, Sign::Plus).value;
    CHECK(v > prev);
    prev = v;
  }
  const UniformRate ur = uniform_rate(u, 0.2, Sign::Plus);
  CHECK(ur.value == doctest::Approx(closed_form::uniform_f(0.2, Sign::Plus)).epsilon(1e-4));
  CHECK(ur.attained == Regime::LimitPToZero);
  CHECK_THROWS_AS(uniform_rate(Distribution::two_point(0.5), 0.2, Sign::Plus), DomainError);
}

TEST_CASE("bounds from rates") {
  const BoundResult b = chernoff_bounds(0.01, 0.02, 100);
  CHECK(b.upper_tail_bound == doctest::Approx(std::exp(-1.0)));
  CHECK(b.lower_tail_bound == doctest::Approx(std::exp(-2.0)));
  CHECK(b.two_sided_lower == doctest::Approx(1.0 - std::exp(-1.0) - std::exp(-2.0)));
  CHECK(chernoff_bounds(0.0, 0.0, 5).two_sided_lower == 0.0);
  CHECK(chernoff_bounds(kInf, kInf, 5).two_sided_lower == 1.0);
  CHECK_THROWS_AS(chernoff_bounds(-1.0, 0.0, 5), std::invalid_argument);
  CHECK(quadratic_two_sided_lower(0.5, 0.1, 1000) == doctest::Approx(1.0 - 2.0 * std::exp(-5.0)));
  const ContrastBounds cb = contrast_bounds([](double d) { return d * d; }, 1000, 0.2);
  CHECK(cb.norm_diff_lower == doctest::Approx(1.0 - 4.0 * std::exp(-10.0)));
  CHECK(cb.relative_contrast_lower ==
        doctest::Approx(std::max(0.0, 1.0 - 4.0 * std::exp(-1000.0 * std::pow(0.2 / 2.2, 2)))));
}
