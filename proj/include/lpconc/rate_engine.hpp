#pragma once

// Chernoff rate functions for the normalized l^p quasi-norm of x ~ nu^n.
//
//   lambda(t) = +-t (1 +- d)^p mu_p - log E[exp(+-t |x|^p)]
//   Lambda(p, d) = sup_{t >= 0} lambda(t)
//
// lambda is concave in t (log-MGFs are convex), so a bracketed golden-section
// search finds the supremum without multistart.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "lpconc/distributions.hpp"

namespace lpconc::rate {

enum class Regime { InteriorOptimum, LimitPToZero, LimitPToInfinity, Divergent };

const char* to_string(Regime r);

struct RateResult {
  double value = 0.0;
  std::optional<double> argmax_t;
  Regime regime = Regime::InteriorOptimum;
  int iterations = 0;
  bool tolerance_met = false;
};

struct BoundResult {
  double upper_tail_bound;
  double lower_tail_bound;
  double two_sided_lower;
};

struct LargePLimits {
  double plus;         // always +inf
  double minus;        // -log F((1-d)B)
  double minus_upper;  // -log F((1-d)B-)
  bool bracket;        // |x| has atoms, so the limit is only bracketed in general
};

struct UniformRate {
  double value;
  Regime attained;  // which candidate achieved the minimum
  double p_at_min;  // NaN when attained by a limit
};

struct ContrastBounds {
  double norm_diff_lower;
  double relative_contrast_lower;
};

struct UniformRateOptions {
  int grid_points = 60;
  double p_min = 1e-3;
  double p_max = 1e2;
  int refinements = 3;
};

/// lambda(t) for one sign; -inf when the MGF diverges at t.
double lambda_value(const Distribution& dist, double t, double p, double delta, Sign sign);

/// Lambda(p, delta). Uses the analytic maximizer for two/three-point laws,
/// the generic optimizer otherwise.
RateResult rate(const Distribution& dist, double p, double delta, Sign sign);

/// Lambda(p, delta) by the generic optimizer regardless of family.
RateResult rate_numeric(const Distribution& dist, double p, double delta, Sign sign);

/// f(delta) = lim_{p->0} Lambda, closed form where one exists.
double small_p_rate(const Distribution& dist, double delta, Sign sign);

/// f(delta) by direct concave maximization over y of
/// +-y(log(1 +- d) + E log|x|) - log E|x|^{+-y}.
double small_p_rate_numeric(const Distribution& dist, double delta, Sign sign);

LargePLimits large_p_limits(const Distribution& dist, double delta);

/// phi(p) = (p^2 / 2) mu_p^2 / Var|x|^p, the small-delta coefficient of Lambda.
double phi(const Distribution& dist, double p);

/// inf_{p > 0} phi(p).
double c_star(const Distribution& dist);

/// inf over p in (0, p0] of Lambda(p, delta).
UniformRate uniform_rate(const Distribution& dist, double delta, Sign sign,
                         const UniformRateOptions& opts = {});

BoundResult chernoff_bounds(double rate_plus, double rate_minus, std::int64_t n);

/// 1 - 2 exp(-n c d^2), the quadratic two-sided bound for a coefficient c
/// below phi (or below C* for a p-independent bound). Valid only for small d.
double quadratic_two_sided_lower(double coefficient, double delta, std::int64_t n);

/// Lower bounds on P(|‖x1‖ - ‖x2‖| / (n mu_p)^{1/p} < d) and on the relative
/// contrast event, from the uniform rate at d/2 and d/(2+d).
ContrastBounds contrast_bounds(double rate_at_half_delta, double rate_at_rc_delta, std::int64_t n);
ContrastBounds contrast_bounds(const std::function<double(double)>& f_star, std::int64_t n,
                               double delta);

}  // namespace lpconc::rate
