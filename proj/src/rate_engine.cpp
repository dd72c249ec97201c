#include "lpconc/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lpconc/closed_forms.hpp"
#include "lpconc/errors.hpp"
#include "lpconc/numerics.hpp"

namespace lpconc::rate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Below this p the optimizer works in y = p t, since argmax t grows like 1/p.
constexpr double kSmallP = 0.05;

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

// (1 +- d)^p - 1, with (1 - d) clamped at 0 for d >= 1.
double scaled_gap(double p, double delta, Sign sign) {
  if (sign == Sign::Minus && delta >= 1.0) return -1.0;
  return std::expm1(p * std::log1p(sign_value(sign) * delta));
}

// lambda(t) = s t excess - log E exp(s t (|x|^p - ref)) with excess = (1 +- d)^p mu - ref.
// ref is the reference point the MGF uses internally, so neither term carries a
// constant of size t mu that would cancel against the other.
struct LambdaForm {
  double excess;
  double ref;
};

LambdaForm lambda_form(const Distribution& dist, double p, double delta, Sign sign) {
  if (p >= 1.0) {
    const double scale = sign == Sign::Minus && delta >= 1.0
                             ? 0.0
                             : std::exp(p * std::log1p(sign_value(sign) * delta));
    return {scale * mu_p(dist, p), 0.0};
  }
  const double gap = scaled_gap(p, delta, sign);
  const double mu_m1 = std::expm1(log_abs_moment(dist, p));
  return {gap + mu_m1 + gap * mu_m1, 1.0};
}

void require_within_tail_order(const Distribution& dist, double p) {
  if (p > dist.tail_order())
    throw DomainError("p exceeds the tail order p0 of the distribution (MGF of |x|^p diverges)");
}

template <class T>
bool holds(const Distribution& d) {
  return std::holds_alternative<T>(d.variant());
}

RateResult two_point_rate(double atom, double spike, double p, double delta, Sign sign) {
  RateResult r;
  r.tolerance_met = true;
  const double s = sign_value(sign);
  const double scale = std::pow(1.0 + s * delta, p);
  const double q = scale * (1.0 - atom);  // target fraction of nonzero coordinates
  const double rp = std::pow(spike, p);
  if (sign == Sign::Plus && q >= 1.0) {
    if (q == 1.0) {
      r.value = -std::log1p(-atom);
      r.regime = Regime::LimitPToInfinity;
    } else {
      r.value = kInf;
      r.regime = Regime::Divergent;
    }
    return r;
  }
  const double t = s * std::log(atom * scale / (1.0 - (1.0 - atom) * scale)) / rp;
  r.argmax_t = t;
  r.value = s * t * scale * rp * (1.0 - atom) -
            log_add_exp(std::log(atom), std::log1p(-atom) + s * t * rp);
  r.value = std::max(r.value, 0.0);
  return r;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::InteriorOptimum:
      return "interior-optimum";
    case Regime::LimitPToZero:
      return "limit-p-to-0";
    case Regime::LimitPToInfinity:
      return "limit-p-to-infinity";
    case Regime::Divergent:
      return "divergent";
  }
  return "?";
}

double lambda_value(const Distribution& dist, double t, double p, double delta, Sign sign) {
  require_positive(p, "p");
  if (t == 0.0) return 0.0;
  const double s = sign_value(sign);
  const LambdaForm form = lambda_form(dist, p, delta, sign);
  const double log_mgf = log_mgf_abs_p(dist, s * t, p, form.ref);
  if (log_mgf == kInf) return -kInf;
  return s * t * form.excess - log_mgf;
}

RateResult rate_numeric(const Distribution& dist, double p, double delta, Sign sign) {
  require_positive(p, "p");
  require_positive(delta, "delta");
  if (sign == Sign::Minus && delta >= 1.0)
    return RateResult{kInf, std::nullopt, Regime::Divergent, 0, true};
  require_within_tail_order(dist, p);

  const double mu = mu_p(dist, p);
  // Above the support the upper event is empty.
  const double bound = dist.ess_sup();
  if (sign == Sign::Plus && std::isfinite(bound) &&
      p * std::log1p(delta) + std::log(mu) > p * std::log(bound))
    return RateResult{kInf, std::nullopt, Regime::Divergent, 0, true};
  const LambdaForm form = lambda_form(dist, p, delta, sign);
  const double s = sign_value(sign);
  // Coordinate change t = y / unit keeps the bracket O(1): t mu sets the scale of
  // the exponent, and small p contributes a further factor p.
  const double unit = (p < kSmallP ? p : 1.0) * mu;
  auto objective = [&](double y) {
    if (y == 0.0) return 0.0;
    const double t = y / unit;
    const double log_mgf = log_mgf_abs_p(dist, s * t, p, form.ref);
    if (log_mgf == kInf) return -kInf;
    return s * t * form.excess - log_mgf;
  };
  const Maximum m = maximize_concave_halfline(objective, 1.0);
  RateResult r;
  r.iterations = m.iterations;
  if (m.unbounded) {
    r.value = kInf;
    r.regime = Regime::Divergent;
    r.tolerance_met = true;
    return r;
  }
  r.value = std::max(m.value, 0.0);
  r.argmax_t = m.x / unit;
  r.tolerance_met = m.converged;
  if (std::isinf(r.value)) r.regime = Regime::Divergent;
  return r;
}

RateResult rate(const Distribution& dist, double p, double delta, Sign sign) {
  require_positive(p, "p");
  require_positive(delta, "delta");
  if (sign == Sign::Minus && delta >= 1.0)
    return RateResult{kInf, std::nullopt, Regime::Divergent, 0, true};
  if (const auto* t = std::get_if<TwoPoint>(&dist.variant()))
    return two_point_rate(t->atom, t->spike, p, delta, sign);
  if (const auto* t = std::get_if<ThreePointSymmetric>(&dist.variant()))
    return two_point_rate(t->atom, t->spike, p, delta, sign);
  return rate_numeric(dist, p, delta, sign);
}

double small_p_rate_numeric(const Distribution& dist, double delta, Sign sign) {
  require_positive(delta, "delta");
  if (dist.atom_at_zero() > 0.0)
    throw DomainError(
        "small-p rate is undefined with an atom at zero; use the anti-concentration analysis");
  if (sign == Sign::Minus && delta >= 1.0) return kInf;
  const double s = sign_value(sign);
  const double drift = std::log1p(s * delta) + log_moments(dist).mean;
  auto objective = [&](double y) {
    const double lm = log_abs_moment(dist, s * y);
    if (lm == kInf) return -kInf;
    return s * y * drift - lm;
  };
  const Maximum m = maximize_concave_halfline(objective, 1.0);
  if (m.unbounded) return kInf;
  return std::max(m.value, 0.0);
}

double small_p_rate(const Distribution& dist, double delta, Sign sign) {
  require_positive(delta, "delta");
  if (dist.atom_at_zero() > 0.0)
    throw DomainError(
        "small-p rate is undefined with an atom at zero; use the anti-concentration analysis");
  if (sign == Sign::Minus && delta >= 1.0) return kInf;
  if (delta < 1.0) {
    if (holds<UniformSymmetric>(dist) || holds<UniformUnit>(dist))
      return closed_form::uniform_f(delta, sign);
    if (holds<DiffUniform>(dist)) return closed_form::diff_uniform_f(delta, sign);
  }
  return small_p_rate_numeric(dist, delta, sign);
}

LargePLimits large_p_limits(const Distribution& dist, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  const double bound = dist.ess_sup();
  if (std::isinf(bound)) throw DomainError("large-p limits need bounded support");
  const double edge = (1.0 - delta) * bound;
  LargePLimits out;
  out.plus = kInf;
  out.minus = -std::log(cdf_abs(dist, edge));
  out.minus_upper = -std::log(cdf_abs_left(dist, edge));
  out.bracket = dist.abs_has_atoms();
  return out;
}

double phi(const Distribution& dist, double p) {
  require_positive(p, "p");
  using closed_form::Family;
  if (holds<UniformSymmetric>(dist) || holds<UniformUnit>(dist))
    return closed_form::phi_closed(Family::UniformCube, p);
  if (holds<DiffUniform>(dist)) return closed_form::phi_closed(Family::DiffUniform, p);
  if (holds<StandardNormal>(dist)) return closed_form::phi_closed(Family::StandardNormal, p);
  const double var = var_abs_p(dist, p);
  if (!(var > 0.0)) throw DomainError("phi undefined for a degenerate |x|^p");
  const double mu = mu_p(dist, p);
  return 0.5 * p * p * mu * mu / var;
}

double c_star(const Distribution& dist) {
  // With an atom at zero, phi(p) ~ p^2 (1-a) / (2a) -> 0.
  if (dist.atom_at_zero() > 0.0) return 0.0;
  const double limit = 0.5 / log_moments(dist).var;
  constexpr int kGrid = 200;
  const double lo = std::log(1e-3), hi = std::log(1e2);
  std::vector<double> values(kGrid + 1);
  int best = 0;
  for (int i = 0; i <= kGrid; ++i) {
    values[i] = phi(dist, std::exp(lo + (hi - lo) * i / kGrid));
    if (values[i] < values[best]) best = i;
  }
  const double cell = (hi - lo) / kGrid;
  const Maximum m = golden_section_max([&](double lp) { return -phi(dist, std::exp(lp)); },
                                       lo + std::max(best - 1, 0) * cell,
                                       lo + std::min(best + 1, kGrid) * cell, 1e-10);
  return std::min({limit, values[best], -m.value});
}

UniformRate uniform_rate(const Distribution& dist, double delta, Sign sign,
                         const UniformRateOptions& opts) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (dist.atom_at_zero() > 0.0)
    throw DomainError("uniform-in-p rate requires no atom at zero");
  const double p_hi = std::min(dist.tail_order(), opts.p_max);
  const double l_lo = std::log(opts.p_min), l_hi = std::log(p_hi);
  const int n = std::max(opts.grid_points, 2);

  auto eval = [&](double log_p) { return rate(dist, std::exp(log_p), delta, sign).value; };
  std::vector<double> log_ps(n), values(n);
  std::size_t best = 0;
  for (int i = 0; i < n; ++i) {
    log_ps[i] = l_lo + (l_hi - l_lo) * i / (n - 1);
    values[i] = eval(log_ps[i]);
    if (values[i] < values[best]) best = i;
  }
  double best_lp = log_ps[best], best_v = values[best];
  double left = log_ps[best > 0 ? best - 1 : best];
  double right = log_ps[best + 1 < values.size() ? best + 1 : best];
  for (int r = 0; r < opts.refinements; ++r) {
    const double ml = 0.5 * (left + best_lp), mr = 0.5 * (best_lp + right);
    const double vl = ml < best_lp ? eval(ml) : kInf;
    const double vr = mr > best_lp ? eval(mr) : kInf;
    if (vl < best_v && vl <= vr) {
      right = best_lp;
      best_lp = ml;
      best_v = vl;
    } else if (vr < best_v) {
      left = best_lp;
      best_lp = mr;
      best_v = vr;
    } else {
      left = ml;
      right = mr;
    }
  }

  UniformRate out{best_v, Regime::InteriorOptimum, std::exp(best_lp)};
  const double small = small_p_rate(dist, delta, sign);
  if (small < out.value) out = UniformRate{small, Regime::LimitPToZero, kNaN};
  if (std::isinf(dist.tail_order()) && sign == Sign::Minus) {
    const double large = large_p_limits(dist, delta).minus;
    if (large < out.value) out = UniformRate{large, Regime::LimitPToInfinity, kNaN};
  }
  return out;
}

BoundResult chernoff_bounds(double rate_plus, double rate_minus, std::int64_t n) {
  if (!(rate_plus >= 0.0) || !(rate_minus >= 0.0))
    throw std::invalid_argument("rates must be non-negative");
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double dn = static_cast<double>(n);
  BoundResult b;
  b.upper_tail_bound = std::exp(-dn * rate_plus);
  b.lower_tail_bound = std::exp(-dn * rate_minus);
  b.two_sided_lower = std::max(0.0, 1.0 - b.upper_tail_bound - b.lower_tail_bound);
  return b;
}

double quadratic_two_sided_lower(double coefficient, double delta, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  return std::max(0.0, 1.0 - 2.0 * std::exp(-static_cast<double>(n) * coefficient * delta * delta));
}

ContrastBounds contrast_bounds(double rate_at_half_delta, double rate_at_rc_delta, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double dn = static_cast<double>(n);
  auto bound = [dn](double f) { return std::clamp(1.0 - 4.0 * std::exp(-dn * f), 0.0, 1.0); };
  return ContrastBounds{bound(rate_at_half_delta), bound(rate_at_rc_delta)};
}

ContrastBounds contrast_bounds(const std::function<double(double)>& f_star, std::int64_t n,
                               double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  return contrast_bounds(f_star(0.5 * delta), f_star(delta / (2.0 + delta)), n);
}

}  // namespace lpconc::rate
