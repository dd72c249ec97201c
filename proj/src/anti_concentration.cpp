#include "lpconc/anti_concentration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lpconc/errors.hpp"
#include "lpconc/monte_carlo.hpp"
#include "lpconc/numerics.hpp"
#include "lpconc/random.hpp"

namespace lpconc::anticonc {

namespace {

constexpr double kSnap = 1e-9;

// log(n!) - [(n + 1/2) log n - n + log sqrt(2 pi)].
double stirlerr(std::int64_t n) {
  static const std::array<double, 16> table = [] {
    std::array<double, 16> t{};
    const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (int i = 1; i < 16; ++i) {
      const double x = i;
      t[i] = std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x - log_sqrt_2pi;
    }
    return t;
  }();
  constexpr double S0 = 1.0 / 12, S1 = 1.0 / 360, S2 = 1.0 / 1260, S3 = 1.0 / 1680,
                   S4 = 1.0 / 1188;
  if (n < 16) return table[n];
  const double n1 = 1.0 / static_cast<double>(n);
  const double n2 = n1 * n1;
  if (n > 500) return (S0 - S1 * n2) * n1;
  if (n > 80) return (S0 - (S1 - S2 * n2) * n2) * n1;
  if (n > 35) return (S0 - (S1 - (S2 - S3 * n2) * n2) * n2) * n1;
  return (S0 - (S1 - (S2 - (S3 - S4 * n2) * n2) * n2) * n2) * n1;
}

// x log(x / np) + np - x, by series when x is close to np.
double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    const double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v * v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

void require_atom(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("atom a must lie in (0,1)");
}

void require_unit_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= kSnap * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Auto:
      return "auto";
    case Method::ExactBinomial:
      return "exact-binomial";
    case Method::MonteCarlo:
      return "monte-carlo";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "auto") return Method::Auto;
  if (text == "exact-binomial" || text == "exact") return Method::ExactBinomial;
  if (text == "monte-carlo" || text == "mc") return Method::MonteCarlo;
  throw InputError("unknown method '" + text + "' (expected auto, exact-binomial or monte-carlo)");
}

double binomial_pmf(std::int64_t k, std::int64_t n, double prob) {
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("prob must lie in [0,1]");
  if (k < 0 || k > n) return 0.0;
  if (prob == 0.0) return k == 0 ? 1.0 : 0.0;
  if (prob == 1.0) return k == n ? 1.0 : 0.0;
  const double dn = static_cast<double>(n);
  if (k == 0) return std::exp(dn * std::log1p(-prob));
  if (k == n) return std::exp(dn * std::log(prob));
  const double dk = static_cast<double>(k);
  const double lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(dk, dn * prob) -
                    bd0(dn - dk, dn * (1.0 - prob));
  return std::exp(lc) * std::sqrt(dn / (2.0 * std::numbers::pi * dk * (dn - dk)));
}

IntervalSplit exact_two_point_split(double a, double p, double delta, std::int64_t n) {
  require_atom(a);
  require_unit_delta(delta);
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (n < 1 || n > 1'000'000) throw std::invalid_argument("n must lie in [1, 1e6]");
  const double q = 1.0 - a;
  const double center = static_cast<double>(n) * q;
  const double lo = snap(std::exp(p * std::log1p(-delta)) * center);
  const double hi = snap(std::exp(p * std::log1p(delta)) * center);
  IntervalSplit s{};
  s.k_lo = static_cast<std::int64_t>(std::ceil(lo));
  s.k_hi = static_cast<std::int64_t>(std::floor(hi));

  // Masses beyond 40 standard deviations are below double resolution.
  const double spread = 40.0 * std::sqrt(static_cast<double>(n) * a * q) + 10.0;
  const std::int64_t first = std::max<std::int64_t>(0, static_cast<std::int64_t>(center - spread));
  const std::int64_t last =
      std::min<std::int64_t>(n, static_cast<std::int64_t>(std::ceil(center + spread)));
  CompensatedSum below, inside, above;
  for (std::int64_t k = first; k <= last; ++k) {
    const double m = binomial_pmf(k, n, q);
    if (k < s.k_lo)
      below.add(m);
    else if (k > s.k_hi)
      above.add(m);
    else
      inside.add(m);
  }
  s.below = below.value();
  s.inside = inside.value();
  s.above = above.value();
  return s;
}

double exact_two_point_concentration(double a, double r, double p, double delta, std::int64_t n) {
  if (!(r > 0.0)) throw std::invalid_argument("spike r must be positive");
  return exact_two_point_split(a, p, delta, n).inside;
}

BerryEsseenBounds berry_esseen_bounds(double a, double p, double delta, std::int64_t n,
                                      double C_const) {
  require_atom(a);
  require_unit_delta(delta);
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (!(C_const >= 0.4097 && C_const <= 0.56))
    throw std::invalid_argument("Berry-Esseen constant must lie in [0.4097, 0.56]");
  const double q = 1.0 - a;
  BerryEsseenBounds b;
  b.sigma = std::sqrt(a * q);
  b.rho = a * q * (1.0 - 2.0 * q + 2.0 * q * q);
  b.C_const = C_const;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double slack = C_const * b.rho / (b.sigma * b.sigma * b.sigma * root_n);
  const double up = root_n / b.sigma * std::expm1(p * std::log1p(delta)) * q;
  const double down = root_n / b.sigma * std::expm1(p * std::log1p(-delta)) * q;
  b.upper_tail_lower_bound = normal_cdf(-up) - slack;
  b.lower_tail_lower_bound = normal_cdf(down) - slack;
  b.vacuous = b.upper_tail_lower_bound <= 0.0 && b.lower_tail_lower_bound <= 0.0;
  return b;
}

double p_star_for_epsilon(double a, double delta, double epsilon, std::int64_t n) {
  require_atom(a);
  require_unit_delta(delta);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double c = epsilon * std::sqrt(a * (1.0 - a)) /
                   ((1.0 - a) * std::sqrt(static_cast<double>(n)));
  const double plus = std::log1p(c) / std::log1p(delta);
  // (1-d)^p >= 1 - c binds only while 1 - c > 0.
  const double minus = c < 1.0 ? std::log1p(-c) / std::log1p(-delta) : kInf;
  return std::min(plus, minus);
}

double binomial_mode_prob(double a, std::int64_t n) {
  require_atom(a);
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double c = snap(static_cast<double>(n) * (1.0 - a));
  if (c != std::round(c)) return 0.0;
  return binomial_pmf(static_cast<std::int64_t>(c), n, 1.0 - a);
}

namespace {

std::optional<std::int64_t> empirical_threshold(double a, double Delta) {
  // The mode mass is at most ~ 1 / sqrt(2 pi n a (1-a)); past n_max it is below Delta / 2.
  const double bound = 2.0 * std::pow(2.0 / Delta, 2) / (2.0 * std::numbers::pi * a * (1.0 - a));
  if (bound > 1e7) return std::nullopt;
  const std::int64_t n_max = static_cast<std::int64_t>(bound) + 16;
  for (std::int64_t n = n_max; n >= 1; --n)
    if (binomial_mode_prob(a, n) >= 0.5 * Delta) return n;
  return 0;
}

bool two_or_three_point(const Distribution& d) {
  return std::holds_alternative<TwoPoint>(d.variant()) ||
         std::holds_alternative<ThreePointSymmetric>(d.variant());
}

}  // namespace

AntiConcReport find_p_star(const Distribution& dist, std::int64_t n, double delta, double Delta,
                           const PStarOptions& opts) {
  require_unit_delta(delta);
  if (!(Delta > 0.0 && Delta < 1.0)) throw std::invalid_argument("Delta must lie in (0,1)");
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (!(opts.p_min > 0.0 && opts.p_max > opts.p_min))
    throw std::invalid_argument("need 0 < p_min < p_max");
  const double a = dist.atom_at_zero();
  if (!(a > 0.0)) throw DomainError("anti-concentration requires an atom at zero (a > 0)");

  AntiConcReport rep;
  rep.n = n;
  rep.delta = delta;
  rep.target_Delta = Delta;
  rep.method = opts.method;
  if (rep.method == Method::Auto)
    rep.method = two_or_three_point(dist) ? Method::ExactBinomial : Method::MonteCarlo;
  if (rep.method == Method::ExactBinomial && !two_or_three_point(dist))
    throw std::invalid_argument(
        "exact-binomial needs a two-point or three-point law; use monte-carlo");

  rep.binomial_mode_prob = binomial_mode_prob(a, n);
  rep.empirical_N = empirical_threshold(a, Delta);
  const double q = 1.0 - a;
  const double sigma2 = a * q, rho = a * q * (1.0 - 2.0 * q + 2.0 * q * q);
  rep.conservative_N =
      16.0 * opts.C_const * opts.C_const * rho * rho / (sigma2 * sigma2 * sigma2 * Delta * Delta);

  double last_se = 0.0;
  auto prob = [&](double p) {
    if (rep.method == Method::ExactBinomial) return exact_two_point_split(a, p, delta, n).inside;
    // Same (seed, n) stream at every p: common random numbers keep the
    // estimate monotone-friendly across bisection steps.
    mc::RunOptions ro{opts.workers};
    const mc::Frequency f =
        mc::concentration_frequency(dist, n, p, delta, opts.mc_samples, opts.seed, ro);
    last_se = f.standard_error;
    return f.freq;
  };
  if (rep.method == Method::MonteCarlo) rep.mc_samples = opts.mc_samples;

  rep.prob_at_p_min = prob(opts.p_min);
  if (rep.prob_at_p_min > Delta) {
    rep.diagnostic =
        "no p in the search range reaches the target: probability at p_min exceeds Delta "
        "(binomial mode mass " +
        std::to_string(rep.binomial_mode_prob) + "); n is below the threshold N";
    return rep;
  }
  double lo = opts.p_min, hi = opts.p_max;
  double lo_prob = rep.prob_at_p_min, lo_se = last_se;
  const double hi_prob = prob(hi);
  if (hi_prob <= Delta) {
    lo = hi;
    lo_prob = hi_prob;
    lo_se = last_se;
  } else {
    for (int i = 0; i < opts.iterations; ++i) {
      const double mid = std::sqrt(lo * hi);
      const double pm = prob(mid);
      ++rep.iterations;
      if (pm <= Delta) {
        lo = mid;
        lo_prob = pm;
        lo_se = last_se;
      } else {
        hi = mid;
      }
    }
  }
  rep.p_star = lo;
  rep.exact_prob_at_p_star = lo_prob;
  rep.mc_standard_error = rep.method == Method::MonteCarlo ? lo_se : 0.0;
  return rep;
}

}  // namespace lpconc::anticonc
