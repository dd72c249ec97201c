#pragma once

// Anti-concentration for laws with an atom at zero. With k nonzero
// coordinates out of n, k ~ Binomial(n, 1 - a); for two- and three-point laws
// ||x||_p^p = k r^p, so the concentration event is an integer interval of k.

#include <cstdint>
#include <optional>
#include <string>

#include "lpconc/distributions.hpp"

namespace lpconc::anticonc {

enum class Method { Auto, ExactBinomial, MonteCarlo };

const char* to_string(Method m);
Method parse_method(const std::string& text);

/// Binomial(n, prob) mass at k via the saddle-point expansion (accurate in the
/// far tails where lgamma differences cancel).
double binomial_pmf(std::int64_t k, std::int64_t n, double prob);

struct IntervalSplit {
  double below;   // P(k < lower endpoint)
  double inside;  // P(lower <= k <= upper)
  double above;   // P(k > upper endpoint)
  std::int64_t k_lo;
  std::int64_t k_hi;  // k_hi < k_lo when no integer is inside
};

/// Exact split of the binomial mass around the interval
/// [(1-d)^p n(1-a), (1+d)^p n(1-a)]. Endpoints within 1e-9 relative of an
/// integer are snapped and included.
IntervalSplit exact_two_point_split(double a, double p, double delta, std::int64_t n);

/// P((1-d)^p n mu_p <= ||x||_p^p <= (1+d)^p n mu_p) for the two-point law on
/// {0, r}; independent of r.
double exact_two_point_concentration(double a, double r, double p, double delta, std::int64_t n);

struct BerryEsseenBounds {
  double sigma;
  double rho;
  double C_const;
  double upper_tail_lower_bound;  // on P(k > (1+d)^p n(1-a)); may be negative
  double lower_tail_lower_bound;  // on P(k < (1-d)^p n(1-a)); may be negative
  bool vacuous;                   // both bounds <= 0
};

inline constexpr double kBerryEsseenDefault = 0.56;

BerryEsseenBounds berry_esseen_bounds(double a, double p, double delta, std::int64_t n,
                                      double C_const = kBerryEsseenDefault);

/// Largest p with sqrt(n)/sigma |(1 +- d)^p - 1| (1-a) <= eps for both signs.
double p_star_for_epsilon(double a, double delta, double epsilon, std::int64_t n);

/// P(k = n(1-a)); zero when n(1-a) is not an integer.
double binomial_mode_prob(double a, std::int64_t n);

struct AntiConcReport {
  std::int64_t n = 0;
  double delta = 0.0;
  double target_Delta = 0.0;
  std::optional<double> p_star;
  double exact_prob_at_p_star = 0.0;  // probability at p_star (MC estimate on that path)
  double prob_at_p_min = 0.0;         // probability at the search floor p = 1e-6
  double binomial_mode_prob = 0.0;
  Method method = Method::ExactBinomial;
  std::int64_t mc_samples = 0;
  double mc_standard_error = 0.0;  // at p_star, MC path only
  int iterations = 0;
  /// All n > empirical_N have binomial_mode_prob < Delta/2; absent past the scan cap.
  std::optional<std::int64_t> empirical_N;
  double conservative_N = 0.0;  // 16 C^2 rho^2 / (sigma^6 Delta^2)
  std::string diagnostic;
};

struct PStarOptions {
  Method method = Method::Auto;
  std::int64_t mc_samples = 10000;
  std::uint64_t seed = 0;
  int workers = 0;
  int iterations = 40;
  double p_min = 1e-6;
  double p_max = 2.0;
  double C_const = kBerryEsseenDefault;
};

/// Largest p in [p_min, p_max] found by geometric bisection with concentration
/// probability <= Delta.
AntiConcReport find_p_star(const Distribution& dist, std::int64_t n, double delta, double Delta,
                           const PStarOptions& opts = {});

}  // namespace lpconc::anticonc
