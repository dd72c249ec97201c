#include "lpconc/closed_forms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/polygamma.hpp>

namespace lpconc::closed_form {

namespace {

void require_unit_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

double log1pm(double delta, Sign sign) { return std::log1p(sign_value(sign) * delta); }

// lgamma(1/2 + p) - 2 lgamma((1+p)/2) + lgamma(1/2) as a Taylor series at 1/2.
// Orders 0 and 1 cancel; term k carries (1 - 2^(1-k)) psi^(k-1)(1/2) / k!.
double normal_log_ratio_series(double p) {
  double sum = 0.0, pk = p, fact = 1.0;
  for (int k = 2; k <= 16; ++k) {
    pk *= p;
    fact *= k;
    sum += (1.0 - std::ldexp(1.0, 1 - k)) * boost::math::polygamma(k - 1, 0.5) * pk / fact;
  }
  return sum;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::UniformCube:
      return "uniform-cube";
    case Family::DiffUniform:
      return "diff-uniform";
    case Family::StandardNormal:
      return "standard-normal";
  }
  return "?";
}

double uniform_f(double delta, Sign sign) {
  require_unit_delta(delta);
  const double l = log1pm(delta, sign);
  // -log[(1+-d)(1 - l)] = -l - log1p(-l)
  return -l - std::log1p(-l);
}

double diff_uniform_h(double delta, Sign sign) {
  const double l = log1pm(delta, sign);
  return 25.0 - 12.0 * l + 4.0 * l * l;
}

double diff_uniform_f(double delta, Sign sign) {
  require_unit_delta(delta);
  const double l = log1pm(delta, sign);
  const double root_h = std::sqrt(diff_uniform_h(delta, sign));
  return 1.25 - 1.5 * l - 0.25 * root_h - std::log(root_h - 4.0);
}

double diff_uniform_ystar(double delta, Sign sign) {
  require_unit_delta(delta);
  const double s = sign_value(sign);
  const double l = log1pm(delta, sign);
  return (-5.0 + 6.0 * l + std::sqrt(diff_uniform_h(delta, sign))) / (s * 6.0 - s * 4.0 * l);
}

double diff_uniform_objective(double y, double delta, Sign sign) {
  const double s = sign_value(sign);
  const double l = log1pm(delta, sign);
  const double poly = 2.0 + s * 3.0 * y + y * y;
  if (!(poly > 0.0)) return -std::numeric_limits<double>::infinity();
  return s * y * (l - 1.5) - std::numbers::ln2 + std::log(poly);
}

double phi_closed(Family family, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("phi requires p > 0");
  switch (family) {
    case Family::UniformCube:
      return 0.5 + p;
    case Family::DiffUniform:
      return (2.0 + 4.0 * p) / (5.0 + p);
    case Family::StandardNormal: {
      // sqrt(pi) Gamma(1/2 + p) / Gamma((1+p)/2)^2 - 1, via log-Gamma.
      const double log_ratio =
          p < 0.05 ? normal_log_ratio_series(p)
                   : 0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 + p) -
                         2.0 * std::lgamma(0.5 * (1.0 + p));
      const double excess = std::expm1(log_ratio);
      if (!(excess > 0.0)) return phi_limit_at_zero(family);
      return 0.5 * p * p / excess;
    }
  }
  return 0.0;
}

double phi_limit_at_zero(Family family) {
  switch (family) {
    case Family::UniformCube:
      return 0.5;
    case Family::DiffUniform:
      return 0.4;
    case Family::StandardNormal:
      return 4.0 / (std::numbers::pi * std::numbers::pi);
  }
  return 0.0;
}

double cube_upper_bound(double delta, std::int64_t n) {
  require_unit_delta(delta);
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double l = std::log1p(delta);
  return std::exp(static_cast<double>(n) * (l + std::log1p(-l)));
}

}  // namespace lpconc::closed_form
