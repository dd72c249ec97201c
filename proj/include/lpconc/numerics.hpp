#pragma once

// Shared numerical kernels: compensated sums, log-space helpers, 1-D concave
// maximization and log-space adaptive quadrature.

#include <cmath>
#include <functional>
#include <span>

namespace lpconc {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// log of the mean of exp(values).
double log_mean_exp(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double x);

struct Maximum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool unbounded = false;  // objective still increasing at the bracket cap
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// f may return -inf on part of the interval.
Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol = 1e-8, int max_iter = 300);

/// Maximizes a concave f on [0, cap]: doubles x from `start` until f stops
/// increasing, then golden-section refines. Sets `unbounded` when f is still
/// increasing at `cap`.
Maximum maximize_concave_halfline(const std::function<double(double)>& f, double start = 1.0,
                                  double cap = 0x1.0p60, double rel_tol = 1e-8);

struct LogIntegralOptions {
  /// Initial guess of where the mass lives.
  double lo = -30.0;
  double hi = 0.0;
  /// True when `hi` is the end of the support; otherwise it is extended.
  bool hi_is_support_end = true;
  /// Extension beyond this point means the integral diverges.
  double hi_cap = 350.0;
  double rel_tol = 1e-12;
};

/// log of the integral of exp(psi(l)) over (-inf, hi]. Returns +inf when the
/// integrand does not decay before hi_cap. psi must tend to -inf as l -> -inf.
double log_integrate_exp(const std::function<double(double)>& psi,
                         const LogIntegralOptions& opts = {});

}  // namespace lpconc
