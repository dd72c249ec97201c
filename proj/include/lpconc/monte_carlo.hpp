#pragma once

// Seeded Monte Carlo estimates of concentration and contrast events for the
// normalized l^p quasi-norm of x ~ nu^n.
//
// Every draw belongs to a fixed chunk whose generator depends only on
// (seed, stream, chunk index); per-sample results land in indexed slots. The
// output is therefore bit-identical for any worker count.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpconc/distributions.hpp"

namespace lpconc::mc {

enum class Normalization { AnalyticMu, EmpiricalMu };

const char* to_string(Normalization n);
Normalization parse_normalization(const std::string& text);

/// Analytic mu_p for closed families, pooled sample mean for Empirical laws.
Normalization default_normalization(const Distribution& dist);

/// log sum |x_i|^p, factoring out the largest |x_i| so no term overflows.
/// -inf for an all-zero vector.
double log_lp_sum(std::span<const double> x, double p);

/// (sum |x_i|^p)^(1/p) via log_lp_sum.
double lp_norm(std::span<const double> x, double p);

struct Wilson {
  double center;
  double halfwidth;
};

/// 95% Wilson score interval for hits out of total.
Wilson wilson_interval(std::int64_t hits, std::int64_t total);

struct Frequency {
  double freq = 0.0;
  double ci_halfwidth = 0.0;
  double standard_error = 0.0;  // ci_halfwidth / 1.96
  std::int64_t hits = 0;
  std::int64_t samples = 0;
  double mu_p = 0.0;  // normalization actually used
};

struct RunOptions {
  int workers = 0;  // 0 = default_workers()
};

/// Per-sample log sum |x_i|^p for each p in p_grid, shape [p][M]. Draws come
/// from stream (seed, stream) and are shared across the whole grid.
std::vector<std::vector<double>> sample_log_sums(const Distribution& dist, std::int64_t n,
                                                 std::span<const double> p_grid, std::int64_t M,
                                                 std::uint64_t seed, std::uint64_t stream,
                                                 const RunOptions& opts = {});

/// Frequency of (1-d) <= ||x||_p / (n mu_p)^(1/p) <= (1+d) given per-sample
/// log sums. mu_p must be positive.
Frequency band_frequency(std::span<const double> log_sums, std::int64_t n, double p, double delta,
                         double mu);

/// Pooled mean of |x_i|^p over all draws.
double pooled_mu(std::span<const double> log_sums, std::int64_t n);

Frequency concentration_frequency(const Distribution& dist, std::int64_t n, double p, double delta,
                                  std::int64_t M, std::uint64_t seed, Normalization norm,
                                  const RunOptions& opts = {});
Frequency concentration_frequency(const Distribution& dist, std::int64_t n, double p, double delta,
                                  std::int64_t M, std::uint64_t seed,
                                  const RunOptions& opts = {});

struct ConcentrationGrid {
  std::vector<double> p_grid;
  std::vector<std::int64_t> n_grid;
  std::vector<std::vector<double>> freq;          // [p][n], NaN for failed cells
  std::vector<std::vector<double>> ci_halfwidth;  // [p][n]
  std::vector<std::string> failures;              // one line per failed cell
  std::int64_t sample_count = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  Normalization normalization = Normalization::AnalyticMu;
};

ConcentrationGrid curve_sweep(const Distribution& dist, std::span<const double> p_grid,
                              std::span<const std::int64_t> n_grid, double delta, std::int64_t M,
                              std::uint64_t seed, Normalization norm, const RunOptions& opts = {});

struct ContrastSummary {
  double p = 0.0;
  std::int64_t n = 0;
  double delta = 0.0;
  double median_rc = 0.0;
  /// P(| ||x1|| - ||x2|| | / (n mu_p)^(1/p) < d) over all pairs.
  double freq_below_delta = 0.0;
  /// Fraction of the 2M draws with | ||x|| / (n mu_p)^(1/p) - 1 | < d/2.
  double half_band_freq = 0.0;
  std::int64_t pairs = 0;
  std::int64_t skipped = 0;  // pairs with ||x1|| = 0, excluded from the median
  double skip_rate = 0.0;
  double mu_p = 0.0;
};

/// M independent pairs (2M fresh draws).
ContrastSummary relative_contrast(const Distribution& dist, std::int64_t n, double p,
                                  std::int64_t M, std::uint64_t seed, double delta,
                                  Normalization norm, const RunOptions& opts = {});
ContrastSummary relative_contrast(const Distribution& dist, std::int64_t n, double p,
                                  std::int64_t M, std::uint64_t seed, double delta,
                                  const RunOptions& opts = {});

/// Contrast statistics from precomputed per-draw log sums; draws 2i and 2i+1
/// form pair i.
ContrastSummary contrast_from_log_sums(std::span<const double> log_sums, std::int64_t n, double p,
                                       double delta, double mu);

/// Median of values (copied); NaN for an empty input.
double median(std::vector<double> values);

}  // namespace lpconc::mc
