#pragma once

// Tabular-data pipeline: CSV ingestion, column transforms, zero imputation and
// mode shifting, two-sample tests, and empirical concentration curves.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lpconc::diag {

enum class MissingPolicy { Reject, MeanImpute };

struct CsvOptions {
  std::vector<std::string> missing_markers{"", "NA", "NaN", "nan", "?"};
  MissingPolicy missing = MissingPolicy::Reject;
  char delimiter = ',';
};

/// Row-major numeric table.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> names;
  std::vector<std::size_t> unique_counts;
  std::vector<std::size_t> constant_columns;
  std::vector<std::string> warnings;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::vector<double> column(std::size_t j) const;
};

/// Builds a Dataset and fills the unique-value metadata.
Dataset make_dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
                     std::vector<std::string> names = {});

/// Recomputes unique_counts and constant_columns.
void refresh_metadata(Dataset& d);

Dataset parse_csv(std::istream& in, const CsvOptions& opts = {}, const std::string& source = "");
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

/// Removes constant columns; the count removed is written to *dropped.
Dataset drop_constant_columns(const Dataset& d, std::size_t* dropped = nullptr);

/// Column means 0 and unbiased variances 1. Throws on constant columns.
Dataset standardize(const Dataset& d);

struct ImputeResult {
  Dataset data;
  std::int64_t replaced = 0;
  double realized_fraction = 0.0;
};

/// Each entry independently set to exactly 0 with probability gap_prob.
ImputeResult zero_impute(const Dataset& d, double gap_prob, std::uint64_t seed);

struct ModeShiftResult {
  Dataset data;
  std::int64_t affected_columns = 0;
  std::int64_t zeros_introduced = 0;
};

/// Columns with fewer than max_unique distinct values are shifted so their
/// mode (smallest on ties) becomes 0.
ModeShiftResult mode_shift(const Dataset& d, std::size_t max_unique);

struct KsResult {
  double statistic;
  double pvalue;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample KS; both samples need at least 10 values.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Exact W1 between the empirical laws of x and y (area between the CDFs).
double wasserstein_1d(std::span<const double> x, std::span<const double> y);

/// Per-attribute W1 upper bound 2 b a for an a-zero-inflated copy of a law on [-b, b].
double wasserstein_atom_bound(double b, double a);

enum class CurveNormalization { Pooled, PerColumn };

const char* to_string(CurveNormalization n);
CurveNormalization parse_curve_normalization(const std::string& text);

/// Fraction of rows with | ||x||_p / (n mu_p)^(1/p) - 1 | < delta at each p,
/// mu_p estimated from the data. NaN marks a p where the estimate underflows.
std::vector<double> concentration_curve(const Dataset& d, std::span<const double> p_grid,
                                        double delta,
                                        CurveNormalization norm = CurveNormalization::Pooled);

struct CurvePoint {
  double p;
  double frac_original;
  double frac_perturbed;
};

struct PerturbReport {
  double gap_prob = 0.0;
  std::uint64_t seed = 0;
  double realized_fraction = 0.0;
  double wasserstein_total = 0.0;
  double ks_min_pvalue = 1.0;
  double ks_statistic_max = 0.0;
  std::vector<CurvePoint> curves;
};

/// Zero-imputes d and compares it with the original column by column.
PerturbReport perturb_report(const Dataset& d, double gap_prob, std::uint64_t seed,
                             std::span<const double> p_grid, double delta,
                             CurveNormalization norm = CurveNormalization::Pooled,
                             int workers = 0);

/// Column-wise comparison of two datasets of equal width.
PerturbReport compare(const Dataset& original, const Dataset& perturbed,
                      std::span<const double> p_grid, double delta,
                      CurveNormalization norm = CurveNormalization::Pooled, int workers = 0);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace lpconc::diag
