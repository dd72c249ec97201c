#include "lpconc/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "lpconc/errors.hpp"
#include "lpconc/monte_carlo.hpp"
#include "lpconc/numerics.hpp"
#include "lpconc/parallel.hpp"
#include "lpconc/random.hpp"

namespace lpconc::diag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  for (auto& c : out) {
    const auto b = c.find_first_not_of(" \t\r\"");
    const auto e = c.find_last_not_of(" \t\r\"");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last && std::isfinite(v);
}

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> c(rows);
  for (std::size_t i = 0; i < rows; ++i) c[i] = at(i, j);
  return c;
}

void refresh_metadata(Dataset& d) {
  d.unique_counts.assign(d.cols, 0);
  d.constant_columns.clear();
  for (std::size_t j = 0; j < d.cols; ++j) {
    std::unordered_set<double> seen;
    for (std::size_t i = 0; i < d.rows; ++i) seen.insert(d.at(i, j) == 0.0 ? 0.0 : d.at(i, j));
    d.unique_counts[j] = seen.size();
    if (seen.size() <= 1) d.constant_columns.push_back(j);
  }
}

Dataset make_dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
                     std::vector<std::string> names) {
  if (values.size() != rows * cols) throw std::invalid_argument("values size != rows * cols");
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("dataset contains a non-finite value");
  if (names.empty())
    for (std::size_t j = 0; j < cols; ++j) names.push_back("x" + std::to_string(j));
  if (names.size() != cols) throw std::invalid_argument("names size != cols");
  Dataset d;
  d.rows = rows;
  d.cols = cols;
  d.values = std::move(values);
  d.names = std::move(names);
  refresh_metadata(d);
  return d;
}

Dataset parse_csv(std::istream& in, const CsvOptions& opts, const std::string& source) {
  const std::string where = source.empty() ? "<input>" : source;
  std::string line;
  if (!std::getline(in, line) || split_line(line, opts.delimiter).empty())
    throw InputError(where + ": empty file (a header row is required)");
  std::vector<std::string> names = split_line(line, opts.delimiter);
  const std::size_t cols = names.size();
  const std::unordered_set<std::string> missing(opts.missing_markers.begin(),
                                                opts.missing_markers.end());

  std::vector<double> values;
  std::vector<char> is_missing;
  std::size_t rows = 0, rejected = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_line(line, opts.delimiter);
    if (cells.size() != cols)
      throw InputError(where + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(cols));
    std::vector<double> row(cols);
    std::vector<char> row_missing(cols, 0);
    bool any_missing = false;
    for (std::size_t j = 0; j < cols; ++j) {
      if (missing.contains(cells[j])) {
        row_missing[j] = 1;
        any_missing = true;
        continue;
      }
      if (!parse_double(cells[j], row[j]))
        throw InputError(where + ": unparseable cell '" + cells[j] + "' at line " +
                         std::to_string(line_no) + ", column " + std::to_string(j + 1) + " (" +
                         names[j] + ")");
    }
    if (any_missing && opts.missing == MissingPolicy::Reject) {
      ++rejected;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    is_missing.insert(is_missing.end(), row_missing.begin(), row_missing.end());
    ++rows;
  }
  if (rows == 0) throw InputError(where + ": no data rows");

  std::vector<std::string> warnings;
  if (rejected > 0)
    warnings.push_back("rejected " + std::to_string(rejected) + " rows with missing cells");
  if (opts.missing == MissingPolicy::MeanImpute) {
    std::size_t imputed = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      CompensatedSum s;
      std::size_t count = 0;
      for (std::size_t i = 0; i < rows; ++i)
        if (!is_missing[i * cols + j]) {
          s.add(values[i * cols + j]);
          ++count;
        }
      if (count == 0) throw InputError(where + ": column " + names[j] + " has no observed values");
      const double mean = s.value() / static_cast<double>(count);
      for (std::size_t i = 0; i < rows; ++i)
        if (is_missing[i * cols + j]) {
          values[i * cols + j] = mean;
          ++imputed;
        }
    }
    if (imputed > 0)
      warnings.push_back("mean-imputed " + std::to_string(imputed) +
                         " cells; after centering these become exact zeros (an atom at zero)");
  }
  Dataset d = make_dataset(rows, cols, std::move(values), std::move(names));
  d.warnings = std::move(warnings);
  return d;
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in, opts, path);
}

Dataset drop_constant_columns(const Dataset& d, std::size_t* dropped) {
  std::vector<char> keep(d.cols, 1);
  for (std::size_t j : d.constant_columns) keep[j] = 0;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d.cols; ++j)
    if (keep[j]) names.push_back(d.names[j]);
  std::vector<double> values;
  values.reserve(d.rows * names.size());
  for (std::size_t i = 0; i < d.rows; ++i)
    for (std::size_t j = 0; j < d.cols; ++j)
      if (keep[j]) values.push_back(d.at(i, j));
  if (dropped) *dropped = d.constant_columns.size();
  const std::size_t cols = names.size();
  Dataset out = make_dataset(d.rows, cols, std::move(values), std::move(names));
  out.warnings = d.warnings;
  return out;
}

Dataset standardize(const Dataset& d) {
  if (!d.constant_columns.empty())
    throw InputError("standardize: column '" + d.names[d.constant_columns.front()] +
                     "' is constant; drop constant columns first");
  if (d.rows < 2) throw InputError("standardize needs at least two rows");
  Dataset out = d;
  for (std::size_t j = 0; j < d.cols; ++j) {
    CompensatedSum s;
    for (std::size_t i = 0; i < d.rows; ++i) s.add(d.at(i, j));
    const double mean = s.value() / static_cast<double>(d.rows);
    CompensatedSum ss;
    for (std::size_t i = 0; i < d.rows; ++i) ss.add((d.at(i, j) - mean) * (d.at(i, j) - mean));
    const double sd = std::sqrt(ss.value() / static_cast<double>(d.rows - 1));
    for (std::size_t i = 0; i < d.rows; ++i) out.at(i, j) = (d.at(i, j) - mean) / sd;
  }
  refresh_metadata(out);
  return out;
}

ImputeResult zero_impute(const Dataset& d, double gap_prob, std::uint64_t seed) {
  if (!(gap_prob >= 0.0 && gap_prob <= 1.0))
    throw std::invalid_argument("gap_prob must lie in [0,1]");
  ImputeResult r;
  r.data = d;
  for (std::size_t i = 0; i < d.rows; ++i) {
    Rng rng = Rng::for_chunk(seed, 0x67617073ULL, i);
    for (std::size_t j = 0; j < d.cols; ++j)
      if (rng.uniform() < gap_prob) {
        r.data.at(i, j) = 0.0;
        ++r.replaced;
      }
  }
  const double total = static_cast<double>(d.rows * d.cols);
  r.realized_fraction = total > 0 ? static_cast<double>(r.replaced) / total : 0.0;
  refresh_metadata(r.data);
  return r;
}

ModeShiftResult mode_shift(const Dataset& d, std::size_t max_unique) {
  if (max_unique < 2) throw std::invalid_argument("max_unique must be at least 2");
  ModeShiftResult r;
  r.data = d;
  for (std::size_t j = 0; j < d.cols; ++j) {
    if (d.unique_counts[j] >= max_unique || d.unique_counts[j] <= 1) continue;
    std::unordered_map<double, std::size_t> freq;
    for (std::size_t i = 0; i < d.rows; ++i) ++freq[d.at(i, j) == 0.0 ? 0.0 : d.at(i, j)];
    double mode = 0.0;
    std::size_t best = 0;
    for (const auto& [v, c] : freq)
      if (c > best || (c == best && v < mode)) {
        mode = v;
        best = c;
      }
    if (mode == 0.0) continue;
    ++r.affected_columns;
    r.zeros_introduced += static_cast<std::int64_t>(best);
    for (std::size_t i = 0; i < d.rows; ++i) {
      const double v = d.at(i, j);
      r.data.at(i, j) = v == mode ? 0.0 : v - mode;
    }
  }
  refresh_metadata(r.data);
  return r;
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // Dual theta series, fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-static_cast<double>((2 * k - 1) * (2 * k - 1)) * c);
      s += term;
      if (term < 1e-18 * s) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 10 || y.size() < 10)
    throw std::invalid_argument("KS test needs at least 10 values per sample");
  const auto a = sorted_copy(x), b = sorted_copy(y);
  const double m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  return {d, kolmogorov_survival(d * std::sqrt(m * n / (m + n)))};
}

double wasserstein_1d(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("samples must be nonempty");
  const auto a = sorted_copy(x), b = sorted_copy(y);
  const double m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a.front(), b.front());
  CompensatedSum area;
  while (i < a.size() || j < b.size()) {
    const double v = std::min(i < a.size() ? a[i] : kInfinity, j < b.size() ? b[j] : kInfinity);
    area.add(std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n) * (v - prev));
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    prev = v;
  }
  return area.value();
}

double wasserstein_atom_bound(double b, double a) {
  if (!(b > 0.0) || !(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("need b > 0, a in [0,1]");
  return 2.0 * b * a;
}

const char* to_string(CurveNormalization n) {
  return n == CurveNormalization::Pooled ? "pooled" : "per-column";
}

CurveNormalization parse_curve_normalization(const std::string& text) {
  if (text == "pooled") return CurveNormalization::Pooled;
  if (text == "per-column") return CurveNormalization::PerColumn;
  throw InputError("unknown curve normalization '" + text + "' (expected pooled or per-column)");
}

std::vector<double> concentration_curve(const Dataset& d, std::span<const double> p_grid,
                                        double delta, CurveNormalization norm) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (d.rows == 0 || d.cols == 0) throw std::invalid_argument("empty dataset");
  const double log_n = std::log(static_cast<double>(d.cols));
  std::vector<double> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    std::vector<double> log_sums(d.rows);
    if (norm == CurveNormalization::Pooled) {
      for (std::size_t i = 0; i < d.rows; ++i) log_sums[i] = mc::log_lp_sum(d.row(i), p);
      const double log_mu = log_mean_exp(log_sums) - log_n;
      if (!std::isfinite(log_mu)) {
        out.push_back(kNaN);
        continue;
      }
      for (double& ls : log_sums) ls -= log_mu;
    } else {
      // log mu_j per column, then log sum_j |x_ij|^p / mu_j per row.
      std::vector<double> log_mu(d.cols);
      bool bad = false;
      std::vector<double> terms(d.rows);
      for (std::size_t j = 0; j < d.cols; ++j) {
        for (std::size_t i = 0; i < d.rows; ++i) terms[i] = p * std::log(std::abs(d.at(i, j)));
        log_mu[j] = log_mean_exp(terms);
        bad = bad || !std::isfinite(log_mu[j]);
      }
      if (bad) {
        out.push_back(kNaN);
        continue;
      }
      std::vector<double> row_terms(d.cols);
      for (std::size_t i = 0; i < d.rows; ++i) {
        for (std::size_t j = 0; j < d.cols; ++j)
          row_terms[j] = p * std::log(std::abs(d.at(i, j))) - log_mu[j];
        log_sums[i] = log_mean_exp(row_terms) + log_n;
      }
    }
    std::size_t hits = 0;
    for (double ls : log_sums) {
      const double ratio = std::exp((ls - log_n) / p);
      if (std::abs(ratio - 1.0) < delta) ++hits;
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(d.rows));
  }
  return out;
}

PerturbReport compare(const Dataset& original, const Dataset& perturbed,
                      std::span<const double> p_grid, double delta, CurveNormalization norm,
                      int workers) {
  if (original.cols != perturbed.cols) throw InputError("datasets differ in column count");
  PerturbReport r;
  std::vector<double> w(original.cols), ks_p(original.cols), ks_d(original.cols);
  parallel_for(original.cols, workers, [&](std::size_t j) {
    const auto a = original.column(j), b = perturbed.column(j);
    w[j] = wasserstein_1d(a, b);
    const KsResult ks = ks_two_sample(a, b);
    ks_p[j] = ks.pvalue;
    ks_d[j] = ks.statistic;
  });
  CompensatedSum total;
  for (std::size_t j = 0; j < original.cols; ++j) {
    total.add(w[j]);
    r.ks_min_pvalue = std::min(r.ks_min_pvalue, ks_p[j]);
    r.ks_statistic_max = std::max(r.ks_statistic_max, ks_d[j]);
  }
  r.wasserstein_total = total.value();
  const auto fo = concentration_curve(original, p_grid, delta, norm);
  const auto fp = concentration_curve(perturbed, p_grid, delta, norm);
  for (std::size_t k = 0; k < p_grid.size(); ++k) r.curves.push_back({p_grid[k], fo[k], fp[k]});
  return r;
}

PerturbReport perturb_report(const Dataset& d, double gap_prob, std::uint64_t seed,
                             std::span<const double> p_grid, double delta,
                             CurveNormalization norm, int workers) {
  const ImputeResult imp = zero_impute(d, gap_prob, seed);
  PerturbReport r = compare(d, imp.data, p_grid, delta, norm, workers);
  r.gap_prob = gap_prob;
  r.seed = seed;
  r.realized_fraction = imp.realized_fraction;
  return r;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman needs two equal-length samples of size >= 2");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mean = 0.5 * static_cast<double>(x.size() + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace lpconc::diag
