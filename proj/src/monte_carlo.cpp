#include "lpconc/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lpconc/errors.hpp"
#include "lpconc/numerics.hpp"
#include "lpconc/parallel.hpp"
#include "lpconc/random.hpp"

namespace lpconc::mc {

namespace {

constexpr std::int64_t kChunk = 256;
constexpr double kZ95 = 1.959963984540054;

void check_common(std::int64_t n, double p, std::int64_t M) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (M < 1) throw std::invalid_argument("sample count must be positive");
}

constexpr double kEdgeSlack = 1e-9;

double log_lower_edge(double delta) {
  return delta >= 1.0 ? -kInf : std::log1p(-delta);
}

// log(||x||_p / (n mu)^(1/p)) from a log sum.
double log_ratio(double log_sum, double log_nmu, double p) { return (log_sum - log_nmu) / p; }

double resolve_mu(const Distribution& dist, Normalization norm, std::span<const double> log_sums,
                  std::int64_t n, double p) {
  const double mu = norm == Normalization::EmpiricalMu ? pooled_mu(log_sums, n) : mu_p(dist, p);
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DomainError("normalization mu_p is zero or not finite at this p");
  return mu;
}

}  // namespace

const char* to_string(Normalization n) {
  return n == Normalization::AnalyticMu ? "analytic-mu" : "empirical-mu";
}

Normalization parse_normalization(const std::string& text) {
  if (text == "analytic-mu" || text == "analytic") return Normalization::AnalyticMu;
  if (text == "empirical-mu" || text == "empirical") return Normalization::EmpiricalMu;
  throw InputError("unknown normalization '" + text + "' (expected analytic-mu or empirical-mu)");
}

Normalization default_normalization(const Distribution& dist) {
  return std::holds_alternative<Empirical>(dist.variant()) ? Normalization::EmpiricalMu
                                                           : Normalization::AnalyticMu;
}

double log_lp_sum(std::span<const double> x, double p) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return -kInf;
  if (std::isinf(m)) return kInf;
  double s = 0.0;
  for (double v : x) {
    const double a = std::abs(v);
    if (a > 0.0) s += std::pow(a / m, p);
  }
  return p * std::log(m) + std::log(s);
}

double lp_norm(std::span<const double> x, double p) { return std::exp(log_lp_sum(x, p) / p); }

Wilson wilson_interval(std::int64_t hits, std::int64_t total) {
  if (total < 1) throw std::invalid_argument("total must be positive");
  const double m = static_cast<double>(total);
  const double f = static_cast<double>(hits) / m;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / m;
  const double center = (f + z2 / (2.0 * m)) / denom;
  const double half = kZ95 / denom * std::sqrt(f * (1.0 - f) / m + z2 / (4.0 * m * m));
  return {center, half};
}

std::vector<std::vector<double>> sample_log_sums(const Distribution& dist, std::int64_t n,
                                                 std::span<const double> p_grid, std::int64_t M,
                                                 std::uint64_t seed, std::uint64_t stream,
                                                 const RunOptions& opts) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (M < 1) throw std::invalid_argument("sample count must be positive");
  for (double p : p_grid)
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  std::vector<std::vector<double>> out(p_grid.size(), std::vector<double>(M));
  const std::size_t chunks = static_cast<std::size_t>((M + kChunk - 1) / kChunk);
  parallel_for(chunks, opts.workers, [&](std::size_t c) {
    Rng rng = Rng::for_chunk(seed, stream, c);
    std::vector<double> x(static_cast<std::size_t>(n));
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(M, begin + kChunk);
    for (std::int64_t i = begin; i < end; ++i) {
      fill_samples(dist, rng, x);
      for (std::size_t j = 0; j < p_grid.size(); ++j) out[j][i] = log_lp_sum(x, p_grid[j]);
    }
  });
  return out;
}

double pooled_mu(std::span<const double> log_sums, std::int64_t n) {
  if (log_sums.empty()) return 0.0;
  return std::exp(log_mean_exp(log_sums) - std::log(static_cast<double>(n)));
}

Frequency band_frequency(std::span<const double> log_sums, std::int64_t n, double p, double delta,
                         double mu) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (log_sums.empty()) throw std::invalid_argument("no samples");
  const double log_nmu = std::log(static_cast<double>(n)) + std::log(mu);
  // Edges compare on log S with a 1e-9 allowance so sums landing on an edge count.
  const double lo = p * log_lower_edge(delta) - kEdgeSlack;
  const double hi = p * std::log1p(delta) + kEdgeSlack;
  std::int64_t hits = 0;
  for (double ls : log_sums) {
    const double d = ls - log_nmu;
    if (d >= lo && d <= hi) ++hits;
  }
  Frequency f;
  f.hits = hits;
  f.samples = static_cast<std::int64_t>(log_sums.size());
  f.freq = static_cast<double>(hits) / static_cast<double>(f.samples);
  f.ci_halfwidth = wilson_interval(hits, f.samples).halfwidth;
  f.standard_error = f.ci_halfwidth / kZ95;
  f.mu_p = mu;
  return f;
}

Frequency concentration_frequency(const Distribution& dist, std::int64_t n, double p, double delta,
                                  std::int64_t M, std::uint64_t seed, Normalization norm,
                                  const RunOptions& opts) {
  check_common(n, p, M);
  const double ps[] = {p};
  const auto sums = sample_log_sums(dist, n, ps, M, seed, static_cast<std::uint64_t>(n), opts);
  return band_frequency(sums[0], n, p, delta, resolve_mu(dist, norm, sums[0], n, p));
}

Frequency concentration_frequency(const Distribution& dist, std::int64_t n, double p, double delta,
                                  std::int64_t M, std::uint64_t seed, const RunOptions& opts) {
  return concentration_frequency(dist, n, p, delta, M, seed, default_normalization(dist), opts);
}

ConcentrationGrid curve_sweep(const Distribution& dist, std::span<const double> p_grid,
                              std::span<const std::int64_t> n_grid, double delta, std::int64_t M,
                              std::uint64_t seed, Normalization norm, const RunOptions& opts) {
  if (p_grid.empty() || n_grid.empty()) throw std::invalid_argument("grids must be nonempty");
  ConcentrationGrid g;
  g.p_grid.assign(p_grid.begin(), p_grid.end());
  g.n_grid.assign(n_grid.begin(), n_grid.end());
  g.sample_count = M;
  g.seed = seed;
  g.delta = delta;
  g.normalization = norm;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  g.freq.assign(p_grid.size(), std::vector<double>(n_grid.size(), nan));
  g.ci_halfwidth = g.freq;
  for (std::size_t j = 0; j < n_grid.size(); ++j) {
    const std::int64_t n = n_grid[j];
    const auto sums =
        sample_log_sums(dist, n, p_grid, M, seed, static_cast<std::uint64_t>(n), opts);
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
      try {
        const double mu = resolve_mu(dist, norm, sums[i], n, p_grid[i]);
        const Frequency f = band_frequency(sums[i], n, p_grid[i], delta, mu);
        g.freq[i][j] = f.freq;
        g.ci_halfwidth[i][j] = f.ci_halfwidth;
      } catch (const std::exception& e) {
        g.failures.push_back("p=" + std::to_string(p_grid[i]) + " n=" + std::to_string(n) + ": " +
                             e.what());
      }
    }
  }
  return g;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

ContrastSummary contrast_from_log_sums(std::span<const double> log_sums, std::int64_t n, double p,
                                       double delta, double mu) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (log_sums.size() < 2) throw std::invalid_argument("need at least one pair");
  const std::size_t pairs = log_sums.size() / 2;
  const double log_nmu = std::log(static_cast<double>(n)) + std::log(mu);
  ContrastSummary s;
  s.p = p;
  s.n = n;
  s.delta = delta;
  s.mu_p = mu;
  s.pairs = static_cast<std::int64_t>(pairs);
  std::int64_t below = 0, half_hits = 0;
  std::vector<double> rc;
  rc.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double l1 = log_sums[2 * i] / p, l2 = log_sums[2 * i + 1] / p;
    const double r1 = std::exp(log_ratio(log_sums[2 * i], log_nmu, p));
    const double r2 = std::exp(log_ratio(log_sums[2 * i + 1], log_nmu, p));
    if (std::abs(r1 - r2) < delta) ++below;
    if (std::abs(r1 - 1.0) < 0.5 * delta) ++half_hits;
    if (std::abs(r2 - 1.0) < 0.5 * delta) ++half_hits;
    if (l1 == -kInf) {
      ++s.skipped;
      continue;
    }
    // | ||x2|| / ||x1|| - 1 | in log space.
    rc.push_back(l2 == -kInf ? 1.0 : std::abs(std::expm1(l2 - l1)));
  }
  s.freq_below_delta = static_cast<double>(below) / static_cast<double>(pairs);
  s.half_band_freq = static_cast<double>(half_hits) / static_cast<double>(2 * pairs);
  s.skip_rate = static_cast<double>(s.skipped) / static_cast<double>(pairs);
  s.median_rc = median(std::move(rc));
  return s;
}

ContrastSummary relative_contrast(const Distribution& dist, std::int64_t n, double p,
                                  std::int64_t M, std::uint64_t seed, double delta,
                                  Normalization norm, const RunOptions& opts) {
  check_common(n, p, M);
  const double ps[] = {p};
  const std::uint64_t stream = mix_seed(0x636f6e7472617374ULL, static_cast<std::uint64_t>(n));
  const auto sums = sample_log_sums(dist, n, ps, 2 * M, seed, stream, opts);
  return contrast_from_log_sums(sums[0], n, p, delta, resolve_mu(dist, norm, sums[0], n, p));
}

ContrastSummary relative_contrast(const Distribution& dist, std::int64_t n, double p,
                                  std::int64_t M, std::uint64_t seed, double delta,
                                  const RunOptions& opts) {
  return relative_contrast(dist, n, p, M, seed, delta, default_normalization(dist), opts);
}

}  // namespace lpconc::mc
