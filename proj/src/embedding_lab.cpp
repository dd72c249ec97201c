#include "lpconc/embedding_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpconc/errors.hpp"
#include "lpconc/monte_carlo.hpp"
#include "lpconc/parallel.hpp"
#include "lpconc/random.hpp"

namespace lpconc::embed {

namespace {

constexpr double kDenseSd = 0.15;  // variance 0.0225
constexpr double kReluSd = 0.3;    // variance 0.09
constexpr double kSparseZero = 0.998;
constexpr double kSparseRate = 1.5;
constexpr double kBinaryOne = 0.1;
constexpr std::uint64_t kPairStream = 0x7061697273ULL;

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimensions differ");
}

void fill_row(Kind kind, Rng& rng, std::span<double> row) {
  switch (kind) {
    case Kind::Dense: {
      double ss = 0.0;
      for (double& v : row) {
        v = kDenseSd * rng.normal();
        ss += v * v;
      }
      const double inv = 1.0 / std::sqrt(ss);
      for (double& v : row) v *= inv;
      break;
    }
    case Kind::Sparse:
      for (double& v : row) v = rng.uniform() < kSparseZero ? 0.0 : rng.exponential(kSparseRate);
      break;
    case Kind::Relu:
      for (double& v : row) v = std::max(0.0, kReluSd * rng.normal());
      break;
    case Kind::Binary:
      for (double& v : row) v = rng.bernoulli(kBinaryOne) ? 1.0 : 0.0;
      break;
  }
}

std::vector<double> row_log_sums(const Matrix& m, double p) {
  std::vector<double> out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) out[i] = mc::log_lp_sum(m.row(i), p);
  return out;
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Dense:
      return "dense";
    case Kind::Sparse:
      return "sparse";
    case Kind::Relu:
      return "relu";
    case Kind::Binary:
      return "binary";
  }
  return "?";
}

Kind parse_kind(const std::string& text) {
  if (text == "dense") return Kind::Dense;
  if (text == "sparse") return Kind::Sparse;
  if (text == "relu") return Kind::Relu;
  if (text == "binary") return Kind::Binary;
  throw InputError("unknown embedding kind '" + text + "' (expected dense, sparse, relu, binary)");
}

std::size_t dimension(Kind k) {
  switch (k) {
    case Kind::Dense:
    case Kind::Relu:
      return 384;
    case Kind::Sparse:
      return 5000;
    case Kind::Binary:
      return 500;
  }
  return 0;
}

Matrix generate(Kind kind, std::size_t M, std::uint64_t seed, int workers) {
  if (M < 1) throw std::invalid_argument("M must be positive");
  Matrix m;
  m.rows = M;
  m.cols = dimension(kind);
  m.values.assign(m.rows * m.cols, 0.0);
  const auto stream = static_cast<std::uint64_t>(kind) + 1;
  parallel_for(M, workers, [&](std::size_t i) {
    Rng rng = Rng::for_chunk(seed, stream, i);
    fill_row(kind, rng, m.row(i));
  });
  return m;
}

std::vector<TableCell> concentration_table(std::span<const Kind> kinds,
                                           std::span<const double> p_grid, double delta,
                                           std::size_t M, std::uint64_t seed, int workers) {
  std::vector<TableCell> out;
  for (Kind kind : kinds) {
    const Matrix m = generate(kind, M, seed, workers);
    const auto n = static_cast<std::int64_t>(m.cols);
    for (double p : p_grid) {
      const auto sums = row_log_sums(m, p);
      const double mu = mc::pooled_mu(sums, n);
      out.push_back({kind, p, mc::band_frequency(sums, n, p, delta, mu).freq});
    }
  }
  return out;
}

std::vector<TableCell> contrast_table(std::span<const Kind> kinds, std::span<const double> p_grid,
                                      std::size_t pairs, std::size_t M, std::uint64_t seed,
                                      int workers) {
  if (M < 2) throw std::invalid_argument("need at least two rows for pairs");
  std::vector<TableCell> out;
  for (Kind kind : kinds) {
    const Matrix m = generate(kind, M, seed, workers);
    // Distinct row pairs, shared across p.
    Rng rng = Rng::for_chunk(seed, kPairStream, static_cast<std::uint64_t>(kind));
    std::vector<std::pair<std::size_t, std::size_t>> idx(pairs);
    for (auto& [i, j] : idx) {
      i = rng.below(M);
      do j = rng.below(M);
      while (j == i);
    }
    for (double p : p_grid) {
      const auto sums = row_log_sums(m, p);
      std::vector<double> rc;
      rc.reserve(pairs);
      for (auto [i, j] : idx) {
        const double l1 = sums[i] / p, l2 = sums[j] / p;
        if (std::isinf(l1)) continue;
        rc.push_back(std::isinf(l2) ? 1.0 : std::abs(std::expm1(l2 - l1)));
      }
      out.push_back({kind, p, mc::median(std::move(rc))});
    }
  }
  return out;
}

double cosine(std::span<const double> q, std::span<const double> d, bool* degenerate) {
  require_same_size(q, d);
  double qd = 0.0, qq = 0.0, dd = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    qd += q[i] * d[i];
    qq += q[i] * q[i];
    dd += d[i] * d[i];
  }
  const bool zero = qq == 0.0 || dd == 0.0;
  if (degenerate) *degenerate = zero;
  if (zero) return 0.0;
  return std::clamp(qd / (std::sqrt(qq) * std::sqrt(dd)), -1.0, 1.0);
}

double sparse_dot(std::span<const double> wq, std::span<const double> wd) {
  require_same_size(wq, wd);
  double s = 0.0;
  for (std::size_t i = 0; i < wq.size(); ++i) {
    if (wq[i] < 0.0 || wd[i] < 0.0) throw std::invalid_argument("sparse weights must be >= 0");
    s += wq[i] * wd[i];
  }
  return s;
}

double hybrid(double dense_normalized, double sparse_normalized, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  return alpha * dense_normalized + (1.0 - alpha) * sparse_normalized;
}

double rrf(std::span<const int> ranks, double k) {
  double s = 0.0;
  for (int r : ranks) {
    if (r < 1) throw std::invalid_argument("ranks are 1-based");
    s += 1.0 / (k + r);
  }
  return s;
}

std::vector<double> min_max_normalize(std::span<const double> scores) {
  std::vector<double> out(scores.size(), 0.0);
  if (scores.empty()) return out;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double range = *hi - *lo;
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - *lo) / range;
  return out;
}

ScorePair scores(std::span<const double> query, std::span<const double> doc, double alpha,
                 double dense_normalized, double sparse_normalized, std::span<const int> ranks) {
  ScorePair s;
  s.dense_score = cosine(query, doc, &s.dense_degenerate);
  s.sparse_score = sparse_dot(query, doc);
  s.hybrid_score = hybrid(dense_normalized, sparse_normalized, alpha);
  s.rrf_score = rrf(ranks);
  return s;
}

HadamardLp hadamard_lp(std::span<const double> wq, std::span<const double> wd, double p) {
  require_same_size(wq, wd);
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  HadamardLp h{0.0, 0};
  for (std::size_t i = 0; i < wq.size(); ++i) {
    if (wq[i] < 0.0 || wd[i] < 0.0) throw std::invalid_argument("weights must be >= 0");
    const double z = wq[i] * wd[i];
    if (z > 0.0) {
      h.lp_p += p == 1.0 ? z : std::pow(z, p);
      ++h.support_overlap;
    }
  }
  return h;
}

}  // namespace lpconc::embed
