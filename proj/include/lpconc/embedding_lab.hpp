#pragma once

// Synthetic embedding families and retrieval scoring kernels.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lpconc::embed {

enum class Kind { Dense, Sparse, Relu, Binary };

const char* to_string(Kind k);
Kind parse_kind(const std::string& text);
std::size_t dimension(Kind k);

/// Row-major M x dim matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
};

/// Dense: N(0, 0.0225) coordinates, then unit l2 norm (dim 384).
/// Sparse: zero w.p. 0.998, else Exp(rate 1.5) (dim 5000).
/// Relu: max(0, N(0, 0.09)) (dim 384).
/// Binary: Bernoulli(0.1) (dim 500).
Matrix generate(Kind kind, std::size_t M, std::uint64_t seed, int workers = 0);

struct TableCell {
  Kind kind;
  double p;
  double value;
};

/// Fraction of rows with |(||x||_p^p / (dim mu_p))^(1/p) - 1| <= delta, mu_p
/// the pooled batch mean of |entry|^p.
std::vector<TableCell> concentration_table(std::span<const Kind> kinds,
                                           std::span<const double> p_grid, double delta,
                                           std::size_t M, std::uint64_t seed, int workers = 0);

/// Median relative contrast | ||x2||_p / ||x1||_p - 1 | over random row pairs
/// of the batch; pairs with ||x1|| = 0 are skipped.
std::vector<TableCell> contrast_table(std::span<const Kind> kinds, std::span<const double> p_grid,
                                      std::size_t pairs, std::size_t M, std::uint64_t seed,
                                      int workers = 0);

struct ScorePair {
  double dense_score = 0.0;
  bool dense_degenerate = false;  // a zero vector made the cosine undefined
  double sparse_score = 0.0;
  double hybrid_score = 0.0;
  double rrf_score = 0.0;
};

/// Cosine of q and d; 0 with degenerate = true when either is zero.
double cosine(std::span<const double> q, std::span<const double> d, bool* degenerate = nullptr);

/// sum_j w_q(j) w_d(j) for nonnegative weights.
double sparse_dot(std::span<const double> wq, std::span<const double> wd);

/// alpha s_dense + (1 - alpha) s_sparse on already-normalized scores.
double hybrid(double dense_normalized, double sparse_normalized, double alpha);

/// sum_i 1 / (k + rank_i), ranks 1-based.
double rrf(std::span<const int> ranks, double k = 60.0);

/// (x - min) / (max - min), all zeros when max == min.
std::vector<double> min_max_normalize(std::span<const double> scores);

/// Scores for one query/document pair. The hybrid combines the supplied
/// normalized scores; rrf uses the supplied 1-based ranks.
ScorePair scores(std::span<const double> query, std::span<const double> doc, double alpha,
                 double dense_normalized, double sparse_normalized, std::span<const int> ranks);

struct HadamardLp {
  double lp_p;
  std::int64_t support_overlap;
};

/// sum_j (wq_j wd_j)^p and the number of strictly positive products.
HadamardLp hadamard_lp(std::span<const double> wq, std::span<const double> wd, double p);

}  // namespace lpconc::embed
