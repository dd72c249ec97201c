#pragma once

// Component laws for the product measure nu^n, their moments and MGFs of |x|^p.

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lpconc {

class Rng;

enum class Sign { Plus, Minus };

constexpr double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline const char* to_string(Sign s) { return s == Sign::Plus ? "+" : "-"; }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Distribution;

struct UniformSymmetric {
  double halfwidth = 1.0;
};
struct UniformUnit {};
struct DiffUniform {};
struct StandardNormal {};
/// 0 with probability `atom`, `spike` otherwise.
struct TwoPoint {
  double atom;
  double spike;
};
/// 0 with probability `atom`, +-`spike` with probability (1-atom)/2 each.
struct ThreePointSymmetric {
  double atom;
  double spike;
};
struct ZeroInflated {
  double atom;
  std::shared_ptr<const Distribution> base;
};
struct Empirical {
  std::shared_ptr<const std::vector<double>> samples;
  std::string source;  // textual origin, e.g. "path=data.csv,col=3"
};

/// Immutable description of a one-dimensional law. Construct through the
/// named factories, which enforce the parameter invariants.
class Distribution {
 public:
  using Variant = std::variant<UniformSymmetric, UniformUnit, DiffUniform, StandardNormal,
                               TwoPoint, ThreePointSymmetric, ZeroInflated, Empirical>;

  static Distribution uniform_symmetric(double halfwidth = 1.0);
  static Distribution uniform_unit();
  static Distribution diff_uniform();
  static Distribution standard_normal();
  static Distribution two_point(double atom, double spike = 1.0);
  static Distribution three_point(double atom, double spike = 1.0);
  static Distribution zero_inflated(double atom, Distribution base);
  static Distribution empirical(std::vector<double> samples, std::string source = {});

  const Variant& variant() const { return v_; }

  /// Canonical text form, parseable by parse_distribution().
  std::string to_string() const;

  double atom_at_zero() const;
  /// ess sup |x|; +inf for unbounded support.
  double ess_sup() const;
  /// Largest p0 with E[exp(t|x|^p0)] < inf for some t > 0; +inf when bounded.
  double tail_order() const;
  /// True when the law of |x| has at least one atom.
  bool abs_has_atoms() const;

 private:
  explicit Distribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct MomentReport {
  double mu_p;
  double log_mean;  // NaN when an atom at zero makes it undefined
  double log_var;
  double ess_sup;
  double atom_at_zero;
};

struct AssumptionReport {
  bool iid = true;
  bool tail_bound = false;  // E[exp(t0 |x|^p0)] < inf
  double p0 = 0.0;
  double t0 = 0.0;
  bool negative_moment = false;  // E[|x|^-y0] < inf
  double y0 = 0.0;
  bool zero_atom = false;  // P(x = 0) = a > 0
  double atom = 0.0;
  std::string note;
};

struct LogMoments {
  double mean;
  double var;
};

/// E|x|^p for p > 0.
double mu_p(const Distribution& dist, double p);

/// log E|x|^s for any real s. Returns +inf when the moment diverges
/// (negative s with mass at or near zero) and -inf when it vanishes.
double log_abs_moment(const Distribution& dist, double s);

/// E|x|^-y, y >= 0.
double neg_moment(const Distribution& dist, double y);

/// E[exp(+-t |x|^p)]; +inf when the integral diverges.
double mgf_abs_p(const Distribution& dist, double t, double p, Sign sign);

/// log E[exp(tau (|x|^p - center))] for any real tau. +inf on divergence.
double log_mgf_abs_p(const Distribution& dist, double tau, double p, double center = 0.0);

/// Var[|x|^p].
double var_abs_p(const Distribution& dist, double p);

/// E[log|x|] and Var[log|x|]; throws DomainError for an atom at zero.
LogMoments log_moments(const Distribution& dist);

/// P(|x| <= x) and P(|x| < x).
double cdf_abs(const Distribution& dist, double x);
double cdf_abs_left(const Distribution& dist, double x);

MomentReport moment_report(const Distribution& dist, double p);
AssumptionReport validate_assumptions(const Distribution& dist);

/// E|x|^p by adaptive quadrature over the density of log|x|. Only for the
/// continuous closed families; serves as an independent check of mu_p.
double abs_moment_by_quadrature(const Distribution& dist, double p);

/// Draws i.i.d. values into `out`.
void fill_samples(const Distribution& dist, Rng& rng, std::span<double> out);

/// Deterministic for fixed (seed, count).
std::vector<double> sample(const Distribution& dist, std::size_t count, std::uint64_t seed);

}  // namespace lpconc
