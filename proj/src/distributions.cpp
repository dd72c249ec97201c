#include "lpconc/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "lpconc/errors.hpp"
#include "lpconc/numerics.hpp"
#include "lpconc/random.hpp"

namespace lpconc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void require_atom(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("atom probability must lie in (0,1)");
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

// Density of L = log|x| for the continuous closed families, in log form.
struct LogAbsDensity {
  std::function<double(double)> log_density;
  double hi;       // support end (or initial guess when unbounded)
  bool bounded;
};

std::optional<LogAbsDensity> log_abs_density(const Distribution& dist) {
  return std::visit(
      overloaded{
          [](const UniformSymmetric& u) -> std::optional<LogAbsDensity> {
            const double lb = std::log(u.halfwidth);
            return LogAbsDensity{[lb](double l) { return l - lb; }, lb, true};
          },
          [](const UniformUnit&) -> std::optional<LogAbsDensity> {
            return LogAbsDensity{[](double l) { return l; }, 0.0, true};
          },
          [](const DiffUniform&) -> std::optional<LogAbsDensity> {
            // |x| has density 1 - x/2 on [0, 2]; 1 - e^l / 2 = -expm1(l - ln 2) keeps
            // full relative precision up to the support end.
            return LogAbsDensity{
                [](double l) { return l + std::log(-std::expm1(std::min(l - std::numbers::ln2, 0.0))); },
                std::numbers::ln2, true};
          },
          [](const StandardNormal&) -> std::optional<LogAbsDensity> {
            const double c = 0.5 * std::log(2.0 / std::numbers::pi);
            return LogAbsDensity{[c](double l) { return c + l - 0.5 * std::exp(2.0 * l); }, 3.0,
                                 false};
          },
          [](const auto&) -> std::optional<LogAbsDensity> { return std::nullopt; },
      },
      dist.variant());
}

double quadrature_log_expectation(const LogAbsDensity& fam, const std::function<double(double)>& g) {
  LogIntegralOptions opts;
  opts.hi = fam.hi;
  opts.lo = fam.hi - 30.0;
  opts.hi_is_support_end = fam.bounded;
  return log_integrate_exp([&](double l) { return fam.log_density(l) + g(l); }, opts);
}

const std::vector<double>& empirical_samples(const Empirical& e) { return *e.samples; }

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Distribution Distribution::uniform_symmetric(double halfwidth) {
  require_positive(halfwidth, "halfwidth");
  return Distribution(UniformSymmetric{halfwidth});
}
Distribution Distribution::uniform_unit() { return Distribution(UniformUnit{}); }
Distribution Distribution::diff_uniform() { return Distribution(DiffUniform{}); }
Distribution Distribution::standard_normal() { return Distribution(StandardNormal{}); }

Distribution Distribution::two_point(double atom, double spike) {
  require_atom(atom);
  require_positive(spike, "spike");
  return Distribution(TwoPoint{atom, spike});
}

Distribution Distribution::three_point(double atom, double spike) {
  require_atom(atom);
  require_positive(spike, "spike");
  return Distribution(ThreePointSymmetric{atom, spike});
}

Distribution Distribution::zero_inflated(double atom, Distribution base) {
  require_atom(atom);
  if (base.atom_at_zero() != 0.0)
    throw std::invalid_argument("zero-inflated base must not have an atom at zero");
  return Distribution(ZeroInflated{atom, std::make_shared<const Distribution>(std::move(base))});
}

Distribution Distribution::empirical(std::vector<double> samples, std::string source) {
  if (samples.empty()) throw InputError("empirical distribution needs at least one sample");
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!std::isfinite(samples[i]))
      throw InputError("empirical sample " + std::to_string(i) + " is not finite");
  if (source.empty()) source = "n=" + std::to_string(samples.size());
  return Distribution(
      Empirical{std::make_shared<const std::vector<double>>(std::move(samples)), std::move(source)});
}

std::string Distribution::to_string() const {
  return std::visit(
      overloaded{
          [](const UniformSymmetric& u) { return "uniform:b=" + fmt(u.halfwidth); },
          [](const UniformUnit&) { return std::string("unit"); },
          [](const DiffUniform&) { return std::string("diffuniform"); },
          [](const StandardNormal&) { return std::string("normal"); },
          [](const TwoPoint& t) { return "twopoint:a=" + fmt(t.atom) + ",r=" + fmt(t.spike); },
          [](const ThreePointSymmetric& t) {
            return "threepoint:a=" + fmt(t.atom) + ",r=" + fmt(t.spike);
          },
          [](const ZeroInflated& z) {
            return "zeroinflated:a=" + fmt(z.atom) + ",base=" + z.base->to_string();
          },
          [](const Empirical& e) { return "empirical:" + e.source; },
      },
      v_);
}

double Distribution::atom_at_zero() const {
  return std::visit(overloaded{
                        [](const TwoPoint& t) { return t.atom; },
                        [](const ThreePointSymmetric& t) { return t.atom; },
                        [](const ZeroInflated& z) { return z.atom; },
                        [](const Empirical& e) {
                          const auto& s = empirical_samples(e);
                          const auto zeros = std::count(s.begin(), s.end(), 0.0);
                          return static_cast<double>(zeros) / static_cast<double>(s.size());
                        },
                        [](const auto&) { return 0.0; },
                    },
                    v_);
}

double Distribution::ess_sup() const {
  return std::visit(overloaded{
                        [](const UniformSymmetric& u) { return u.halfwidth; },
                        [](const UniformUnit&) { return 1.0; },
                        [](const DiffUniform&) { return 2.0; },
                        [](const StandardNormal&) { return kInf; },
                        [](const TwoPoint& t) { return t.spike; },
                        [](const ThreePointSymmetric& t) { return t.spike; },
                        [](const ZeroInflated& z) { return z.base->ess_sup(); },
                        [](const Empirical& e) {
                          double m = 0.0;
                          for (double x : empirical_samples(e)) m = std::max(m, std::abs(x));
                          return m;
                        },
                    },
                    v_);
}

double Distribution::tail_order() const {
  return std::visit(overloaded{
                        [](const StandardNormal&) { return 2.0; },
                        [](const ZeroInflated& z) { return z.base->tail_order(); },
                        [](const auto&) { return kInf; },
                    },
                    v_);
}

bool Distribution::abs_has_atoms() const {
  return std::visit(overloaded{
                        [](const UniformSymmetric&) { return false; },
                        [](const UniformUnit&) { return false; },
                        [](const DiffUniform&) { return false; },
                        [](const StandardNormal&) { return false; },
                        [](const auto&) { return true; },
                    },
                    v_);
}

// ---------------------------------------------------------------------------
// Moments

double mu_p(const Distribution& dist, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("mu_p requires p > 0");
  return std::visit(
      overloaded{
          [p](const UniformSymmetric& u) { return std::pow(u.halfwidth, p) / (1.0 + p); },
          [p](const UniformUnit&) { return 1.0 / (1.0 + p); },
          [p](const DiffUniform&) { return std::pow(2.0, 1.0 + p) / (2.0 + 3.0 * p + p * p); },
          [p](const StandardNormal&) {
            return std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0))) /
                   std::sqrt(std::numbers::pi);
          },
          [p](const TwoPoint& t) { return std::pow(t.spike, p) * (1.0 - t.atom); },
          [p](const ThreePointSymmetric& t) { return std::pow(t.spike, p) * (1.0 - t.atom); },
          [p](const ZeroInflated& z) { return (1.0 - z.atom) * mu_p(*z.base, p); },
          [p](const Empirical& e) {
            const auto& s = empirical_samples(e);
            CompensatedSum acc;
            for (double x : s) acc.add(std::pow(std::abs(x), p));
            const double m = acc.value() / static_cast<double>(s.size());
            if (!std::isfinite(m)) throw InputError("empirical mu_p is not finite");
            return m;
          },
      },
      dist.variant());
}

double log_abs_moment(const Distribution& dist, double s) {
  if (s == 0.0) return 0.0;
  return std::visit(
      overloaded{
          [s](const UniformSymmetric& u) {
            return s > -1.0 ? s * std::log(u.halfwidth) - std::log1p(s) : kInf;
          },
          [s](const UniformUnit&) { return s > -1.0 ? -std::log1p(s) : kInf; },
          [s](const DiffUniform&) {
            return s > -1.0 ? (1.0 + s) * std::numbers::ln2 - std::log1p(s) - std::log(2.0 + s)
                            : kInf;
          },
          [s](const StandardNormal&) {
            return s > -1.0 ? 0.5 * s * std::numbers::ln2 + std::lgamma(0.5 * (s + 1.0)) -
                                  0.5 * std::log(std::numbers::pi)
                            : kInf;
          },
          [s](const TwoPoint& t) {
            return s > 0.0 ? s * std::log(t.spike) + std::log1p(-t.atom) : kInf;
          },
          [s](const ThreePointSymmetric& t) {
            return s > 0.0 ? s * std::log(t.spike) + std::log1p(-t.atom) : kInf;
          },
          [s](const ZeroInflated& z) {
            return s > 0.0 ? std::log1p(-z.atom) + log_abs_moment(*z.base, s) : kInf;
          },
          [s](const Empirical& e) {
            const auto& xs = empirical_samples(e);
            std::vector<double> terms;
            terms.reserve(xs.size());
            for (double x : xs) {
              if (x == 0.0) {
                if (s < 0.0) return kInf;
                terms.push_back(-kInf);
              } else {
                terms.push_back(s * std::log(std::abs(x)));
              }
            }
            return log_mean_exp(terms);
          },
      },
      dist.variant());
}

double neg_moment(const Distribution& dist, double y) {
  if (!(y >= 0.0)) throw std::invalid_argument("neg_moment requires y >= 0");
  return std::exp(log_abs_moment(dist, -y));
}

double log_mgf_abs_p(const Distribution& dist, double tau, double p, double center) {
  if (!(p > 0.0)) throw std::invalid_argument("mgf requires p > 0");
  if (tau == 0.0) return 0.0;
  return std::visit(
      overloaded{
          [&](const TwoPoint& t) {
            return log_add_exp(std::log(t.atom) - tau * center,
                               std::log1p(-t.atom) + tau * (std::pow(t.spike, p) - center));
          },
          [&](const ThreePointSymmetric& t) {
            return log_add_exp(std::log(t.atom) - tau * center,
                               std::log1p(-t.atom) + tau * (std::pow(t.spike, p) - center));
          },
          [&](const ZeroInflated& z) {
            return log_add_exp(std::log(z.atom) - tau * center,
                               std::log1p(-z.atom) + log_mgf_abs_p(*z.base, tau, p, center));
          },
          [&](const Empirical& e) {
            const auto& xs = empirical_samples(e);
            std::vector<double> terms;
            terms.reserve(xs.size());
            for (double x : xs) terms.push_back(tau * (std::pow(std::abs(x), p) - center));
            return log_mean_exp(terms);
          },
          [&](const auto&) {
            const auto fam = log_abs_density(dist);
            // |x|^p - center = (|x|^p - ref) + (ref - center); the constant part stays
            // outside the integrand so large tau adds no rounding noise to it.
            // ref = 1 with expm1 keeps small-p cancellation exact; for p >= 1 the
            // mass sits where |x|^p is small and ref = 0 is exact there.
            if (p < 1.0)
              return tau * (1.0 - center) +
                     quadrature_log_expectation(
                         *fam, [=](double l) { return tau * std::expm1(p * l); });
            const double log_abs_tau = std::log(std::abs(tau));
            const double sgn = tau > 0.0 ? 1.0 : -1.0;
            return -tau * center +
                   quadrature_log_expectation(
                       *fam, [=](double l) { return sgn * std::exp(log_abs_tau + p * l); });
          },
      },
      dist.variant());
}

double mgf_abs_p(const Distribution& dist, double t, double p, Sign sign) {
  return std::exp(log_mgf_abs_p(dist, sign_value(sign) * t, p, 0.0));
}

double var_abs_p(const Distribution& dist, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("var_abs_p requires p > 0");
  return std::visit(
      overloaded{
          [p](const UniformSymmetric& u) {
            return std::pow(u.halfwidth, 2.0 * p) * p * p / ((1.0 + 2.0 * p) * (1.0 + p) * (1.0 + p));
          },
          [p](const UniformUnit&) { return p * p / ((1.0 + 2.0 * p) * (1.0 + p) * (1.0 + p)); },
          [p](const StandardNormal& n) {
            const double m = mu_p(Distribution::standard_normal(), p);
            (void)n;
            const double excess = std::expm1(0.5 * std::log(std::numbers::pi) +
                                             std::lgamma(p + 0.5) - 2.0 * std::lgamma(0.5 * (p + 1.0)));
            return m * m * excess;
          },
          [p](const TwoPoint& t) {
            return std::pow(t.spike, 2.0 * p) * t.atom * (1.0 - t.atom);
          },
          [p](const ThreePointSymmetric& t) {
            return std::pow(t.spike, 2.0 * p) * t.atom * (1.0 - t.atom);
          },
          [p, &dist](const Empirical& e) {
            const auto& xs = empirical_samples(e);
            const double m = mu_p(dist, p);
            CompensatedSum acc;
            for (double x : xs) {
              const double d = std::pow(std::abs(x), p) - m;
              acc.add(d * d);
            }
            return acc.value() / static_cast<double>(xs.size());
          },
          [p, &dist](const auto&) {
            const double m = mu_p(dist, p);
            return std::exp(log_abs_moment(dist, 2.0 * p)) - m * m;
          },
      },
      dist.variant());
}

LogMoments log_moments(const Distribution& dist) {
  if (dist.atom_at_zero() > 0.0)
    throw DomainError("log-moments are undefined for a law with an atom at zero");
  return std::visit(
      overloaded{
          [](const UniformSymmetric& u) { return LogMoments{std::log(u.halfwidth) - 1.0, 1.0}; },
          [](const UniformUnit&) { return LogMoments{-1.0, 1.0}; },
          [](const DiffUniform&) { return LogMoments{std::numbers::ln2 - 1.5, 1.25}; },
          [](const StandardNormal&) {
            return LogMoments{-0.5 * (std::numbers::egamma + std::numbers::ln2),
                              std::numbers::pi * std::numbers::pi / 8.0};
          },
          [](const Empirical& e) {
            const auto& xs = empirical_samples(e);
            CompensatedSum s;
            for (double x : xs) s.add(std::log(std::abs(x)));
            const double mean = s.value() / static_cast<double>(xs.size());
            CompensatedSum v;
            for (double x : xs) {
              const double d = std::log(std::abs(x)) - mean;
              v.add(d * d);
            }
            return LogMoments{mean, v.value() / static_cast<double>(xs.size())};
          },
          [](const auto&) -> LogMoments { throw DomainError("log-moments undefined"); },
      },
      dist.variant());
}

double cdf_abs(const Distribution& dist, double x) {
  return std::visit(
      overloaded{
          [x](const UniformSymmetric& u) { return std::clamp(x / u.halfwidth, 0.0, 1.0); },
          [x](const UniformUnit&) { return std::clamp(x, 0.0, 1.0); },
          [x](const DiffUniform&) { return x <= 0.0 ? 0.0 : x >= 2.0 ? 1.0 : x - 0.25 * x * x; },
          [x](const StandardNormal&) { return x <= 0.0 ? 0.0 : std::erf(x / std::numbers::sqrt2); },
          [x](const TwoPoint& t) { return x < 0.0 ? 0.0 : x < t.spike ? t.atom : 1.0; },
          [x](const ThreePointSymmetric& t) { return x < 0.0 ? 0.0 : x < t.spike ? t.atom : 1.0; },
          [x](const ZeroInflated& z) {
            return x < 0.0 ? 0.0 : z.atom + (1.0 - z.atom) * cdf_abs(*z.base, x);
          },
          [x](const Empirical& e) {
            const auto& xs = empirical_samples(e);
            const auto c = std::count_if(xs.begin(), xs.end(), [x](double v) { return std::abs(v) <= x; });
            return static_cast<double>(c) / static_cast<double>(xs.size());
          },
      },
      dist.variant());
}

double cdf_abs_left(const Distribution& dist, double x) {
  return std::visit(
      overloaded{
          [x](const TwoPoint& t) { return x <= 0.0 ? 0.0 : x <= t.spike ? t.atom : 1.0; },
          [x](const ThreePointSymmetric& t) { return x <= 0.0 ? 0.0 : x <= t.spike ? t.atom : 1.0; },
          [x](const ZeroInflated& z) {
            return x <= 0.0 ? 0.0 : z.atom + (1.0 - z.atom) * cdf_abs_left(*z.base, x);
          },
          [x](const Empirical& e) {
            const auto& xs = empirical_samples(e);
            const auto c = std::count_if(xs.begin(), xs.end(), [x](double v) { return std::abs(v) < x; });
            return static_cast<double>(c) / static_cast<double>(xs.size());
          },
          [x, &dist](const auto&) { return cdf_abs(dist, x); },
      },
      dist.variant());
}

MomentReport moment_report(const Distribution& dist, double p) {
  MomentReport r{};
  r.mu_p = mu_p(dist, p);
  r.atom_at_zero = dist.atom_at_zero();
  r.ess_sup = dist.ess_sup();
  if (r.atom_at_zero > 0.0) {
    r.log_mean = std::numeric_limits<double>::quiet_NaN();
    r.log_var = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto lm = log_moments(dist);
    r.log_mean = lm.mean;
    r.log_var = lm.var;
  }
  return r;
}

AssumptionReport validate_assumptions(const Distribution& dist) {
  AssumptionReport r;
  r.atom = dist.atom_at_zero();
  r.zero_atom = r.atom > 0.0;
  const double p0 = dist.tail_order();
  r.p0 = p0;
  r.tail_bound = true;
  // For p0 = 2 (normal), E[exp(t|x|^2)] < inf iff t < 1/2.
  r.t0 = std::isinf(p0) ? 1.0 : 0.25;
  const bool empirical = std::holds_alternative<Empirical>(dist.variant());
  if (!r.zero_atom) {
    r.negative_moment = true;
    // Continuous closed families have E|x|^-y < inf exactly for y < 1; a
    // finite sample without zeros has every negative moment.
    r.y0 = empirical ? 1.0 : 0.5;
  }
  if (empirical) r.note = "bounded-support: holds; tail witnesses are not estimated from samples";
  return r;
}

double abs_moment_by_quadrature(const Distribution& dist, double p) {
  const auto fam = log_abs_density(dist);
  if (!fam) throw DomainError("quadrature moments are only defined for continuous closed families");
  return std::exp(quadrature_log_expectation(*fam, [p](double l) { return p * l; }));
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

double draw_one(const Distribution& dist, Rng& rng);

struct Filler {
  Rng& rng;
  std::span<double> out;

  void operator()(const UniformSymmetric& u) const {
    for (double& x : out) x = u.halfwidth * (2.0 * rng.uniform() - 1.0);
  }
  void operator()(const UniformUnit&) const {
    for (double& x : out) x = rng.uniform();
  }
  void operator()(const DiffUniform&) const {
    for (double& x : out) {
      const double y = rng.uniform();
      x = 2.0 * (y - rng.uniform());
    }
  }
  void operator()(const StandardNormal&) const {
    for (double& x : out) x = rng.normal();
  }
  void operator()(const TwoPoint& t) const {
    for (double& x : out) x = rng.uniform() < t.atom ? 0.0 : t.spike;
  }
  void operator()(const ThreePointSymmetric& t) const {
    const double half = t.atom + 0.5 * (1.0 - t.atom);
    for (double& x : out) {
      const double u = rng.uniform();
      x = u < t.atom ? 0.0 : (u < half ? t.spike : -t.spike);
    }
  }
  void operator()(const ZeroInflated& z) const {
    for (double& x : out) x = rng.uniform() < z.atom ? 0.0 : draw_one(*z.base, rng);
  }
  void operator()(const Empirical& e) const {
    const auto& xs = empirical_samples(e);
    for (double& x : out) x = xs[rng.below(xs.size())];
  }
};

double draw_one(const Distribution& dist, Rng& rng) {
  double x = 0.0;
  std::visit(Filler{rng, std::span<double>(&x, 1)}, dist.variant());
  return x;
}

}  // namespace

void fill_samples(const Distribution& dist, Rng& rng, std::span<double> out) {
  std::visit(Filler{rng, out}, dist.variant());
}

std::vector<double> sample(const Distribution& dist, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  std::vector<double> out(count);
  Rng rng(mix_seed(seed, 0));
  fill_samples(dist, rng, out);
  return out;
}

}  // namespace lpconc
