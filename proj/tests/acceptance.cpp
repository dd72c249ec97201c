// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lpconc/anti_concentration.hpp"
#include "lpconc/closed_forms.hpp"
#include "lpconc/diagnostics.hpp"
#include "lpconc/embedding_lab.hpp"
#include "lpconc/monte_carlo.hpp"
#include "lpconc/random.hpp"
#include "lpconc/rate_engine.hpp"

using namespace lpconc;

namespace {

constexpr double kZ95 = 1.959963984540054;

// Failure messages for the criterion in progress.
struct Check {
  std::vector<std::string> failures;
  std::string notes;

  bool require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
    return ok;
  }
  void note(const std::string& s) { notes += (notes.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Outputs of every stochastic criterion at workers = 1, replayed under other worker counts.
struct Replay {
  std::string name;
  std::function<std::vector<double>(int workers)> run;
  std::vector<double> reference;
};
std::vector<Replay> replays;

void record(const std::string& name, std::function<std::vector<double>(int)> run) {
  Replay r{name, std::move(run), {}};
  r.reference = r.run(1);
  replays.push_back(std::move(r));
}

const std::vector<double>& last_reference() { return replays.back().reference; }

int failed = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(secs < limit_s, "runtime " + fmt(secs) + " s exceeds " + fmt(limit_s) + " s");
  const bool ok = c.failures.empty();
  if (!ok) ++failed;
  std::printf("%s [%2d] %s (%.2f s)", ok ? "PASS" : "FAIL", id, title, secs);
  if (!c.notes.empty()) std::printf(" | %s", c.notes.c_str());
  for (const auto& f : c.failures) std::printf("\n       - %s", f.c_str());
  std::printf("\n");
  std::fflush(stdout);
}

double binom_half(int n, int k) {
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return static_cast<double>(c / std::pow(2.0L, n));
}

diag::Dataset cube(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::vector<double> v(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    Rng rng = Rng::for_chunk(seed, 0x73796e7468ULL, i);
    for (std::size_t j = 0; j < cols; ++j) v[i * cols + j] = rng.uniform();
  }
  return diag::make_dataset(rows, cols, std::move(v));
}

}  // namespace

int main() {
  criterion(1, "closed-form cube rate and upper bounds", 1.0, [](Check& c) {
    const double base = 1.2 * (1.0 - std::log(1.2));
    c.require(base >= 0.9810 && base <= 0.9815, "(1.2)(1 - log 1.2) = " + fmt(base));
    const double f = closed_form::uniform_f(0.2, Sign::Plus);
    c.require(std::abs(f + std::log(base)) < 1e-15, "uniform_f(0.2,+) = " + fmt(f));
    const double b200 = closed_form::cube_upper_bound(0.2, 200);
    const double b1000 = closed_form::cube_upper_bound(0.2, 1000);
    c.require(b200 >= 0.0220 && b200 <= 0.0230, "bound(200) = " + fmt(b200));
    c.require(b1000 >= 5.2e-9 && b1000 <= 6.4e-9, "bound(1000) = " + fmt(b1000));
    c.note("f+=" + fmt(f) + " bound200=" + fmt(b200) + " bound1000=" + fmt(b1000));
  });

  criterion(2, "phi closed forms", 5.0, [](Check& c) {
    for (double p : {0.1, 1.0, 2.0}) {
      c.require(rate::phi(Distribution::uniform_symmetric(1.0), p) == 0.5 + p,
                "uniform phi at p=" + fmt(p));
      const double d = rate::phi(Distribution::diff_uniform(), p);
      c.require(std::abs(d - (2.0 + 4.0 * p) / (5.0 + p)) <= 1e-15 * d,
                "diff-uniform phi at p=" + fmt(p));
    }
    const double limit = 4.0 / (std::numbers::pi * std::numbers::pi);
    const double n0 = rate::phi(Distribution::standard_normal(), 1e-6);
    c.require(std::abs(n0 - limit) < 1e-3, "normal phi(1e-6) = " + fmt(n0));
    c.note("normal phi(1e-6)=" + fmt(n0) + " vs 4/pi^2=" + fmt(limit));
  });

  criterion(3, "generic rate against small-p and quadratic limits", 30.0, [](Check& c) {
    double worst_small = 0.0, worst_quad = 0.0;
    for (const Distribution& d : {Distribution::uniform_symmetric(1.0), Distribution::diff_uniform()})
      for (double delta : {0.1, 0.2})
        for (Sign s : {Sign::Plus, Sign::Minus}) {
          const double num = rate::rate(d, 1e-3, delta, s).value;
          const double lim = rate::small_p_rate(d, delta, s);
          const double rel = std::abs(num / lim - 1.0);
          worst_small = std::max(worst_small, rel);
          c.require(rel < 0.01, d.to_string() + " delta=" + fmt(delta) + " rel=" + fmt(rel));
        }
    const Distribution u = Distribution::uniform_symmetric(1.0);
    for (double p : {0.1, 0.5, 1.0, 2.0})
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        const double ratio = rate::rate(u, p, 1e-2, s).value / 1e-4;
        const double rel = std::abs(ratio / rate::phi(u, p) - 1.0);
        worst_quad = std::max(worst_quad, rel);
        c.require(rel < 0.02, "p=" + fmt(p) + " rate/delta^2 vs phi rel=" + fmt(rel));
      }
    c.note("worst small-p rel=" + fmt(worst_small) + ", worst quadratic rel=" + fmt(worst_quad));
  });

  criterion(4, "cube plus rate increases in p; uniform rate is the small-p limit", 30.0,
            [](Check& c) {
              const Distribution u = Distribution::uniform_symmetric(1.0);
              double prev = -1.0;
              int violations = 0;
              for (int i = 0; i < 30; ++i) {
                const double p = 0.1 * std::pow(100.0, i / 29.0);
                const double v = rate::rate(u, p, 0.2, Sign::Plus).value;
                if (!(v > prev)) ++violations;
                prev = v;
              }
              c.require(violations == 0, fmt(violations) + " non-increasing steps");
              const double ur = rate::uniform_rate(u, 0.2, Sign::Plus).value;
              const double f = closed_form::uniform_f(0.2, Sign::Plus);
              c.require(std::abs(ur - f) < 1e-4, "uniform_rate=" + fmt(ur) + " f+=" + fmt(f));
              c.note("uniform_rate=" + fmt(ur) + " f+=" + fmt(f));
            });

  criterion(5, "anti-concentration: exact oracle, Monte Carlo, p*", 60.0, [](Check& c) {
    const double oracle = binom_half(100, 50);
    const double exact = anticonc::exact_two_point_concentration(0.5, 1.0, 1e-4, 0.1, 100);
    c.require(std::abs(exact - oracle) < 1e-10, "exact=" + fmt(exact) + " oracle=" + fmt(oracle));
    const Distribution tp = Distribution::two_point(0.5);
    record("two-point Monte Carlo", [tp](int w) {
      const auto f = mc::concentration_frequency(tp, 100, 1e-4, 0.1, 100000, 5, {w});
      return std::vector<double>{f.freq, f.standard_error};
    });
    const double freq = last_reference()[0], se = last_reference()[1];
    c.require(std::abs(freq - exact) <= 3.0 * se,
              "MC " + fmt(freq) + " vs exact " + fmt(exact) + " beyond 3 SE (" + fmt(se) + ")");
    const auto rep = anticonc::find_p_star(tp, 100, 0.1, 0.2);
    c.require(rep.p_star.has_value(), "no p* found");
    if (rep.p_star)
      c.require(rep.exact_prob_at_p_star <= 0.2, "P at p* = " + fmt(rep.exact_prob_at_p_star));
    c.note("exact=" + fmt(exact) + " MC=" + fmt(freq) + "+-" + fmt(se) +
           (rep.p_star ? " p*=" + fmt(*rep.p_star) + " P(p*)=" + fmt(rep.exact_prob_at_p_star)
                       : ""));
  });

  criterion(6, "Berry-Esseen lower bounds below exact tails", 60.0, [](Check& c) {
    int violations = 0, cells = 0;
    for (double a : {0.25, 0.5, 0.75})
      for (std::int64_t n : {50, 100, 500})
        for (double p : {0.001, 0.01}) {
          const auto b = anticonc::berry_esseen_bounds(a, p, 0.1, n, 0.56);
          const auto s = anticonc::exact_two_point_split(a, p, 0.1, n);
          cells += 2;
          if (!(b.upper_tail_lower_bound <= s.above)) ++violations;
          if (!(b.lower_tail_lower_bound <= s.below)) ++violations;
        }
    c.require(violations == 0, fmt(violations) + " violations");
    c.note(fmt(cells) + " bounds checked, " + fmt(violations) + " violations");
  });

  criterion(7, "Chernoff compliance on the unit cube", 120.0, [](Check& c) {
    const Distribution u = Distribution::uniform_unit();
    const std::int64_t n = 1000, M = 10000;
    const double delta = 0.1;
    const double fstar = std::min(rate::uniform_rate(u, delta, Sign::Plus).value,
                                  rate::uniform_rate(u, delta, Sign::Minus).value);
    const double bound = 1.0 - 2.0 * std::exp(-static_cast<double>(n) * fstar);
    static const double ps[] = {0.01, 0.1, 1.0, 2.0};
    record("unit-cube concentration", [u](int w) {
      const std::int64_t ns[] = {1000};
      const auto g = mc::curve_sweep(u, ps, ns, 0.1, 10000, 7, mc::Normalization::AnalyticMu, {w});
      std::vector<double> out;
      for (std::size_t i = 0; i < 4; ++i) {
        out.push_back(g.freq[i][0]);
        out.push_back(g.ci_halfwidth[i][0]);
      }
      return out;
    });
    const auto& ref = last_reference();
    std::string freqs;
    for (std::size_t i = 0; i < 4; ++i) {
      const double f = ref[2 * i], se = ref[2 * i + 1] / kZ95;
      c.require(f >= bound - 3.0 * se, "p=" + fmt(ps[i]) + " freq " + fmt(f) + " below bound");
      c.require(f >= 0.98, "p=" + fmt(ps[i]) + " freq " + fmt(f) + " < 0.98");
      freqs += (freqs.empty() ? "" : ",") + fmt(f);
    }
    (void)M;
    c.note("f*=" + fmt(fstar) + " bound=" + fmt(bound) + " freq={" + freqs + "}");
  });

  criterion(8, "relative contrast on the unit cube", 120.0, [](Check& c) {
    const Distribution u = Distribution::uniform_unit();
    static const double ps[] = {0.01, 0.5, 2.0};
    record("unit-cube contrast", [u](int w) {
      // One batch of 2M draws shared by the three p values, as relative_contrast draws it.
      const std::uint64_t stream = mix_seed(0x636f6e7472617374ULL, 1000);
      const auto sums = mc::sample_log_sums(u, 1000, ps, 200000, 11, stream, {w});
      std::vector<double> out;
      for (std::size_t i = 0; i < 3; ++i) {
        const auto s = mc::contrast_from_log_sums(sums[i], 1000, ps[i], 0.1, mu_p(u, ps[i]));
        out.push_back(s.freq_below_delta);
        out.push_back(s.half_band_freq);
        out.push_back(s.median_rc);
      }
      return out;
    });
    const auto& ref = last_reference();
    std::string freqs;
    for (std::size_t i = 0; i < 3; ++i) {
      const double below = ref[3 * i], half = ref[3 * i + 1];
      c.require(below >= 0.99, "p=" + fmt(ps[i]) + " frequency " + fmt(below) + " < 0.99");
      c.require(below >= 2.0 * half - 1.0, "p=" + fmt(ps[i]) + " union-bound inequality fails");
      freqs += (freqs.empty() ? "" : ",") + fmt(below);
    }
    c.note("freq={" + freqs + "}");
  });

  criterion(9, "synthetic embedding tables", 120.0, [](Check& c) {
    using embed::Kind;
    static const Kind kinds[] = {Kind::Dense, Kind::Sparse, Kind::Relu, Kind::Binary};
    static const double conc_p[] = {0.5, 1.0, 2.0, 10.0};
    static const double rc_p[] = {0.01, 2.0};
    record("embedding tables", [](int w) {
      std::vector<double> out;
      for (const auto& cell : embed::concentration_table(kinds, conc_p, 0.1, 5000, 13, w))
        out.push_back(cell.value);
      for (const auto& cell : embed::contrast_table(kinds, rc_p, 3000, 5000, 13, w))
        out.push_back(cell.value);
      return out;
    });
    const auto& ref = last_reference();
    // Cells are ordered kind-major: concentration [kind][p], then contrast [kind][p].
    auto conc = [&](int k, int i) { return ref[k * 4 + i]; };
    auto rc = [&](int k, int i) { return ref[16 + k * 2 + i]; };
    c.require(conc(0, 0) >= 0.995, "dense p=0.5: " + fmt(conc(0, 0)));
    c.require(std::abs(conc(1, 1) - 0.180) <= 0.03, "sparse p=1: " + fmt(conc(1, 1)));
    c.require(std::abs(conc(2, 2) - 0.926) <= 0.03, "relu p=2: " + fmt(conc(2, 2)));
    c.require(conc(3, 3) >= 0.995, "binary p=10: " + fmt(conc(3, 3)));
    c.require(rc(1, 0) >= 0.99, "sparse RC p=0.01: " + fmt(rc(1, 0)));
    c.require(rc(0, 1) <= 0.005, "dense RC p=2: " + fmt(rc(0, 1)));
    c.note("dense/0.5=" + fmt(conc(0, 0)) + " sparse/1=" + fmt(conc(1, 1)) + " relu/2=" +
           fmt(conc(2, 2)) + " binary/10=" + fmt(conc(3, 3)) + " RC sparse/0.01=" +
           fmt(rc(1, 0)) + " RC dense/2=" + fmt(rc(0, 1)));
  });

  criterion(10, "diagnostics on synthetic cube-30", 120.0, [](Check& c) {
    constexpr int kSeeds = 5, kGaps = 10;
    static const double curve_p[] = {0.01};
    record("cube-30 perturbation", [](int w) {
      std::vector<double> out;
      for (int s = 1; s <= kSeeds; ++s) {
        const diag::Dataset d = cube(500, 30, s);
        for (int g = 1; g <= kGaps; ++g) {
          const double gap = 0.01 * g;
          const auto r = diag::perturb_report(d, gap, s, curve_p, 0.1,
                                              diag::CurveNormalization::Pooled, w);
          out.push_back(r.ks_min_pvalue);
          out.push_back(r.wasserstein_total);
          out.push_back(r.curves[0].frac_original);
          out.push_back(r.curves[0].frac_perturbed);
        }
      }
      return out;
    });
    const auto& ref = last_reference();
    auto at = [&](int s, int g, int field) { return ref[((s * kGaps) + g) * 4 + field]; };
    std::vector<double> gaps, ks_mean, w_mean;
    for (int g = 0; g < kGaps; ++g) {
      double ks = 0.0, w = 0.0;
      for (int s = 0; s < kSeeds; ++s) {
        ks += at(s, g, 0) / kSeeds;
        w += at(s, g, 1) / kSeeds;
      }
      gaps.push_back(0.01 * (g + 1));
      ks_mean.push_back(ks);
      w_mean.push_back(w);
    }
    const double rho_ks = diag::spearman(gaps, ks_mean);
    const double rho_w = diag::spearman(gaps, w_mean);
    c.require(rho_ks < -0.8, "KS Spearman " + fmt(rho_ks));
    c.require(rho_w > 0.8, "Wasserstein Spearman " + fmt(rho_w));

    // Per-attribute W1 at every gap against 2 b a with b = 1.
    double worst_margin = -1e300;
    for (int g = 1; g <= kGaps; ++g) {
      const double gap = 0.01 * g;
      std::vector<double> per_attr;
      for (int s = 1; s <= kSeeds; ++s) {
        const diag::Dataset d = cube(500, 30, s);
        const auto z = diag::zero_impute(d, gap, s);
        for (std::size_t j = 0; j < d.cols; ++j)
          per_attr.push_back(diag::wasserstein_1d(d.column(j), z.data.column(j)));
      }
      double mean = 0.0, ss = 0.0;
      for (double v : per_attr) mean += v / per_attr.size();
      for (double v : per_attr) ss += (v - mean) * (v - mean);
      const double se = std::sqrt(ss / (per_attr.size() - 1) / per_attr.size());
      const double bound = diag::wasserstein_atom_bound(1.0, gap);
      worst_margin = std::max(worst_margin, mean - (bound + 3.0 * se));
      c.require(mean <= bound + 3.0 * se, "gap " + fmt(gap) + ": mean W1 " + fmt(mean) +
                                              " > 2ba + 3SE " + fmt(bound + 3.0 * se));
    }

    double orig = 0.0, pert = 0.0;
    for (int s = 0; s < kSeeds; ++s) {
      orig += at(s, 4, 2) / kSeeds;
      pert += at(s, 4, 3) / kSeeds;
    }
    c.require(pert < 0.5 * orig, "curve at p=0.01, gap 0.05: " + fmt(pert) + " vs " + fmt(orig));
    c.note("rho_KS=" + fmt(rho_ks) + " rho_W=" + fmt(rho_w) + " W(0.1)=" + fmt(w_mean.back()) +
           " curve p=0.01 gap=0.05: " + fmt(pert) + " vs " + fmt(orig));
  });

  criterion(11, "numerical stability and worker-count reproducibility", 30.0, [](Check& c) {
    std::vector<double> x;
    for (int e = -150; e <= 150; e += 2) x.push_back((e % 4 ? -3.7 : 1.3) * std::pow(10.0, e));
    long double m = 0.0L;
    for (double v : x) m = std::max(m, static_cast<long double>(std::abs(v)));
    long double acc = 0.0L;
    for (double v : x) acc += std::pow(std::abs(v) / m, 100.0L);
    const double ref = static_cast<double>(m * std::pow(acc, 1.0L / 100.0L));
    const double got = mc::lp_norm(x, 100.0);
    const double rel = std::abs(got / ref - 1.0);
    c.require(rel <= 1e-12, "p=100 norm rel error " + fmt(rel));

    int mismatches = 0;
    for (const Replay& r : replays) {
      for (int w : {3}) {
        const auto again = r.run(w);
        if (again != r.reference) {
          ++mismatches;
          c.require(false, r.name + " differs with " + fmt(w) + " workers");
        }
      }
    }
    c.note("norm rel err=" + fmt(rel) + ", " + fmt(static_cast<double>(replays.size())) +
           " stochastic runs replayed with 3 workers, " + fmt(mismatches) + " mismatches");
  });

  std::printf("%s: %d of 11 criteria failed\n", failed ? "FAILED" : "PASSED", failed);
  return failed ? 1 : 0;
}
