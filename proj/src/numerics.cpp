#include "lpconc/numerics.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lpconc {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498948482;
}  // namespace

double log_add_exp(double a, double b) {
  if (a == -kInfinity) return b;
  if (b == -kInfinity) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_mean_exp(std::span<const double> values) {
  if (values.empty()) return -kInfinity;
  double hi = -kInfinity;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kInfinity) return kInfinity;
  if (hi == -kInfinity) return -kInfinity;
  CompensatedSum s;
  for (double v : values) s.add(std::exp(v - hi));
  return hi + std::log(s.value() / static_cast<double>(values.size()));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol, int max_iter) {
  Maximum best;
  best.value = -kInfinity;
  best.x = lo;
  auto track = [&](double x, double v) {
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };
  double a = lo, b = hi;
  const double abs_floor = 1e-15 * std::max(std::abs(hi - lo), 1e-300);
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = track(c, f(c));
  double fd = track(d, f(d));
  int it = 0;
  for (; it < max_iter; ++it) {
    if (b - a <= rel_tol * std::max(std::abs(a), std::abs(b)) + abs_floor) {
      best.converged = true;
      break;
    }
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = track(d, f(d));
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = track(c, f(c));
    }
  }
  best.iterations = it;
  return best;
}

Maximum maximize_concave_halfline(const std::function<double(double)>& f, double start,
                                  double cap, double rel_tol) {
  double x_prev = 0.0;
  double f_prev = f(0.0);
  double x = start;
  double fx = f(x);
  int doublings = 0;
  if (fx <= f_prev) {
    Maximum m = golden_section_max(f, 0.0, x, rel_tol);
    if (f_prev >= m.value) {
      m.x = 0.0;
      m.value = f_prev;
    }
    return m;
  }
  for (;;) {
    const double x_next = 2.0 * x;
    if (x_next > cap) {
      Maximum m;
      m.x = x;
      m.value = fx;
      m.iterations = doublings;
      m.unbounded = true;
      return m;
    }
    const double f_next = f(x_next);
    ++doublings;
    if (!(f_next > fx)) {
      Maximum m = golden_section_max(f, x_prev, x_next, rel_tol);
      if (fx > m.value) {
        m.x = x;
        m.value = fx;
      }
      m.iterations += doublings;
      return m;
    }
    x_prev = x;
    f_prev = fx;
    x = x_next;
    fx = f_next;
  }
}

namespace {

// Point in [a, b] where a decreasing psi crosses `level` (psi(a) >= level > psi(b)).
double crossing(const std::function<double(double)>& psi, double a, double b, double level) {
  for (int i = 0; i < 32; ++i) {
    const double mid = 0.5 * (a + b);
    if (psi(mid) >= level)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

double log_integrate_exp(const std::function<double(double)>& psi, const LogIntegralOptions& opts) {
  constexpr double kDrop = 60.0;
  auto eval = [&](double l) {
    const double v = psi(l);
    return std::isnan(v) ? kInfinity : v;
  };

  double hi = opts.hi;
  double lo = std::min(opts.lo, hi - 1.0);
  double peak = -kInfinity;
  {
    constexpr int kGrid = 128;
    for (int i = 0; i <= kGrid; ++i) {
      const double v = eval(lo + (hi - lo) * i / kGrid);
      if (v == kInfinity) return kInfinity;
      peak = std::max(peak, v);
    }
  }
  if (peak == -kInfinity) return -kInfinity;

  for (double step = 1.0; eval(lo) > peak - kDrop && lo > -1e6; step *= 2.0) {
    lo -= step;
    peak = std::max(peak, eval(lo));
  }
  if (!opts.hi_is_support_end) {
    for (double step = 1.0;; step *= 2.0) {
      const double v = eval(hi);
      if (v == kInfinity) return kInfinity;
      peak = std::max(peak, v);
      if (v < peak - kDrop) break;
      if (hi >= opts.hi_cap) return kInfinity;
      hi = std::min(hi + step, opts.hi_cap);
    }
  }

  // Locate the peak on the final range.
  constexpr int kGrid = 256;
  int best = 0;
  peak = -kInfinity;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = eval(lo + (hi - lo) * i / kGrid);
    if (v == kInfinity) return kInfinity;
    if (v > peak) {
      peak = v;
      best = i;
    }
  }
  const double cell = (hi - lo) / kGrid;
  const double left = std::max(lo, lo + (best - 1) * cell);
  const double right = std::min(hi, lo + (best + 1) * cell);
  const Maximum refined = golden_section_max(eval, left, right, 1e-10, 100);
  double mode = lo + best * cell;
  if (refined.value > peak) {
    peak = refined.value;
    mode = refined.x;
  }

  // Breakpoints where psi has dropped by fixed amounts on either side of the mode.
  std::vector<double> cuts{lo, mode, hi};
  for (double drop : {0.5, 2.0, 6.0, 15.0, 35.0}) {
    const double level = peak - drop;
    if (mode < hi && eval(hi) < level) cuts.push_back(crossing(eval, mode, hi, level));
    if (mode > lo && eval(lo) < level) {
      auto mirrored = [&](double u) { return eval(-u); };
      cuts.push_back(-crossing(mirrored, -mode, -lo, level));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](double l) {
    const double v = eval(l);
    return v == -kInfinity ? 0.0 : std::exp(v - peak);
  };
  // A coarse pass sizes each segment; each then only needs rel_tol of the total,
  // so segments whose integrand is dominated by rounding noise stop early.
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::vector<double> coarse(cuts.size() - 1, 0.0);
  double coarse_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    coarse[i] = std::abs(Kronrod::integrate(integrand, cuts[i], cuts[i + 1], 0, 0.0));
    coarse_total += coarse[i];
  }
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double tol =
        coarse[i] > 0.0 ? std::min(0.5, opts.rel_tol * std::max(1.0, coarse_total / coarse[i]))
                        : opts.rel_tol;
    double err = 0.0;
    total.add(Kronrod::integrate(integrand, cuts[i], cuts[i + 1], 15, tol, &err));
  }
  const double mass = total.value();
  if (!(mass > 0.0)) return -kInfinity;
  return peak + std::log(mass);
}

}  // namespace lpconc
