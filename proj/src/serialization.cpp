#include "lpconc/serialization.hpp"

#include <charconv>
#include <cmath>

namespace lpconc {

using nlohmann::json;

namespace {

json matrix(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (double v : row) r.push_back(json_number(v));
    out.push_back(std::move(r));
  }
  return out;
}

template <class T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json to_json(const MomentReport& r) {
  return {{"mu_p", json_number(r.mu_p)},
          {"log_mean", json_number(r.log_mean)},
          {"log_var", json_number(r.log_var)},
          {"ess_sup", json_number(r.ess_sup)},
          {"atom_at_zero", r.atom_at_zero}};
}

json to_json(const AssumptionReport& r) {
  return {{"iid", r.iid},
          {"tail_bound", r.tail_bound},
          {"p0", json_number(r.p0)},
          {"t0", json_number(r.t0)},
          {"negative_moment", r.negative_moment},
          {"y0", json_number(r.y0)},
          {"zero_atom", r.zero_atom},
          {"atom", r.atom},
          {"note", r.note}};
}

json to_json(const rate::RateResult& r) {
  return {{"value", json_number(r.value)},
          {"argmax_t", r.argmax_t ? json_number(*r.argmax_t) : json(nullptr)},
          {"regime", rate::to_string(r.regime)},
          {"iterations", r.iterations},
          {"tolerance_met", r.tolerance_met}};
}

json to_json(const anticonc::AntiConcReport& r) {
  return {{"n", r.n},
          {"delta", r.delta},
          {"target_Delta", r.target_Delta},
          {"p_star", optional_value(r.p_star)},
          {"exact_prob_at_p_star", r.p_star ? json(r.exact_prob_at_p_star) : json(nullptr)},
          {"prob_at_p_min", r.prob_at_p_min},
          {"binomial_mode_prob", r.binomial_mode_prob},
          {"method", anticonc::to_string(r.method)},
          {"mc_samples", r.mc_samples},
          {"mc_standard_error", r.mc_standard_error},
          {"iterations", r.iterations},
          {"empirical_N", optional_value(r.empirical_N)},
          {"conservative_N", json_number(r.conservative_N)},
          {"diagnostic", r.diagnostic}};
}

json to_json(const anticonc::BerryEsseenBounds& b) {
  return {{"sigma", b.sigma},
          {"rho", b.rho},
          {"C_const", b.C_const},
          {"upper_tail_lower_bound", b.upper_tail_lower_bound},
          {"lower_tail_lower_bound", b.lower_tail_lower_bound},
          {"vacuous", b.vacuous}};
}

json to_json(const mc::Frequency& f) {
  return {{"freq", f.freq},
          {"ci_halfwidth", f.ci_halfwidth},
          {"standard_error", f.standard_error},
          {"hits", f.hits},
          {"samples", f.samples},
          {"mu_p", json_number(f.mu_p)}};
}

json to_json(const mc::ConcentrationGrid& g) {
  return {{"p_grid", g.p_grid},
          {"n_grid", g.n_grid},
          {"freq", matrix(g.freq)},
          {"ci", matrix(g.ci_halfwidth)},
          {"M", g.sample_count},
          {"seed", g.seed},
          {"delta", g.delta},
          {"normalization", mc::to_string(g.normalization)},
          {"failures", g.failures}};
}

json to_json(const mc::ContrastSummary& s) {
  return {{"p", s.p},
          {"n", s.n},
          {"delta", s.delta},
          {"median_rc", json_number(s.median_rc)},
          {"freq_below_delta", s.freq_below_delta},
          {"half_band_freq", s.half_band_freq},
          {"pairs", s.pairs},
          {"skipped", s.skipped},
          {"skip_rate", s.skip_rate},
          {"mu_p", json_number(s.mu_p)}};
}

json to_json(const diag::PerturbReport& r) {
  json curves = json::array();
  for (const auto& c : r.curves)
    curves.push_back({{"p", c.p},
                      {"frac_original", json_number(c.frac_original)},
                      {"frac_perturbed", json_number(c.frac_perturbed)}});
  return {{"gap_prob", r.gap_prob},
          {"seed", r.seed},
          {"realized_fraction", r.realized_fraction},
          {"wasserstein_total", r.wasserstein_total},
          {"ks_min_pvalue", r.ks_min_pvalue},
          {"ks_statistic_max", r.ks_statistic_max},
          {"curves", std::move(curves)}};
}

}  // namespace lpconc
