#include "lpconc/cli.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpconc/anti_concentration.hpp"
#include "lpconc/closed_forms.hpp"
#include "lpconc/diagnostics.hpp"
#include "lpconc/distribution_text.hpp"
#include "lpconc/embedding_lab.hpp"
#include "lpconc/errors.hpp"
#include "lpconc/monte_carlo.hpp"
#include "lpconc/random.hpp"
#include "lpconc/rate_engine.hpp"
#include "lpconc/serialization.hpp"

namespace lpconc::cli {

namespace {

using nlohmann::json;

std::string text_of(const std::string& s) { return s; }
std::string text_of(double x) { return format_number(x); }
std::string text_of(std::int64_t x) { return std::to_string(x); }
std::string text_of(std::uint64_t x) { return std::to_string(x); }
std::string text_of(int x) { return std::to_string(x); }
template <class T>
std::string text_of(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + text_of(v[i]);
  return s;
}

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

// Records every option of a subcommand so the run can be echoed and replayed.
class Registry {
 public:
  explicit Registry(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* option(const std::string& name, T& var, const std::string& desc) {
    CLI::Option* o = app_->add_option("--" + name, var, desc)->capture_default_str();
    if constexpr (is_vector<T>::value) o->delimiter(',');
    items_.push_back({name, [&var] { return text_of(var); }, false});
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    CLI::Option* o = app_->add_flag("--" + name, var, desc);
    items_.push_back({name, [&var] { return std::string(var ? "true" : "false"); }, true});
    return o;
  }

  json run_config() const {
    json options = json::object();
    json argv = json::array({app_->get_name()});
    for (const auto& it : items_) {
      const std::string v = it.get();
      options[it.name] = v;
      if (it.is_flag) {
        if (v == "true") argv.push_back("--" + it.name);
      } else if (!v.empty()) {
        argv.push_back("--" + it.name);
        argv.push_back(v);
      }
    }
    return {{"subcommand", app_->get_name()}, {"options", options}, {"argv", argv}};
  }

 private:
  struct Item {
    std::string name;
    std::function<std::string()> get;
    bool is_flag;
  };
  CLI::App* app_;
  std::vector<Item> items_;
};

struct Common {
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  int workers = 0;
};

void add_common(Registry& r, Common& c, bool with_seed) {
  r.option("format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  r.option("out", c.out_path, "Output file (default: stdout)");
  if (with_seed) r.option("seed", c.seed, "Random seed");
  r.option("workers", c.workers, "Worker threads (0: LPCONC_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

// Table in long format: header plus rows of preformatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void emit(const Common& c, const Registry& reg, const json& result, const Table& table,
          std::ostream& out) {
  std::ofstream file;
  std::ostream* os = &out;
  if (!c.out_path.empty()) {
    file.open(c.out_path);
    if (!file) throw InputError("cannot write '" + c.out_path + "'");
    os = &file;
  }
  if (c.format == "json") {
    json doc = {{"schema_version", kSchemaVersion}, {"run_config", reg.run_config()},
                {"result", result}};
    *os << doc.dump(2) << '\n';
    return;
  }
  json header = reg.run_config();
  header["schema_version"] = kSchemaVersion;
  *os << "# run_config " << header.dump() << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) *os << (i ? "," : "") << table.header[i];
  *os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) *os << (i ? "," : "") << row[i];
    *os << '\n';
  }
}

std::string num(double x) { return format_number(x); }

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
  return v;
}

double closed_small_p(const Distribution& d, double delta, Sign s) {
  const auto& v = d.variant();
  if (std::holds_alternative<UniformSymmetric>(v) || std::holds_alternative<UniformUnit>(v))
    return closed_form::uniform_f(delta, s);
  if (std::holds_alternative<DiffUniform>(v)) return closed_form::diff_uniform_f(delta, s);
  return std::numeric_limits<double>::quiet_NaN();
}

// ---- rates ----------------------------------------------------------------

struct RatesArgs {
  Common c;
  std::string dist;
  std::vector<double> p{0.01, 0.1, 1.0};
  double delta = 0.1;
  std::int64_t n = 0;
  bool closed_form = false;
  bool uniform = false;
};

void run_rates(const RatesArgs& a, const Registry& reg, std::ostream& out) {
  const Distribution d = parse_distribution(a.dist);
  json rows = json::array();
  Table t;
  t.header = {"p", "lambda_plus", "lambda_minus", "argmax_t_plus", "argmax_t_minus",
              "regime_plus", "regime_minus", "phi"};
  if (a.closed_form) t.header.insert(t.header.end(), {"closed_form_f_plus", "closed_form_f_minus"});
  if (a.n > 0) t.header.insert(t.header.end(), {"upper_tail_bound", "lower_tail_bound", "two_sided_lower"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double p : a.p) {
    const auto rp = rate::rate(d, p, a.delta, Sign::Plus);
    const auto rm = rate::rate(d, p, a.delta, Sign::Minus);
    double phi = nan;
    try {
      phi = rate::phi(d, p);
    } catch (const DomainError&) {
    }
    json row = {{"p", p}, {"plus", to_json(rp)}, {"minus", to_json(rm)}, {"phi", json_number(phi)}};
    std::vector<std::string> cells = {num(p), num(rp.value), num(rm.value),
                                      num(rp.argmax_t.value_or(nan)), num(rm.argmax_t.value_or(nan)),
                                      rate::to_string(rp.regime), rate::to_string(rm.regime), num(phi)};
    if (a.closed_form) {
      const double fp = closed_small_p(d, a.delta, Sign::Plus);
      const double fm = closed_small_p(d, a.delta, Sign::Minus);
      row["closed_form"] = {{"f_plus", json_number(fp)}, {"f_minus", json_number(fm)}};
      cells.push_back(num(fp));
      cells.push_back(num(fm));
    }
    if (a.n > 0) {
      const auto b = rate::chernoff_bounds(rp.value, rm.value, a.n);
      row["bounds"] = {{"upper_tail_bound", b.upper_tail_bound},
                       {"lower_tail_bound", b.lower_tail_bound},
                       {"two_sided_lower", b.two_sided_lower}};
      cells.insert(cells.end(), {num(b.upper_tail_bound), num(b.lower_tail_bound),
                                 num(b.two_sided_lower)});
    }
    rows.push_back(std::move(row));
    t.rows.push_back(std::move(cells));
  }
  json result = {{"distribution", d.to_string()}, {"delta", a.delta}, {"rows", rows}};
  if (a.uniform) {
    json u = json::object();
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const auto ur = rate::uniform_rate(d, a.delta, s);
      u[s == Sign::Plus ? "plus" : "minus"] = {{"value", json_number(ur.value)},
                                               {"attained", rate::to_string(ur.attained)},
                                               {"p_at_min", json_number(ur.p_at_min)}};
    }
    result["uniform_rate"] = u;
  }
  emit(a.c, reg, result, t, out);
}

// ---- curve ----------------------------------------------------------------

struct CurveArgs {
  Common c;
  std::string dist;
  std::vector<double> p = log_spaced(1e-3, 10.0, 30);
  std::vector<std::int64_t> n{10, 30, 100, 300, 1000, 3000};
  double delta = 0.1;
  std::int64_t M = 10000;
  std::string normalization = "default";
};

void run_curve(const CurveArgs& a, const Registry& reg, std::ostream& out) {
  const Distribution d = parse_distribution(a.dist);
  const mc::Normalization norm = a.normalization == "default"
                                     ? mc::default_normalization(d)
                                     : mc::parse_normalization(a.normalization);
  const auto g = mc::curve_sweep(d, a.p, a.n, a.delta, a.M, a.c.seed, norm, {a.c.workers});
  Table t;
  t.header = {"p", "n", "freq", "ci_halfwidth"};
  for (std::size_t i = 0; i < g.p_grid.size(); ++i)
    for (std::size_t j = 0; j < g.n_grid.size(); ++j)
      t.rows.push_back({num(g.p_grid[i]), std::to_string(g.n_grid[j]), num(g.freq[i][j]),
                        num(g.ci_halfwidth[i][j])});
  json result = to_json(g);
  result["distribution"] = d.to_string();
  emit(a.c, reg, result, t, out);
}

// ---- contrast -------------------------------------------------------------

struct ContrastArgs {
  Common c;
  std::string dist;
  std::vector<double> p{0.01, 0.5, 2.0};
  std::int64_t n = 1000;
  double delta = 0.1;
  std::int64_t M = 10000;
  std::string normalization = "default";
};

void run_contrast(const ContrastArgs& a, const Registry& reg, std::ostream& out) {
  const Distribution d = parse_distribution(a.dist);
  const mc::Normalization norm = a.normalization == "default"
                                     ? mc::default_normalization(d)
                                     : mc::parse_normalization(a.normalization);
  json rows = json::array();
  Table t;
  t.header = {"p", "n", "delta", "median_rc", "freq_below_delta", "half_band_freq", "pairs",
              "skipped"};
  for (double p : a.p) {
    const auto s = mc::relative_contrast(d, a.n, p, a.M, a.c.seed, a.delta, norm, {a.c.workers});
    rows.push_back(to_json(s));
    t.rows.push_back({num(s.p), std::to_string(s.n), num(s.delta), num(s.median_rc),
                      num(s.freq_below_delta), num(s.half_band_freq), std::to_string(s.pairs),
                      std::to_string(s.skipped)});
  }
  emit(a.c, reg, {{"distribution", d.to_string()}, {"rows", rows}}, t, out);
}

// ---- pstar ----------------------------------------------------------------

struct PStarArgs {
  Common c;
  std::string dist;
  std::int64_t n = 100;
  double delta = 0.1;
  double Delta = 0.2;
  std::string method = "auto";
  std::int64_t M = 10000;
  double C = anticonc::kBerryEsseenDefault;
};

void run_pstar(const PStarArgs& a, const Registry& reg, std::ostream& out) {
  const Distribution d = parse_distribution(a.dist);
  anticonc::PStarOptions o;
  o.method = anticonc::parse_method(a.method);
  o.mc_samples = a.M;
  o.seed = a.c.seed;
  o.workers = a.c.workers;
  o.C_const = a.C;
  const auto rep = anticonc::find_p_star(d, a.n, a.delta, a.Delta, o);
  json result = to_json(rep);
  result["distribution"] = d.to_string();
  if (rep.p_star)
    result["berry_esseen_at_p_star"] =
        to_json(anticonc::berry_esseen_bounds(d.atom_at_zero(), *rep.p_star, a.delta, a.n, a.C));
  Table t;
  const json flat = to_json(rep);
  for (const auto& [k, v] : flat.items()) {
    t.header.push_back(k);
    t.rows.resize(1);
    t.rows[0].push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  emit(a.c, reg, result, t, out);
}

// ---- embedsim -------------------------------------------------------------

struct EmbedArgs {
  Common c;
  std::vector<std::string> kinds{"dense", "sparse", "relu", "binary"};
  std::vector<double> p{0.01, 0.1, 0.5, 1.0, 2.0, 10.0};
  std::vector<double> rc_p{0.01, 0.1, 0.5, 1.0, 2.0};
  double delta = 0.1;
  std::int64_t M = 5000;
  std::int64_t pairs = 3000;
};

void run_embed(const EmbedArgs& a, const Registry& reg, std::ostream& out) {
  if (a.M < 2 || a.pairs < 1) throw InputError("need M >= 2 and pairs >= 1");
  std::vector<embed::Kind> kinds;
  for (const auto& k : a.kinds) kinds.push_back(embed::parse_kind(k));
  const auto conc = embed::concentration_table(kinds, a.p, a.delta, a.M, a.c.seed, a.c.workers);
  const auto rc = embed::contrast_table(kinds, a.rc_p, a.pairs, a.M, a.c.seed, a.c.workers);
  Table t;
  t.header = {"table", "kind", "p", "value"};
  json jc = json::array(), jr = json::array();
  for (const auto& cell : conc) {
    jc.push_back({{"kind", embed::to_string(cell.kind)}, {"p", cell.p}, {"value", json_number(cell.value)}});
    t.rows.push_back({"concentration", embed::to_string(cell.kind), num(cell.p), num(cell.value)});
  }
  for (const auto& cell : rc) {
    jr.push_back({{"kind", embed::to_string(cell.kind)}, {"p", cell.p}, {"value", json_number(cell.value)}});
    t.rows.push_back({"median_rc", embed::to_string(cell.kind), num(cell.p), num(cell.value)});
  }
  emit(a.c, reg, {{"concentration", jc}, {"median_relative_contrast", jr}}, t, out);
}

// ---- diagnose / perturb ---------------------------------------------------

struct DataArgs {
  std::string data;
  std::string synthetic;  // ROWSxCOLS uniform [0,1] table
  std::string missing = "reject";
  bool drop_constant = false;
  bool standardize = false;
  std::int64_t mode_shift = 0;
  std::string curve_normalization = "pooled";
};

void add_data_options(Registry& r, DataArgs& d) {
  r.option("data", d.data, "Input CSV with a header row");
  r.option("synthetic", d.synthetic, "Generate ROWSxCOLS uniform [0,1] data instead of --data");
  r.option("missing", d.missing, "Missing cells: reject rows or mean-impute")
      ->check(CLI::IsMember({"reject", "mean"}));
  r.flag("drop-constant", d.drop_constant, "Drop constant columns");
  r.flag("standardize", d.standardize, "Standardize columns (mean 0, unbiased sd 1)");
  r.option("mode-shift", d.mode_shift,
           "Shift columns with fewer than this many unique values so their mode is 0 (0: off)");
  r.option("curve-normalization", d.curve_normalization, "pooled or per-column")
      ->check(CLI::IsMember({"pooled", "per-column"}));
}

struct Prepared {
  diag::Dataset data;
  json summary;
};

Prepared prepare(const DataArgs& a, std::uint64_t seed) {
  Prepared p;
  if (a.data.empty() == a.synthetic.empty())
    throw InputError("exactly one of --data and --synthetic is required");
  if (!a.data.empty()) {
    diag::CsvOptions o;
    o.missing = a.missing == "mean" ? diag::MissingPolicy::MeanImpute : diag::MissingPolicy::Reject;
    p.data = diag::load_csv(a.data, o);
  } else {
    std::size_t rows = 0, cols = 0;
    char x = 0;
    std::istringstream ss(a.synthetic);
    if (!(ss >> rows >> x >> cols) || x != 'x' || rows == 0 || cols == 0)
      throw InputError("--synthetic expects ROWSxCOLS, got '" + a.synthetic + "'");
    std::vector<double> v(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      Rng rng = Rng::for_chunk(seed, 0x73796e7468ULL, i);
      for (std::size_t j = 0; j < cols; ++j) v[i * cols + j] = rng.uniform();
    }
    p.data = diag::make_dataset(rows, cols, std::move(v));
  }
  p.summary = {{"rows", p.data.rows},
               {"cols", p.data.cols},
               {"constant_columns", p.data.constant_columns.size()}};
  if (a.drop_constant) {
    std::size_t dropped = 0;
    p.data = diag::drop_constant_columns(p.data, &dropped);
    p.summary["dropped_constant"] = dropped;
    p.summary["cols_retained"] = p.data.cols;
  }
  if (a.standardize) p.data = diag::standardize(p.data);
  if (a.mode_shift > 0) {
    auto ms = diag::mode_shift(p.data, static_cast<std::size_t>(a.mode_shift));
    p.summary["mode_shift"] = {{"affected_columns", ms.affected_columns},
                               {"zeros_introduced", ms.zeros_introduced}};
    p.data = std::move(ms.data);
  }
  p.summary["warnings"] = p.data.warnings;
  return p;
}

struct DiagnoseArgs {
  Common c;
  DataArgs d;
  std::vector<double> p = log_spaced(1e-2, 10.0, 30);
  double delta = 0.1;
};

void run_diagnose(const DiagnoseArgs& a, const Registry& reg, std::ostream& out) {
  const Prepared prep = prepare(a.d, a.c.seed);
  const auto norm = diag::parse_curve_normalization(a.d.curve_normalization);
  const auto frac = diag::concentration_curve(prep.data, a.p, a.delta, norm);
  json curve = json::array();
  Table t;
  t.header = {"p", "fraction"};
  for (std::size_t i = 0; i < a.p.size(); ++i) {
    curve.push_back({{"p", a.p[i]}, {"fraction", json_number(frac[i])}});
    t.rows.push_back({num(a.p[i]), num(frac[i])});
  }
  json result = prep.summary;
  result["curve"] = curve;
  emit(a.c, reg, result, t, out);
}

struct PerturbArgs {
  Common c;
  DataArgs d;
  std::vector<double> gap{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
  std::vector<double> p = log_spaced(1e-2, 10.0, 30);
  double delta = 0.1;
};

void run_perturb(const PerturbArgs& a, const Registry& reg, std::ostream& out) {
  const Prepared prep = prepare(a.d, a.c.seed);
  const auto norm = diag::parse_curve_normalization(a.d.curve_normalization);
  json reports = json::array();
  Table t;
  t.header = {"gap_prob", "p", "frac_original", "frac_perturbed", "wasserstein_total",
              "ks_min_pvalue", "ks_statistic_max"};
  for (double g : a.gap) {
    if (!(g >= 0.0 && g <= 1.0)) throw InputError("gap probabilities must lie in [0,1]");
    const auto r = diag::perturb_report(prep.data, g, mix_seed(a.c.seed, std::bit_cast<std::uint64_t>(g)),
                                        a.p, a.delta, norm, a.c.workers);
    reports.push_back(to_json(r));
    for (const auto& c : r.curves)
      t.rows.push_back({num(g), num(c.p), num(c.frac_original), num(c.frac_perturbed),
                        num(r.wasserstein_total), num(r.ks_min_pvalue), num(r.ks_statistic_max)});
  }
  json result = prep.summary;
  result["reports"] = reports;
  emit(a.c, reg, result, t, out);
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  Common c;
  std::string dist;
  double p = 1.0;
};

void run_validate(const ValidateArgs& a, const Registry& reg, std::ostream& out) {
  const Distribution d = parse_distribution(a.dist);
  const auto assumptions = validate_assumptions(d);
  json result = {{"distribution", d.to_string()},
                 {"assumptions", to_json(assumptions)},
                 {"moments", to_json(moment_report(d, a.p))}};
  Table t;
  t.header = {"key", "value"};
  for (const auto& [k, v] : result["assumptions"].items())
    t.rows.push_back({k, v.is_string() ? v.get<std::string>() : v.dump()});
  for (const auto& [k, v] : result["moments"].items())
    t.rows.push_back({k, v.is_string() ? v.get<std::string>() : v.dump()});
  emit(a.c, reg, result, t, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"l^p quasi-norm concentration toolkit", "lpconc"};
  app.require_subcommand(1);

  RatesArgs rates;
  CurveArgs curve;
  ContrastArgs contrast;
  PStarArgs pstar;
  EmbedArgs embedsim;
  DiagnoseArgs diagnose;
  PerturbArgs perturb;
  ValidateArgs validate;
  std::vector<std::pair<CLI::App*, std::unique_ptr<Registry>>> subs;
  auto sub = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    subs.emplace_back(s, std::make_unique<Registry>(s));
    return subs.back().second.get();
  };

  Registry* r = sub("rates", "Chernoff rates Lambda+- over a p grid");
  r->option("dist", rates.dist, "Component law, e.g. uniform:b=1")->required();
  r->option("p", rates.p, "Comma-separated p values");
  r->option("delta", rates.delta, "Relative deviation delta");
  r->option("n", rates.n, "Dimension for Chernoff bounds (0: omit)");
  r->flag("closed-form", rates.closed_form, "Add closed-form small-p rate columns");
  r->flag("uniform", rates.uniform, "Also report the rate uniform in p");
  add_common(*r, rates.c, false);

  r = sub("curve", "Monte Carlo concentration frequencies over a (p, n) grid");
  r->option("dist", curve.dist, "Component law")->required();
  r->option("p", curve.p, "Comma-separated p values");
  r->option("n", curve.n, "Comma-separated dimensions");
  r->option("delta", curve.delta, "Relative deviation delta");
  r->option("M", curve.M, "Samples per cell")->check(CLI::PositiveNumber);
  r->option("normalization", curve.normalization, "default, analytic-mu or empirical-mu");
  add_common(*r, curve.c, true);

  r = sub("contrast", "Relative contrast of independent pairs");
  r->option("dist", contrast.dist, "Component law")->required();
  r->option("p", contrast.p, "Comma-separated p values");
  r->option("n", contrast.n, "Dimension")->check(CLI::PositiveNumber);
  r->option("delta", contrast.delta, "Relative deviation delta");
  r->option("M", contrast.M, "Number of pairs")->check(CLI::PositiveNumber);
  r->option("normalization", contrast.normalization, "default, analytic-mu or empirical-mu");
  add_common(*r, contrast.c, true);

  r = sub("pstar", "Largest p whose concentration probability is at most Delta");
  r->option("dist", pstar.dist, "Component law with an atom at zero")->required();
  r->option("n", pstar.n, "Dimension")->check(CLI::PositiveNumber);
  r->option("delta", pstar.delta, "Relative deviation delta");
  r->option("Delta", pstar.Delta, "Target probability");
  r->option("method", pstar.method, "auto, exact-binomial or monte-carlo");
  r->option("M", pstar.M, "Monte Carlo samples per p")->check(CLI::PositiveNumber);
  r->option("C", pstar.C, "Berry-Esseen constant in [0.4097, 0.56]");
  add_common(*r, pstar.c, true);

  r = sub("embedsim", "Synthetic embedding concentration and contrast tables");
  r->option("kinds", embedsim.kinds, "Comma-separated kinds: dense, sparse, relu, binary");
  r->option("p", embedsim.p, "p values for the concentration table");
  r->option("rc-p", embedsim.rc_p, "p values for the contrast table");
  r->option("delta", embedsim.delta, "Relative deviation delta");
  r->option("M", embedsim.M, "Vectors per kind");
  r->option("pairs", embedsim.pairs, "Random pairs for the contrast table");
  add_common(*r, embedsim.c, true);

  r = sub("diagnose", "Concentration curve of a data table");
  add_data_options(*r, diagnose.d);
  r->option("p", diagnose.p, "Comma-separated p values");
  r->option("delta", diagnose.delta, "Band half-width delta");
  add_common(*r, diagnose.c, true);

  r = sub("perturb", "Zero-imputation study: KS, Wasserstein and curves per gap probability");
  add_data_options(*r, perturb.d);
  r->option("gap", perturb.gap, "Comma-separated gap probabilities");
  r->option("p", perturb.p, "Comma-separated p values");
  r->option("delta", perturb.delta, "Band half-width delta");
  add_common(*r, perturb.c, true);

  r = sub("validate", "Check the modelling assumptions for a component law");
  r->option("dist", validate.dist, "Component law")->required();
  r->option("p", validate.p, "p for the moment report");
  add_common(*r, validate.c, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  const auto registry_of = [&](const char* name) -> const Registry& {
    for (const auto& [s, reg] : subs)
      if (s->get_name() == name) return *reg;
    throw std::logic_error("unknown subcommand");
  };
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "rates") run_rates(rates, registry_of("rates"), out);
    if (name == "curve") run_curve(curve, registry_of("curve"), out);
    if (name == "contrast") run_contrast(contrast, registry_of("contrast"), out);
    if (name == "pstar") run_pstar(pstar, registry_of("pstar"), out);
    if (name == "embedsim") run_embed(embedsim, registry_of("embedsim"), out);
    if (name == "diagnose") run_diagnose(diagnose, registry_of("diagnose"), out);
    if (name == "perturb") run_perturb(perturb, registry_of("perturb"), out);
    if (name == "validate") run_validate(validate, registry_of("validate"), out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

}  // namespace lpconc::cli
