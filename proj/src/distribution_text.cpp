#include "lpconc/distribution_text.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>

#include "lpconc/diagnostics.hpp"
#include "lpconc/errors.hpp"

namespace lpconc {

namespace {

using Params = std::map<std::string, std::string>;

Params parse_params(const std::string& law, const std::string& body) {
  Params out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t eq = body.find('=', pos);
    if (eq == std::string::npos)
      throw InputError(law + ": expected key=value in '" + body.substr(pos) + "'");
    const std::string key = body.substr(pos, eq - pos);
    if (key == "base") {  // swallows the rest, which may contain commas
      out[key] = body.substr(eq + 1);
      break;
    }
    const std::size_t comma = body.find(',', eq);
    const std::size_t end = comma == std::string::npos ? body.size() : comma;
    if (!out.emplace(key, body.substr(eq + 1, end - eq - 1)).second)
      throw InputError(law + ": duplicate key '" + key + "'");
    pos = end + 1;
  }
  return out;
}

double number(const std::string& law, const Params& params, const std::string& key,
              std::optional<double> fallback = std::nullopt) {
  const auto it = params.find(key);
  if (it == params.end()) {
    if (fallback) return *fallback;
    throw InputError(law + ": missing parameter '" + key + "'");
  }
  double v = 0.0;
  const char* first = it->second.data();
  const char* last = first + it->second.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InputError(law + ": parameter '" + key + "' is not a number: '" + it->second + "'");
  return v;
}

void allow_only(const std::string& law, const Params& params,
                std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (const char* key : keys) ok = ok || k == key;
    if (!ok) throw InputError(law + ": unknown parameter '" + k + "'");
  }
}

Distribution load_empirical(const Params& params) {
  const auto path = params.find("path");
  if (path == params.end()) throw InputError("empirical: missing parameter 'path'");
  const auto col_it = params.find("col");
  const std::string col = col_it == params.end() ? "0" : col_it->second;
  const diag::Dataset d = diag::load_csv(path->second);
  std::size_t j = d.cols;
  for (std::size_t k = 0; k < d.cols; ++k)
    if (d.names[k] == col) j = k;
  if (j == d.cols) {
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(col.data(), col.data() + col.size(), idx);
    if (ec != std::errc() || ptr != col.data() + col.size() || idx >= d.cols)
      throw InputError("empirical: no column '" + col + "' in " + path->second);
    j = idx;
  }
  return Distribution::empirical(d.column(j), "path=" + path->second + ",col=" + col);
}

}  // namespace

Distribution parse_distribution(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string law = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  const Params params = parse_params(law, body);
  try {
    if (law == "uniform") {
      allow_only(law, params, {"b"});
      return Distribution::uniform_symmetric(number(law, params, "b", 1.0));
    }
    if (law == "unit") {
      allow_only(law, params, {});
      return Distribution::uniform_unit();
    }
    if (law == "diffuniform") {
      allow_only(law, params, {});
      return Distribution::diff_uniform();
    }
    if (law == "normal") {
      allow_only(law, params, {});
      return Distribution::standard_normal();
    }
    if (law == "twopoint" || law == "threepoint") {
      allow_only(law, params, {"a", "r"});
      const double a = number(law, params, "a"), r = number(law, params, "r", 1.0);
      return law == "twopoint" ? Distribution::two_point(a, r) : Distribution::three_point(a, r);
    }
    if (law == "zeroinflated") {
      allow_only(law, params, {"a", "base"});
      const auto base = params.find("base");
      if (base == params.end()) throw InputError("zeroinflated: missing parameter 'base'");
      return Distribution::zero_inflated(number(law, params, "a"), parse_distribution(base->second));
    }
    if (law == "empirical") {
      allow_only(law, params, {"path", "col"});
      return load_empirical(params);
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(law + ": " + e.what());
  }
  throw InputError("unknown distribution '" + law +
                   "' (expected uniform, unit, diffuniform, normal, twopoint, threepoint, "
                   "zeroinflated, empirical)");
}

}  // namespace lpconc
