#pragma once

// JSON and CSV encodings of the result types. Non-finite numbers become the
// strings "inf", "-inf" and "nan" so every payload is valid JSON.

#include <string>

#include <json.hpp>

#include "lpconc/anti_concentration.hpp"
#include "lpconc/diagnostics.hpp"
#include "lpconc/distributions.hpp"
#include "lpconc/monte_carlo.hpp"
#include "lpconc/rate_engine.hpp"

namespace lpconc {

inline constexpr int kSchemaVersion = 1;

nlohmann::json json_number(double x);

/// Shortest round-trip decimal form; "inf", "-inf" or "nan" when non-finite.
std::string format_number(double x);

nlohmann::json to_json(const MomentReport& r);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const rate::RateResult& r);
nlohmann::json to_json(const anticonc::AntiConcReport& r);
nlohmann::json to_json(const anticonc::BerryEsseenBounds& b);
nlohmann::json to_json(const mc::Frequency& f);
nlohmann::json to_json(const mc::ConcentrationGrid& g);
nlohmann::json to_json(const mc::ContrastSummary& s);
nlohmann::json to_json(const diag::PerturbReport& r);

}  // namespace lpconc
