#pragma once

// JSON parsing/serialization for markets, priors, polyhedral markets,
// claims, and class-set families. Rationals travel as strings "p/q" (never
// floats). Parse errors throw JsonError with a named field.

#include <json.hpp>

#include <string>
#include <vector>

#include "rfm/market.hpp"
#include "rfm/oneperiod_poly.hpp"
#include "rfm/priors.hpp"

namespace rfm {

struct JsonError : std::runtime_error {
  std::string code;  // ParseError or SchemaError
  JsonError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

nlohmann::json load_json_file(const std::string& path);

Market market_from_json(const nlohmann::json& j);
PriorSet priors_from_json(const nlohmann::json& j, const Market& m,
                          const LevelSetPartition& part);
PolyMarket poly_from_json(const nlohmann::json& j);
PayoffVector claim_from_json(const nlohmann::json& j, const Market& m,
                             std::string* name = nullptr);
std::vector<PathSet> class_sets_from_json(const nlohmann::json& j,
                                          const Market& m);

// Path-id helpers.
std::size_t path_index(const Market& m, const std::string& id);

// Serialization helpers.
nlohmann::json rat_json(const Rat& r);            // string "p/q"
nlohmann::json ratvec_json(const RatVec& v);
nlohmann::json pathset_json(const Market& m, const PathSet& s);  // ids
nlohmann::json measure_json(const Market& m, const Measure& q);
nlohmann::json strategy_json(const Market& m, const LevelSetPartition& part,
                             const Strategy& s);
nlohmann::json lp_outcome_json(const LpOutcome& out);

}  // namespace rfm
