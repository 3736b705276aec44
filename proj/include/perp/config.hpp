#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perp/model.hpp"

namespace perp {

/// Thresholds for `verify`. Unset values are resolved per regime by
/// resolve_thresholds().
struct Thresholds {
  std::optional<double> final_ks;
  double monotone_slack = 0.01;
  double variance_rel_tol = 0.05;
};

/// A run description. Every key is optional except `model`; commands check
/// the ones they need.
struct RunConfig {
  Family model;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
  std::optional<unsigned> series_terms;
  Thresholds thresholds;
  bool export_samples = false;
};

/// Strict parse: unknown keys, wrong types and missing required keys throw
/// InvalidInput naming the offending path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const Family& model);
nlohmann::json to_json(const RunConfig& config);

Family parse_model(const nlohmann::json& doc);

}  // namespace perp
