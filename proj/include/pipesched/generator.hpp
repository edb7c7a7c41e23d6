#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesched/instance.hpp"

namespace pipesched {

enum class Setting { A, B, C };
enum class CostMode { SD, SDC };
enum class OuttakePolicy { daily, front_loaded, uniform_hourly };

const char* setting_name(Setting s);
const char* cost_mode_name(CostMode m);
const char* outtake_policy_name(OuttakePolicy p);
std::optional<Setting> setting_from_name(std::string_view s);
std::optional<CostMode> cost_mode_from_name(std::string_view s);
std::optional<OuttakePolicy> outtake_policy_from_name(std::string_view s);

struct PathExperimentParams {
  int vertices = 4;  // l: refinery plus l-1 storage sites
  Setting setting = Setting::A;
  CostMode cost_mode = CostMode::SD;
  OuttakePolicy outtake = OuttakePolicy::daily;
  std::uint64_t seed = 0;
  // Overrides for ad-hoc profiles.
  std::optional<int> horizon;
  std::optional<Volume> capacity_max;
};

struct GeneratedInstance {
  Instance instance;
  std::vector<std::string> warnings;  // analytic pre-check findings
};

// Staining batches each storage site must receive to cover its outtake, summed
// over sites, against the nominated count. Returns a warning when short.
std::optional<std::string> demand_precheck(const Instance& instance);

nlohmann::ordered_json path_instance_json(const PathExperimentParams& params);
GeneratedInstance generate_path_instance(const PathExperimentParams& params);

struct OracleLimits {
  int max_edges = 2;
  int max_horizon = 24;
  std::size_t max_candidates = 400;
  std::size_t node_budget = 200000;
};

Instance generate_oracle_instance(std::uint64_t seed, const OracleLimits& limits = {});

// Suite manifest: one row per generated instance.
struct ManifestEntry {
  std::string path;
  nlohmann::ordered_json params;
  std::string hash;
};
std::string manifest_json(const std::vector<ManifestEntry>& entries);

}  // namespace pipesched
