#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "pipesched/instance.hpp"

namespace pipesched {

struct LoadOptions {
  // Reject keys the format does not define, at every nesting level.
  bool strict = true;
};

Instance instance_from_json(const nlohmann::json& doc, const LoadOptions& options = {});
Instance parse_instance(const std::string& text, const LoadOptions& options = {});
Instance load_instance(const std::filesystem::path& path, const LoadOptions& options = {});

// Canonical serialization; base occupancy is written back as initial level
// plus step deltas, capacities collapse to scalars when constant.
nlohmann::ordered_json instance_to_json(const Instance& instance);
std::string dump_instance(const Instance& instance);
void save_instance(const Instance& instance, const std::filesystem::path& path);

// FNV-1a over the canonical serialization.
std::string instance_hash(const Instance& instance);

}  // namespace pipesched
