#pragma once

#include <compare>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesched/batch_catalog.hpp"
#include "pipesched/instance.hpp"

namespace pipesched {

// v_ebt = 1 for this (edge, batch, start).
struct Placement {
  std::size_t edge = 0;
  std::size_t batch = 0;
  int start = 0;

  auto operator<=>(const Placement&) const = default;
};

// Support of the placement variables on every edge, kept sorted and unique.
struct Schedule {
  std::vector<Placement> placements;

  void normalize();
  bool contains(const Placement& p) const;
  std::size_t size() const { return placements.size(); }
  bool empty() const { return placements.empty(); }
};

// Expands placements on initial edges into full regime chains.
Schedule schedule_from_initial(const BatchCatalog& catalog, std::vector<Placement> initial);
std::vector<Placement> initial_placements(const BatchCatalog& catalog, const Schedule& schedule);

nlohmann::ordered_json schedule_to_json(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule);
Schedule schedule_from_json(const Instance& instance, const BatchCatalog& catalog, const nlohmann::json& doc);

}  // namespace pipesched
