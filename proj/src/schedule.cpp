#include "pipesched/schedule.hpp"

#include <algorithm>

namespace pipesched {

void Schedule::normalize() {
  std::sort(placements.begin(), placements.end());
  placements.erase(std::unique(placements.begin(), placements.end()), placements.end());
}

bool Schedule::contains(const Placement& p) const {
  return std::binary_search(placements.begin(), placements.end(), p);
}

Schedule schedule_from_initial(const BatchCatalog& catalog, std::vector<Placement> initial) {
  Schedule s;
  for (const auto& p : initial)
    for (auto e : catalog.chain(p.batch)) s.placements.push_back({e, p.batch, p.start});
  s.normalize();
  return s;
}

std::vector<Placement> initial_placements(const BatchCatalog& catalog, const Schedule& schedule) {
  std::vector<Placement> out;
  for (const auto& p : schedule.placements)
    if (catalog.initial_edge(p.batch) == p.edge) out.push_back(p);
  return out;
}

nlohmann::ordered_json schedule_to_json(const Instance& instance, const BatchCatalog& catalog,
                                        const Schedule& schedule) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& p : schedule.placements)
    rows.push_back({{"edge", instance.edges().at(p.edge).id}, {"batch", catalog.spec(p.batch).id}, {"t", p.start}});
  return nlohmann::ordered_json{{"placements", std::move(rows)}};
}

Schedule schedule_from_json(const Instance& instance, const BatchCatalog& catalog, const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("placements") || !doc["placements"].is_array())
    throw InstanceError("schedule document needs a 'placements' array");
  Schedule s;
  for (const auto& row : doc["placements"]) {
    if (!row.is_object() || !row.contains("edge") || !row.contains("batch") || !row.contains("t"))
      throw InstanceError("schedule placement needs 'edge', 'batch' and 't'");
    auto b = catalog.find(row["batch"].get<std::string>());
    if (!b) throw InstanceError("schedule references unknown batch '" + row["batch"].get<std::string>() + "'");
    s.placements.push_back({instance.edge_at(row["edge"].get<std::string>()), *b, row["t"].get<int>()});
  }
  s.normalize();
  return s;
}

}  // namespace pipesched
