#pragma once

#include <cstdlib>
#include <string>

#include "json.hpp"
#include "pipesched/instance_io.hpp"

namespace fixtures {

using ojson = nlohmann::ordered_json;

// T1: refinery R, storage A, edge e1 R->A, regime r1 over (e1).
// Flush f is 100 units in 6 steps, stain s is 44 units in 3 steps.
struct T1 {
  int horizon = 24;
  pipesched::Volume nominated_f = 1000;
  pipesched::Volume nominated_s = 440;
  pipesched::Volume capacity = 1000;
  pipesched::Volume initial = 120;
  pipesched::Volume pipe_volume = 100;
  double alpha = 1, theta = 0;

  ojson json() const {
    ojson doc;
    doc["horizon"] = {{"steps", horizon}, {"step_hours", 1}};
    doc["products"] = ojson::array({{{"id", "f"}, {"kind", "flushing"}, {"unit_volume", 1}},
                                     {{"id", "s"}, {"kind", "staining"}, {"unit_volume", 1}}});
    doc["sites"] = ojson::array({{{"id", "R"}, {"kind", "refinery"}, {"standard_batch", {{"f", 100}, {"s", 44}}}},
                                  {{"id", "A"},
                                   {"kind", "storage"},
                                   {"capacity_max", {{"f", capacity}, {"s", capacity}}},
                                   {"capacity_min", {{"f", 0}, {"s", 0}}},
                                   {"initial", {{"f", initial}, {"s", initial}}}}});
    doc["edges"] = ojson::array({{{"id", "e1"}, {"from", "R"}, {"to", "A"}, {"pipe_volume", pipe_volume}}});
    doc["regimes"] = ojson::array(
        {{{"id", "r1"}, {"edges", {"e1"}}, {"flow_rate", {{"f", "100/6"}, {"s", "44/3"}}}, {"step_cost", 1}}});
    doc["nominations"] = ojson::array({{{"refinery", "R"},
                                        {"limits", ojson::array({{{"product", "f"}, {"volume", nominated_f}},
                                                                 {{"product", "s"}, {"volume", nominated_s}}})}}});
    doc["weights"] = {{"alpha", alpha}, {"theta", theta}};
    return doc;
  }
  pipesched::Instance instance() const { return pipesched::instance_from_json(json()); }
};

// Two storage sites on a path R -e1-> A -e2-> B with r1 over (e1) and r2 over (e1, e2).
inline ojson two_edge_json(int horizon = 24) {
  T1 base;
  base.horizon = horizon;
  auto doc = base.json();
  doc["sites"].push_back({{"id", "B"},
                          {"kind", "storage"},
                          {"capacity_max", {{"f", 1000}, {"s", 1000}}},
                          {"initial", {{"f", 50}, {"s", 50}}}});
  doc["edges"].push_back({{"id", "e2"}, {"from", "A"}, {"to", "B"}, {"pipe_volume", 100}});
  doc["regimes"].push_back(
      {{"id", "r2"}, {"edges", {"e1", "e2"}}, {"flow_rate", {{"f", "100/6"}, {"s", "44/3"}}}, {"step_cost", 2}});
  return doc;
}

inline bool solver_available() {
  const char* s = std::getenv("PIPESCHED_SOLVER");
  return s && *s;
}

}  // namespace fixtures
