#pragma once

#include <functional>

#include "fixtures.hpp"
#include "pipesched/batch_catalog.hpp"
#include "pipesched/schedule.hpp"
#include "pipesched/validator.hpp"

namespace fixtures {

// A clean schedule and a single edit of it that must break one family.
struct Mutation {
  std::string name;
  pipesched::Family family;
  ojson doc;
  std::function<pipesched::Schedule(const pipesched::BatchCatalog&)> base, mutated;
};

inline pipesched::Schedule chain_of(const pipesched::BatchCatalog& cat,
                                    std::vector<std::tuple<std::string, int>> initial) {
  std::vector<pipesched::Placement> out;
  for (const auto& [id, t] : initial) {
    const auto b = *cat.find(id);
    out.push_back({cat.initial_edge(b), b, t});
  }
  return pipesched::schedule_from_initial(cat, std::move(out));
}

inline std::vector<Mutation> mutations() {
  using pipesched::Family;
  using S = std::vector<std::tuple<std::string, int>>;
  auto fixed = [](S s) { return [s](const pipesched::BatchCatalog& cat) { return chain_of(cat, s); }; };
  const std::string f = "r1/f/100", s = "r1/s/44";
  std::vector<Mutation> out;

  out.push_back({"overlap shift", Family::packing, T1{}.json(), fixed({{f, 0}, {f, 6}, {f, 12}, {f, 18}}),
                 fixed({{f, 1}, {f, 6}, {f, 12}, {f, 18}})});
  out.push_back({"flush removal", Family::flushing, T1{}.json(), fixed({{s, 0}, {f, 3}}), fixed({{s, 0}})});
  {
    auto doc = T1{}.json();
    doc["products"].push_back({{"id", "g"}, {"kind", "staining"}, {"unit_volume", 1}});
    doc["sites"][0]["standard_batch"]["g"] = 44;
    doc["sites"][1]["capacity_max"]["g"] = 1000;
    doc["sites"][1]["capacity_min"]["g"] = 0;
    doc["sites"][1]["initial"]["g"] = 0;
    doc["regimes"][0]["flow_rate"]["g"] = "44/3";
    out.push_back({"stain after stain", Family::flushing, doc, fixed({{s, 0}, {f, 3}}),
                   fixed({{s, 0}, {"r1/g/44", 3}, {f, 6}})});
  }
  {
    T1 t1;
    t1.capacity = 300;
    out.push_back({"capacity overfill", Family::capacity_upper, t1.json(), fixed({{f, 0}}), fixed({{f, 0}, {f, 6}})});
  }
  {
    T1 t1;
    t1.nominated_f = 100;
    out.push_back({"nomination overshoot", Family::nomination, t1.json(), fixed({{f, 0}}), fixed({{f, 0}, {f, 6}})});
  }
  {
    auto doc = T1{}.json();
    doc["outages"] = {{{"kind", "transport"}, {"batches", {{{"product", "f"}}}}, {"times", {6}}}};
    out.push_back({"outage violation", Family::outage, doc, fixed({{f, 0}}), fixed({{f, 0}, {f, 6}})});
  }
  {
    auto doc = T1{}.json();
    doc["limits"] = {{{"edges", {"e1"}}, {"product", "f"}, {"window", {{"from", 0}, {"to", 23}}}, {"limit", 150}}};
    out.push_back({"throughput overshoot", Family::throughput, doc, fixed({{f, 0}}), fixed({{f, 0}, {f, 6}})});
  }
  out.push_back({"route desync", Family::routes, two_edge_json(), fixed({{"r2/f/100", 0}}),
                 [](const pipesched::BatchCatalog& cat) {
                   auto sched = chain_of(cat, {{"r2/f/100", 0}});
                   // Move the downstream leg one step later.
                   for (auto& p : sched.placements)
                     if (p.edge == 1) ++p.start;
                   sched.normalize();
                   return sched;
                 }});
  {
    auto doc = T1{}.json();
    doc["fixed_transports"] = {{{"regime", "r1"}, {"product", "s"}, {"start", 4}}};
    out.push_back({"fixed-transport drop", Family::fixed, doc, fixed({{s, 4}, {f, 7}}), fixed({{f, 7}})});
  }
  {
    auto doc = T1{}.json();
    doc["weights"]["gamma"] = 1;
    doc["weights"]["previous_plan"] = {{{"edge", "e1"}, {"batch", f}, {"t", 0}, {"executed", true}},
                                       {{"edge", "e1"}, {"batch", f}, {"t", 6}, {"executed", false}}};
    out.push_back({"executed-prefix drop", Family::fixed, doc, fixed({{f, 0}, {f, 6}}), fixed({{f, 6}})});
  }
  return out;
}

}  // namespace fixtures
