#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "pipesched/instance_io.hpp"

using namespace pipesched;

namespace {

bool has_message(const std::vector<Violation>& vs, const std::string& text) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.message.find(text) != std::string::npos; });
}

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("T1 is a valid instance") {
  const auto inst = fixtures::T1{}.instance();
  CHECK(validate_instance(inst).empty());
  CHECK(inst.grid().t_max() == 23);
  CHECK(inst.regime_flush_volume(0) == 100);
}

TEST_CASE("regime path repeating an edge is rejected") {
  auto doc = fixtures::T1{}.json();
  doc["regimes"][0]["edges"] = {"e1", "e1"};
  const auto vs = validate_instance(instance_from_json(doc));
  CHECK(has_message(vs, "regime path not simple"));
}

TEST_CASE("negative initial occupancy is rejected") {
  auto doc = fixtures::T1{}.json();
  doc["sites"][1]["initial"]["f"] = -5;
  const auto vs = validate_instance(instance_from_json(doc));
  CHECK(has_message(vs, "negative initial occupancy"));
}

TEST_CASE("structural violations are reported by code") {
  SUBCASE("duplicate id") {
    auto doc = fixtures::T1{}.json();
    doc["edges"].push_back({{"id", "e1"}, {"from", "R"}, {"to", "A"}, {"pipe_volume", 1}});
    CHECK(has_code(validate_instance(instance_from_json(doc)), "duplicate_id"));
  }
  SUBCASE("disconnected path") {
    auto doc = fixtures::two_edge_json();
    doc["regimes"][1]["edges"] = {"e2", "e1"};
    CHECK(has_code(validate_instance(instance_from_json(doc)), "regime_path_disconnected"));
  }
  SUBCASE("missing standard batch at regime origin") {
    auto doc = fixtures::T1{}.json();
    doc["sites"][0]["standard_batch"].erase("s");
    CHECK(has_code(validate_instance(instance_from_json(doc)), "missing_standard_batch"));
  }
  SUBCASE("minimum above maximum") {
    auto doc = fixtures::T1{}.json();
    doc["sites"][1]["capacity_min"]["f"] = 2000;
    CHECK(has_code(validate_instance(instance_from_json(doc)), "min_exceeds_max"));
  }
  SUBCASE("nomination at a storage site") {
    auto doc = fixtures::T1{}.json();
    doc["nominations"][0]["refinery"] = "A";
    CHECK(has_code(validate_instance(instance_from_json(doc)), "nomination_not_refinery"));
  }
  SUBCASE("outage time outside the horizon") {
    auto doc = fixtures::T1{}.json();
    doc["outages"] = {{{"kind", "tank"}, {"site", "A"}, {"product", "f"}, {"reduction", 5}, {"times", {30}}}};
    CHECK(has_code(validate_instance(instance_from_json(doc)), "time_out_of_range"));
  }
}

TEST_CASE("strict loading rejects unknown keys") {
  auto doc = fixtures::T1{}.json();
  doc["sites"][1]["colour"] = "red";
  CHECK_THROWS_AS(instance_from_json(doc), InstanceError);
  CHECK_NOTHROW(instance_from_json(doc, LoadOptions{false}));
}

TEST_CASE("base deltas accumulate into the base level") {
  auto doc = fixtures::T1{}.json();
  doc["sites"][1]["base_deltas"] = {{{"product", "f"}, {"t", 5}, {"delta", -10}},
                                    {{"product", "f"}, {"t", 10}, {"delta", -15}}};
  const auto inst = instance_from_json(doc);
  const auto& a = inst.sites()[inst.site_at("A")];
  CHECK(a.base_at("f", 4) == 120);
  CHECK(a.base_at("f", 5) == 110);
  CHECK(a.base_at("f", 23) == 95);
  CHECK(a.base_at("s", 23) == 120);
}

TEST_CASE("serialization round trip is stable") {
  auto doc = fixtures::two_edge_json();
  doc["sites"][1]["base_deltas"] = {{{"product", "s"}, {"t", 3}, {"delta", -4}}};
  doc["outages"] = {{{"kind", "transport"}, {"batches", {{{"regime", "r1"}}}}, {"times", {{"from", 2}, {"to", 4}}}}};
  const auto a = instance_from_json(doc);
  const auto text = dump_instance(a);
  const auto b = parse_instance(text);
  CHECK(dump_instance(b) == text);
  CHECK(instance_hash(a) == instance_hash(b));
  CHECK(b.data().transport_outages.at(0).times == std::vector<int>{2, 3, 4});
}

TEST_CASE("malformed documents raise InstanceError") {
  CHECK_THROWS_AS(parse_instance("{"), std::exception);
  CHECK_THROWS_AS(parse_instance("{\"horizon\": {\"steps\": 4}}"), InstanceError);
}
