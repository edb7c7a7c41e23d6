#include "doctest.h"
#include "fixtures.hpp"
#include "mutations.hpp"
#include "pipesched/reports.hpp"

using namespace pipesched;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("empty schedule gives a header-only gantt") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  CHECK(gantt_csv(inst, cat, {}) == "edge,batch,product,start,end,volume\n");
}

TEST_CASE("gantt rows for a full T1 schedule") {
  fixtures::T1 t1;
  t1.horizon = 96;
  t1.capacity = 2000;
  const auto inst = t1.instance();
  const BatchCatalog cat(inst);
  std::vector<std::tuple<std::string, int>> plan;
  for (int k = 0; k < 10; ++k) plan.push_back({"r1/f/100", 30 + 6 * k});
  for (int k = 0; k < 10; ++k) plan.push_back({"r1/s/44", 3 * k});
  const auto rows = lines(gantt_csv(inst, cat, fixtures::chain_of(cat, plan)));
  REQUIRE(rows.size() == 21);
  CHECK(rows[1] == "e1,r1/s/44,s,0,3,44");
  CHECK(rows[20] == "e1,r1/f/100,f,84,90,100");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto start = [](const std::string& r) {
      auto a = r.find(',', r.find(',', r.find(',') + 1) + 1);
      return std::stoi(r.substr(a + 1));
    };
    CHECK(start(rows[i - 1]) < start(rows[i]));
  }
}

TEST_CASE("gantt sorts by edge before start") {
  const auto inst = instance_from_json(fixtures::two_edge_json());
  const BatchCatalog cat(inst);
  const auto rows = lines(gantt_csv(inst, cat, fixtures::chain_of(cat, {{"r2/f/100", 0}, {"r1/f/100", 6}})));
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("e1,r2/f/100,f,0,", 0) == 0);
  CHECK(rows[2].rfind("e1,r1/f/100,f,6,", 0) == 0);
  CHECK(rows[3].rfind("e2,r2/f/100,f,0,", 0) == 0);
}

TEST_CASE("run manifest") {
  RunManifest m;
  m.instance_path = "inst.json";
  m.instance_hash = "abc";
  m.options = {{"lazy", true}};
  m.artifacts = {{"model", "run/model.lp"}};
  m.started_at = utc_timestamp();
  m.finished_at = m.started_at;
  SolveResult r;
  r.status = SolveStatus::optimal;
  r.objective = 12;
  r.gap = 0;
  m.result = r;
  const auto j = nlohmann::json::parse(manifest_json(m));
  CHECK(j["tool"]["name"] == "pipesched");
  CHECK(j["tool"]["version"] == PIPESCHED_VERSION);
  CHECK(j["instance"]["hash"] == "abc");
  CHECK(j["result"]["status"] == "optimal");
  CHECK(j["result"]["gap"] == 0);
  CHECK(j["artifacts"]["model"] == "run/model.lp");
  CHECK(m.started_at.size() == 20);
  CHECK(m.started_at.back() == 'Z');
}

TEST_CASE("experiment summary") {
  ExperimentRow sd{4, "B", "SD", "optimal", 12.5, 0.0, 10800.0, 2160, 321.0, std::nullopt, {}};
  ExperimentRow sdc{4, "B", "SDC", "gap_reached", 20.0, 1e-5, 10799.3, 2160, 222.0, improvement_percent(321, 222), {}};
  const auto j = experiment_json("SDC", "daily", {sd, sdc});
  CHECK(j["outtake_policy"] == "daily");
  CHECK(j["rows"].size() == 2);
  const auto table = experiment_table("SDC", "daily", {sd, sdc});
  CHECK(table.find("outtake policy daily") != std::string::npos);
  CHECK(table.find("30.8") != std::string::npos);
  CHECK(*improvement_percent(321, 222) == doctest::Approx(30.841));
  CHECK_FALSE(improvement_percent(0, 5));
}
