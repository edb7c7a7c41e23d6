#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pipesched/generator.hpp"
#include "pipesched/oracle.hpp"
#include "pipesched/solver.hpp"
#include "pipesched/util.hpp"

using namespace pipesched;

namespace {

fixtures::T1 small(Volume f, Volume s) {
  fixtures::T1 t1;
  t1.horizon = 12;
  t1.nominated_f = f;
  t1.nominated_s = s;
  return t1;
}

}  // namespace

TEST_CASE("T1-small: one flush and one stain") {
  const auto inst = small(100, 44).instance();
  const auto res = brute_force_optimum(inst);
  REQUIRE_FALSE(res.budget_exceeded);
  REQUIRE(res.feasible);
  CHECK(res.objective == 144);
  const BatchCatalog cat(inst);
  CHECK(res.schedule.size() == 2);
  CHECK(check_schedule(inst, cat, res.schedule).clean());
  // Lexicographically smallest optimum: the stain first, then its flush.
  CHECK(res.schedule.placements[0].batch == *cat.find("r1/f/100"));
  CHECK(res.schedule.placements[0].start == 3);
}

TEST_CASE("zero nomination gives zero") {
  const auto res = brute_force_optimum(small(0, 0).instance());
  REQUIRE(res.feasible);
  CHECK(res.objective == 0);
  CHECK(res.schedule.empty());
}

TEST_CASE("nothing placeable returns the constant term") {
  fixtures::T1 t1;
  t1.horizon = 2;
  auto doc = t1.json();
  doc["weights"]["gamma"] = 3;
  doc["weights"]["previous_plan"] = {{{"edge", "e1"}, {"batch", "r1/s/44"}, {"t", 0}}};
  const auto res = brute_force_optimum(instance_from_json(doc));
  REQUIRE(res.feasible);
  CHECK(res.schedule.empty());
  CHECK(res.objective == -3);
}

TEST_CASE("node budget yields the sentinel") {
  OracleLimits limits;
  limits.node_budget = 5;
  const auto res = brute_force_optimum(small(1000, 440).instance(), limits);
  CHECK(res.budget_exceeded);
  CHECK_FALSE(res.feasible);
}

TEST_CASE("size limits are enforced") {
  const auto inst = instance_from_json(fixtures::two_edge_json());
  OracleLimits one_edge;
  one_edge.max_edges = 1;
  CHECK_THROWS_AS(brute_force_optimum(inst, one_edge), OracleError);
  fixtures::T1 t1;
  t1.horizon = 30;
  CHECK_THROWS_AS(brute_force_optimum(t1.instance()), OracleError);
  OracleLimits few;
  few.max_candidates = 10;
  CHECK_THROWS_AS(brute_force_optimum(small(100, 44).instance(), few), OracleError);
}

TEST_CASE("golden oracle instance for seed 0") {
  const auto golden = read_text_file(PIPESCHED_TEST_DATA "/oracle_seed0.json");
  const auto inst = generate_oracle_instance(0);
  CHECK(dump_instance(inst) == golden);
  const auto res = brute_force_optimum(inst);
  REQUIRE(res.feasible);
  CHECK(res.objective == 90);
}

TEST_CASE("no clean schedule beats the oracle") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = generate_oracle_instance(seed);
    const BatchCatalog cat(inst);
    const auto best = brute_force_optimum(inst);
    REQUIRE_FALSE(best.budget_exceeded);
    std::vector<Placement> all;
    for (std::size_t b = 0; b < cat.specs().size(); ++b)
      for (int t = 0; t + cat.spec(b).length <= inst.grid().horizon_len; ++t) all.push_back({cat.initial_edge(b), b, t});
    for (int round = 0; round < 300; ++round) {
      std::vector<Placement> pick;
      for (const auto& p : all)
        if (rng() % 6 == 0) pick.push_back(p);
      const auto s = schedule_from_initial(cat, pick);
      if (!check_schedule(inst, cat, s).clean()) continue;
      CHECK(best.feasible);
      CHECK(evaluate_objective(inst, cat, s).total <= best.objective);
    }
  }
}

TEST_CASE("oracle agrees with the solver on the golden instance" * doctest::skip(!fixtures::solver_available())) {
  const auto inst = generate_oracle_instance(0);
  const BatchCatalog cat(inst);
  SolverConfig config;
  config.gap = 0;
  config.keep_files = false;
  const auto res = solve(inst, cat, build_model(inst, cat), config);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(evaluate_objective(inst, cat, *res.schedule).total == brute_force_optimum(inst).objective);
}
