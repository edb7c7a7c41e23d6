#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mutations.hpp"
#include "pipesched/validator.hpp"

using namespace pipesched;
using fixtures::chain_of;

TEST_CASE("empty schedule leaves the base levels") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto series = simulate_occupancy(inst, cat, {});
  REQUIRE(series.tracks.size() == 2);
  for (const auto& tr : series.tracks) {
    CHECK(tr.upper == std::vector<Volume>(24, 120));
    CHECK(tr.lower == std::vector<Volume>(24, 120));
  }
  CHECK(check_schedule(inst, cat, {}).clean());
  const auto obj = evaluate_objective(inst, cat, {});
  CHECK(obj.inflow == 0);
  CHECK(obj.total == 0);
}

TEST_CASE("inbound flush jumps blocked and on-stock levels at start and completion") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto series = simulate_occupancy(inst, cat, chain_of(cat, {{"r1/f/100", 2}}));
  const auto* tr = series.find(inst.site_at("A"), inst.product_at("f"));
  REQUIRE(tr);
  CHECK(tr->upper[1] == 120);
  CHECK(tr->upper[2] == 220);
  CHECK(tr->lower[7] == 120);
  CHECK(tr->lower[8] == 220);
}

TEST_CASE("simultaneous inflow and outflow net out after both batches finish") {
  auto doc = fixtures::two_edge_json();
  doc["sites"][1]["standard_batch"] = {{"f", 100}};
  doc["regimes"].push_back({{"id", "r3"}, {"edges", {"e2"}}, {"flow_rate", {{"f", "100/6"}}}});
  const auto inst = instance_from_json(doc);
  const BatchCatalog cat(inst);
  const auto series = simulate_occupancy(inst, cat, chain_of(cat, {{"r1/f/100", 0}, {"r3/f/100", 0}}));
  const auto* a = series.find(inst.site_at("A"), inst.product_at("f"));
  for (int t = 0; t < 6; ++t) {
    CHECK(a->upper[t] == 220);
    CHECK(a->lower[t] == 20);
  }
  for (int t = 6; t < 24; ++t) {
    CHECK(a->upper[t] == 120);
    CHECK(a->lower[t] == 120);
  }
}

TEST_CASE("placements outside the horizon or off the path") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto f = *cat.find("r1/f/100");
  Schedule late{{{0, f, 19}}};
  CHECK_THROWS_AS(simulate_occupancy(inst, cat, late), ValidationError);
  CHECK(check_schedule(inst, cat, late).count(Family::horizon_fit) == 1);
  // Ending exactly at the horizon is fine.
  CHECK(check_schedule(inst, cat, Schedule{{{0, f, 18}}}).clean());
}

TEST_CASE("defined mutations each break their family") {
  for (const auto& m : fixtures::mutations()) {
    CAPTURE(m.name);
    const auto inst = instance_from_json(m.doc);
    REQUIRE(validate_instance(inst).empty());
    const BatchCatalog cat(inst);
    const auto base = check_schedule(inst, cat, m.base(cat));
    CHECK(base.clean());
    const auto broken = check_schedule(inst, cat, m.mutated(cat));
    CHECK(broken.count(m.family) >= 1);
  }
}

TEST_CASE("overlap is reported at the overlapped step") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto f = "r1/f/100";
  const auto rep = check_schedule(inst, cat, chain_of(cat, {{f, 1}, {f, 6}}));
  REQUIRE(rep.count(Family::packing) == 1);
  CHECK(rep.items[0].coordinate == "e1@6");
}

TEST_CASE("J_N of the full nomination") {
  fixtures::T1 t1;
  t1.horizon = 96;
  t1.capacity = 2000;
  const auto inst = t1.instance();
  const BatchCatalog cat(inst);
  std::vector<std::tuple<std::string, int>> plan;
  for (int k = 0; k < 10; ++k) plan.push_back({"r1/s/44", 3 * k});
  for (int k = 0; k < 10; ++k) plan.push_back({"r1/f/100", 30 + 6 * k});
  const auto sched = chain_of(cat, plan);
  CHECK(check_schedule(inst, cat, sched).clean());
  const auto obj = evaluate_objective(inst, cat, sched);
  CHECK(obj.inflow == 1440);
  CHECK(intake_volume(inst, cat, sched) == 1440);
  // step_cost 1: 10 * 3 + 10 * 6 steps.
  CHECK(pumping_cost(inst, cat, sched) == 90);
}

TEST_CASE("re-planning and distribution terms") {
  auto doc = fixtures::T1{}.json();
  doc["weights"] = {{"alpha", 1},
                    {"beta", 1},
                    {"gamma", 2},
                    {"distribution_targets",
                     {{{"site", "A"}, {"product", "f"}, {"optimum", 200}, {"k", 3}},
                      {{"site", "A"}, {"product", "s"}, {"k_prime", 0.5}}}},
                    {"previous_plan", {{{"edge", "e1"}, {"batch", "r1/f/100"}, {"t", 0}}}}};
  const auto inst = instance_from_json(doc);
  const BatchCatalog cat(inst);
  SUBCASE("schedule equal to the previous plan") {
    const auto obj = evaluate_objective(inst, cat, chain_of(cat, {{"r1/f/100", 0}}));
    CHECK(obj.replanning == 0);
    // |220 - 200| * 3 off the optimum, 0.5 * 120 for the k' target.
    CHECK(obj.distribution == Rational(-60 + 60));
    CHECK(obj.total == Rational(100));
  }
  SUBCASE("dropping the previous plan costs one unit") {
    const auto obj = evaluate_objective(inst, cat, {});
    CHECK(obj.replanning == -1);
    CHECK(obj.distribution == Rational(-240 + 60));
    CHECK(obj.total == Rational(-2 - 180));
  }
}

TEST_CASE("exact weights") {
  CHECK(to_rational(0.003) == Rational(3, 1000));
  CHECK(to_rational(-2.5) == Rational(-5, 2));
  CHECK(to_rational(1e-7) == Rational(1, 10000000));
}

TEST_CASE("adding an inbound placement never lowers blocked occupancy") {
  fixtures::T1 t1;
  t1.horizon = 48;
  const auto inst = t1.instance();
  const BatchCatalog cat(inst);
  std::mt19937_64 rng(7);
  const auto f = *cat.find("r1/f/100");
  const auto s = *cat.find("r1/s/44");
  for (int round = 0; round < 200; ++round) {
    std::vector<Placement> initial;
    for (int k = 0; k < 4; ++k) {
      const auto b = rng() % 2 ? f : s;
      initial.push_back({0, b, static_cast<int>(rng() % (48 - cat.spec(b).length + 1))});
    }
    const Placement extra{0, rng() % 2 ? f : s, static_cast<int>(rng() % 40)};
    const auto before = simulate_occupancy(inst, cat, schedule_from_initial(cat, initial));
    initial.push_back(extra);
    const auto after = simulate_occupancy(inst, cat, schedule_from_initial(cat, initial));
    for (std::size_t k = 0; k < before.tracks.size(); ++k)
      for (int t = extra.start; t < 48; ++t) CHECK(after.tracks[k].upper[t] >= before.tracks[k].upper[t]);
  }
}

TEST_CASE("report renderings") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto rep = check_schedule(inst, cat, chain_of(cat, {{"r1/s/44", 0}}));
  const auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j["clean"] == false);
  CHECK(j["violations"][0]["family"] == "flushing");
  CHECK(report_table(rep).find("flushing") != std::string::npos);
  CHECK(rep.counting_error_bound == std::vector<std::pair<std::string, Volume>>{{"A", 100}});
  const auto csv = occupancy_csv(inst, simulate_occupancy(inst, cat, {}));
  CHECK(csv.rfind("site,product,t,lower,upper\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 24);
}
