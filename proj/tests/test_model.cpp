#include "doctest.h"
#include "fixtures.hpp"
#include "model_check.hpp"
#include "pipesched/instance_io.hpp"

using namespace pipesched;
using fixtures::ojson;

namespace {

Schedule chain(const BatchCatalog& cat, std::vector<Placement> initial) {
  return schedule_from_initial(cat, std::move(initial));
}

}  // namespace

TEST_CASE("T1 variable and row counts") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto model = build_model(inst, cat);
  CHECK(model.metadata.placement_vars == 19 + 22);
  CHECK(model.metadata.occupancy_vars == 96);
  CHECK(model.metadata.endpoint_vars == 22);  // stain endpoints at t = 3..24
  CHECK(model.metadata.deviation_vars == 0);
  CHECK(model.count(Family::packing) == 24);
  CHECK(model.count(Family::routes) == 0);
  CHECK(model.count(Family::capacity_definition) == 96);
  CHECK(model.count(Family::capacity_upper) == 48);
  CHECK(model.count(Family::capacity_lower) == 48);
  CHECK(model.count(Family::flushing) == 3 * 22);
  CHECK(model.count(Family::nomination) == 2);
  CHECK(model.count(Family::exclusion) == 0);
}

TEST_CASE("batches longer than the horizon get no variables") {
  fixtures::T1 t1;
  t1.horizon = 1;
  const auto inst = t1.instance();
  const BatchCatalog cat(inst);
  CHECK(build_variables(cat, inst).size() == 2 * 2 * 1);  // occupancy only
}

TEST_CASE("lazy capacity only flips flags") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  ModelOptions lazy;
  lazy.capacity_lazy = true;
  const auto a = build_model(inst, cat);
  const auto b = build_model(inst, cat, lazy);
  REQUIRE(a.constraints.size() == b.constraints.size());
  CHECK(a.vars.size() == b.vars.size());
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    CHECK(a.constraints[i].terms.size() == b.constraints[i].terms.size());
    if (a.constraints[i].lazy != b.constraints[i].lazy) ++flipped;
  }
  CHECK(flipped == 96);
  CHECK(b.active_count() == a.active_count() - 96);
}

TEST_CASE("route equalities per valid start") {
  const auto inst = instance_from_json(fixtures::two_edge_json());
  const BatchCatalog cat(inst);
  const auto model = build_model(inst, cat);
  // r2: f/100 (L=6), f/200 (L=12), s/44 (L=3), one equality per start.
  CHECK(model.count(Family::routes) == 19 + 13 + 22);
  const auto vars = build_variables(cat, inst);
  std::vector<LinearConstraint> rows;
  emit_routes(cat, inst, vars, rows);
  const auto b = *cat.find("r2/f/100");
  std::size_t for_b = 0;
  for (const auto& r : rows)
    for (const auto& t : r.terms)
      if (vars.at(t.var).second == b && vars.at(t.var).first == 0) ++for_b;
  CHECK(for_b == 19);
}

TEST_CASE("capacity definitions follow start and completion counting") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto model = build_model(inst, cat);
  const auto f = *cat.find("r1/f/100");
  const auto x = fixtures::assignment(inst, cat, model, chain(cat, {{0, f, 2}}));
  CHECK(fixtures::satisfies_all(model, x));
  const auto A = inst.site_at("A"), pf = inst.product_at("f");
  CHECK(x[*model.vars.occupancy_upper(A, pf, 1)] == 120);
  CHECK(x[*model.vars.occupancy_upper(A, pf, 2)] == 220);
  CHECK(x[*model.vars.occupancy_lower(A, pf, 7)] == 120);
  CHECK(x[*model.vars.occupancy_lower(A, pf, 8)] == 220);
}

TEST_CASE("both capacity forms describe the same feasible set") {
  fixtures::T1 t1;
  t1.horizon = 9;
  t1.capacity = 230;
  const auto inst = t1.instance();
  const BatchCatalog cat(inst);
  ModelOptions cumulative;
  cumulative.capacity_form = CapacityForm::cumulative;
  const auto inc = build_model(inst, cat);
  const auto cum = build_model(inst, cat, cumulative);
  const auto cands = fixtures::initial_candidates(inst, cat);
  REQUIRE(cands.size() < 14);
  for (std::uint32_t mask = 0; mask < (1u << cands.size()); ++mask) {
    std::vector<Placement> chosen;
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (mask & (1u << i)) chosen.push_back(cands[i]);
    const auto s = chain(cat, chosen);
    CHECK(fixtures::satisfies_all(inc, fixtures::assignment(inst, cat, inc, s)) ==
          fixtures::satisfies_all(cum, fixtures::assignment(inst, cat, cum, s)));
  }
}

TEST_CASE("flushing rows") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto model = build_model(inst, cat);
  const auto f = *cat.find("r1/f/100");
  const auto s = *cat.find("r1/s/44");
  auto ok = [&](std::vector<Placement> p) {
    return fixtures::satisfies_all(model, fixtures::assignment(inst, cat, model, chain(cat, std::move(p))));
  };
  CHECK_FALSE(ok({{0, s, 0}}));               // stain left alone
  CHECK(ok({{0, s, 0}, {0, f, 3}}));          // flushed at its endpoint
  CHECK(ok({{0, s, 0}, {0, s, 3}, {0, f, 6}}));
  CHECK_FALSE(ok({{0, s, 0}, {0, f, 4}}));    // flush one step late

  fixtures::T1 none;
  auto doc = none.json();
  doc["products"].erase(1);
  doc["sites"][0]["standard_batch"].erase("s");
  doc["sites"][1]["capacity_max"].erase("s");
  doc["sites"][1]["capacity_min"].erase("s");
  doc["sites"][1]["initial"].erase("s");
  doc["regimes"][0]["flow_rate"].erase("s");
  doc["nominations"][0]["limits"].erase(1);
  const auto plain = instance_from_json(doc);
  const BatchCatalog pc(plain);
  CHECK(build_model(plain, pc).count(Family::flushing) == 0);
}

TEST_CASE("terminal flush relaxation") {
  const auto inst = fixtures::T1{}.instance();
  const BatchCatalog cat(inst);
  const auto s = *cat.find("r1/s/44");
  ModelOptions relaxed;
  relaxed.semantics.relax_terminal_flush = true;
  const auto strict_model = build_model(inst, cat);
  const auto relaxed_model = build_model(inst, cat, relaxed);
  // Stain ending at the horizon: nothing fits after it.
  const auto late = chain(cat, {{0, s, 21}});
  CHECK_FALSE(fixtures::satisfies_all(strict_model, fixtures::assignment(inst, cat, strict_model, late)));
  CHECK(fixtures::satisfies_all(relaxed_model, fixtures::assignment(inst, cat, relaxed_model, late)));
  CHECK(check_schedule(inst, cat, late, relaxed.semantics).clean());
  CHECK_FALSE(check_schedule(inst, cat, late).clean());
}

TEST_CASE("regime exclusion window") {
  auto doc = fixtures::T1{}.json();
  doc["sites"].push_back({{"id", "B"}, {"kind", "storage"}});
  doc["sites"][0]["standard_batch"] = {{"f", 100}, {"s", 44}};
  doc["edges"].push_back({{"id", "e2"}, {"from", "R"}, {"to", "B"}, {"pipe_volume", 44}});
  doc["regimes"].push_back({{"id", "r2"}, {"edges", {"e2"}}, {"flow_rate", {{"f", "100/6"}, {"s", "44/3"}}}});
  doc["exclusion_groups"] = {{{"members", {"r1", "r2"}}}};
  const auto inst = instance_from_json(doc);
  const BatchCatalog cat(inst);
  const auto model = build_model(inst, cat);
  CHECK(model.count(Family::exclusion) == 24);
  const auto s1 = *cat.find("r1/s/44");
  const auto s2 = *cat.find("r2/s/44");
  const auto f1 = *cat.find("r1/f/100");
  const auto f2 = *cat.find("r2/f/100");
  const auto both = chain(cat, {{0, s1, 5}, {0, f1, 8}, {1, s2, 7}, {1, f2, 10}});
  CHECK_FALSE(fixtures::satisfies_all(model, fixtures::assignment(inst, cat, model, both)));
  CHECK(check_schedule(inst, cat, both).count(Family::exclusion) > 0);
}

TEST_CASE("outages, limits and fixings") {
  auto doc = fixtures::T1{}.json();
  SUBCASE("tank outage lowers the bound inside its window") {
    doc["sites"][1]["capacity_max"]["f"] = 500;
    doc["outages"] = {{{"kind", "tank"}, {"site", "A"}, {"product", "f"}, {"reduction", 50},
                       {"times", {{"from", 4}, {"to", 6}}}}};
    const auto inst = instance_from_json(doc);
    const BatchCatalog cat(inst);
    const auto model = build_model(inst, cat);
    const auto A = inst.site_at("A"), pf = inst.product_at("f");
    CHECK(model.constraints[model.upper_bound_rows.at({A, pf, 3})].rhs == 500);
    CHECK(model.constraints[model.upper_bound_rows.at({A, pf, 5})].rhs == 450);
    CHECK(tank_outage_reduction(inst, A, pf, 6) == 50);
  }
  SUBCASE("transport outage over every start removes the batch") {
    doc["outages"] = {{{"kind", "transport"}, {"batches", {{{"product", "s"}}}}, {"times", {{"from", 0}, {"to", 23}}}}};
    const auto inst = instance_from_json(doc);
    const BatchCatalog cat(inst);
    const auto model = build_model(inst, cat);
    CHECK(model.count(Family::outage) == 22);
  }
  SUBCASE("throughput limit") {
    doc["limits"] = {{{"edges", {"e1"}}, {"product", "f"}, {"window", {{"from", 0}, {"to", 23}}}, {"limit", 150}}};
    const auto inst = instance_from_json(doc);
    const BatchCatalog cat(inst);
    const auto model = build_model(inst, cat);
    CHECK(model.count(Family::throughput) == 1);
    const auto f = *cat.find("r1/f/100");
    const auto two = chain(cat, {{0, f, 0}, {0, f, 6}});
    CHECK_FALSE(fixtures::satisfies_all(model, fixtures::assignment(inst, cat, model, two)));
    CHECK(fixtures::satisfies_all(model, fixtures::assignment(inst, cat, model, chain(cat, {{0, f, 0}}))));
  }
  SUBCASE("fixed transport and executed plan") {
    doc["fixed_transports"] = {{{"regime", "r1"}, {"product", "s"}, {"start", 4}}};
    doc["weights"]["previous_plan"] = {{{"edge", "e1"}, {"batch", "r1/f/100"}, {"t", 7}, {"executed", true}},
                                       {{"edge", "e1"}, {"batch", "r1/f/100"}, {"t", 13}, {"executed", true}},
                                       {{"edge", "e1"}, {"batch", "r1/f/100"}, {"t", 0}, {"executed", false}}};
    const auto inst = instance_from_json(doc);
    const BatchCatalog cat(inst);
    const auto model = build_model(inst, cat);
    CHECK(model.count(Family::fixed) == 3);
    CHECK(fixed_placements(inst, cat).size() == 3);
  }
  SUBCASE("contradictory fixings") {
    doc["fixed_transports"] = {{{"regime", "r1"}, {"product", "s"}, {"start", 4}}};
    doc["outages"] = {{{"kind", "transport"}, {"batches", {{{"product", "s"}}}}, {"times", {4}}}};
    const auto inst = instance_from_json(doc);
    const BatchCatalog cat(inst);
    CHECK_THROWS_WITH_AS(build_model(inst, cat), doctest::Contains("contradictory fixings"), ModelError);
  }
}

TEST_CASE("nomination rows") {
  fixtures::T1 t1;
  t1.nominated_f = 0;
  const auto inst = t1.instance();
  const BatchCatalog cat(inst);
  const auto model = build_model(inst, cat);
  const auto f = *cat.find("r1/f/100");
  CHECK_FALSE(fixtures::satisfies_all(model, fixtures::assignment(inst, cat, model, chain(cat, {{0, f, 0}}))));

  auto doc = fixtures::T1{}.json();
  doc["nominations"][0]["limits"].erase(1);
  const auto one = instance_from_json(doc);
  const BatchCatalog oc(one);
  CHECK(build_model(one, oc).count(Family::nomination) == 1);
}

TEST_CASE("objective terms") {
  SUBCASE("SD weights give intake only") {
    const auto inst = fixtures::T1{}.instance();
    const BatchCatalog cat(inst);
    const auto model = build_model(inst, cat);
    CHECK(model.objective.terms.size() == 41);
    CHECK(model.objective.constant == 0);
  }
  SUBCASE("SDC weights add pumping cost") {
    fixtures::T1 t1;
    t1.alpha = 5;
    t1.theta = 3e-3;
    const auto inst = t1.instance();
    const BatchCatalog cat(inst);
    const auto model = build_model(inst, cat);
    const auto f = *cat.find("r1/f/100");
    const auto v = *model.vars.placement(0, f, 0);
    double coef = 0;
    for (const auto& t : model.objective.terms)
      if (t.var == v) coef = t.coef;
    CHECK(coef == doctest::Approx(5 * 100 - 3e-3 * 6));
  }
  SUBCASE("distribution target on a refinery is rejected") {
    auto doc = fixtures::T1{}.json();
    doc["weights"]["beta"] = 1;
    doc["weights"]["distribution_targets"] = {{{"site", "R"}, {"product", "f"}, {"k_prime", 1}}};
    const auto inst = instance_from_json(doc);
    const BatchCatalog cat(inst);
    CHECK_THROWS_AS(build_model(inst, cat), ModelError);
  }
}

TEST_CASE("re-planning term is exact for binaries") {
  for (int v = 0; v <= 1; ++v) CHECK(-(1 - v) * (1 - v) == -(1 - v));
}

namespace {

// Every constraint family on a two-edge micro instance.
ojson micro_json() {
  auto doc = fixtures::two_edge_json(8);
  doc["sites"][1]["capacity_max"] = {{"f", 230}, {"s", 220}};
  doc["sites"][1]["capacity_min"] = {{"s", 100}};
  doc["sites"][1]["base_deltas"] = {{{"product", "s"}, {"t", 5}, {"delta", -20}}};
  doc["sites"][2]["capacity_max"] = {{"f", 200}, {"s", 100}};
  doc["outages"] = {{{"kind", "tank"}, {"site", "B"}, {"product", "s"}, {"reduction", 10}, {"times", {6, 7}}},
                    {{"kind", "transport"}, {"batches", {{{"regime", "r2"}, {"product", "f"}}}}, {"times", {1}}}};
  doc["limits"] = {{{"edges", {"e1"}}, {"product", "s"}, {"window", {{"from", 0}, {"to", 7}}}, {"limit", 100}}};
  doc["exclusion_groups"] = {{{"members", {"r1", "r2"}}}};
  doc["nominations"][0]["limits"] = {{{"product", "f"}, {"volume", 200}}, {{"product", "s"}, {"volume", 88}}};
  doc["weights"] = {{"alpha", 2},
                    {"beta", 1},
                    {"gamma", 3},
                    {"theta", 1},
                    {"distribution_targets", {{{"site", "B"}, {"product", "s"}, {"optimum", 70}, {"k", 2}},
                                              {{"site", "A"}, {"product", "f"}, {"k_prime", 0.5}}}},
                    {"previous_plan", {{{"edge", "e2"}, {"batch", "r2/s/44"}, {"t", 1}, {"executed", false}}}}};
  return doc;
}

}  // namespace

TEST_CASE("emitters and validator agree on every assignment") {
  for (bool relax : {false, true}) {
    const auto inst = instance_from_json(micro_json());
    REQUIRE(validate_instance(inst).empty());
    const BatchCatalog cat(inst);
    ModelOptions opt;
    opt.semantics.relax_terminal_flush = relax;
    const auto model = build_model(inst, cat, opt);
    const auto cands = fixtures::initial_candidates(inst, cat);
    REQUIRE(cands.size() <= 18);
    std::size_t feasible = 0, disagreements = 0, objective_mismatch = 0;
    for (std::uint32_t mask = 0; mask < (1u << cands.size()); ++mask) {
      std::vector<Placement> chosen;
      for (std::size_t i = 0; i < cands.size(); ++i)
        if (mask & (1u << i)) chosen.push_back(cands[i]);
      const auto s = chain(cat, chosen);
      const auto x = fixtures::assignment(inst, cat, model, s);
      const bool by_model = fixtures::satisfies_all(model, x);
      const bool by_validator = check_schedule(inst, cat, s, opt.semantics).clean();
      if (by_model != by_validator) ++disagreements;
      if (!by_model) continue;
      ++feasible;
      const double mv = objective_value(model.objective, x);
      const double vv = to_double(evaluate_objective(inst, cat, s).total);
      if (std::abs(mv - vv) > 1e-9) ++objective_mismatch;
    }
    CHECK(disagreements == 0);
    CHECK(objective_mismatch == 0);
    CHECK(feasible > 1);
  }
}

TEST_CASE("model building is deterministic") {
  const auto inst = instance_from_json(micro_json());
  const BatchCatalog cat(inst);
  const auto a = build_model(inst, cat);
  const auto b = build_model(inst, cat);
  CHECK(metadata_json(a) == metadata_json(b));
  REQUIRE(a.constraints.size() == b.constraints.size());
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    CHECK(a.constraints[i].rhs == b.constraints[i].rhs);
    CHECK(a.constraints[i].terms.size() == b.constraints[i].terms.size());
  }
}
