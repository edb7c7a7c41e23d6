#include "pipesched/generator.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "pipesched/instance_io.hpp"
#include "pipesched/oracle.hpp"

namespace pipesched {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kDay = 24;
constexpr Volume kDailyOuttake = 10;

struct SettingRow {
  int batches;
  int horizon;
};

SettingRow setting_row(Setting s) {
  switch (s) {
    case Setting::A: return {10, 480};
    case Setting::B: return {15, 576};
    case Setting::C: return {20, 576};
  }
  return {10, 480};
}

// Step-downs of the base level; the total matches the daily policy.
std::vector<std::pair<int, Volume>> outtake_deltas(OuttakePolicy policy, int horizon) {
  const int t_max = horizon - 1;
  const int days = t_max / kDay;
  const Volume total = kDailyOuttake * days;
  std::vector<std::pair<int, Volume>> out;
  switch (policy) {
    case OuttakePolicy::daily:
      for (int k = 1; k <= days; ++k) out.emplace_back(k * kDay, -kDailyOuttake);
      break;
    case OuttakePolicy::front_loaded: {
      // Twice the daily amount on the first half of the day boundaries.
      Volume left = total;
      for (int k = 1; k <= days && left > 0; ++k) {
        const Volume d = std::min(left, 2 * kDailyOuttake);
        out.emplace_back(k * kDay, -d);
        left -= d;
      }
      break;
    }
    case OuttakePolicy::uniform_hourly:
      for (int t = 1; t <= t_max; ++t) {
        const Volume d = total * t / t_max - total * (t - 1) / t_max;
        if (d > 0) out.emplace_back(t, -d);
      }
      break;
  }
  return out;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  // Inclusive range; modulo keeps results identical across standard libraries.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(int percent) { return between(0, 99) < percent; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

const char* setting_name(Setting s) {
  switch (s) {
    case Setting::A: return "A";
    case Setting::B: return "B";
    case Setting::C: return "C";
  }
  return "A";
}

const char* cost_mode_name(CostMode m) { return m == CostMode::SD ? "SD" : "SDC"; }

const char* outtake_policy_name(OuttakePolicy p) {
  switch (p) {
    case OuttakePolicy::daily: return "daily";
    case OuttakePolicy::front_loaded: return "front-loaded";
    case OuttakePolicy::uniform_hourly: return "uniform-hourly";
  }
  return "daily";
}

std::optional<Setting> setting_from_name(std::string_view s) {
  if (s == "A") return Setting::A;
  if (s == "B") return Setting::B;
  if (s == "C") return Setting::C;
  return std::nullopt;
}

std::optional<CostMode> cost_mode_from_name(std::string_view s) {
  if (s == "SD") return CostMode::SD;
  if (s == "SDC") return CostMode::SDC;
  return std::nullopt;
}

std::optional<OuttakePolicy> outtake_policy_from_name(std::string_view s) {
  if (s == "daily") return OuttakePolicy::daily;
  if (s == "front-loaded") return OuttakePolicy::front_loaded;
  if (s == "uniform-hourly") return OuttakePolicy::uniform_hourly;
  return std::nullopt;
}

std::optional<std::string> demand_precheck(const Instance& instance) {
  const int t_max = instance.grid().t_max();
  std::map<std::string, Volume> nominated;  // product -> volume
  std::map<std::string, Volume> batch;      // product -> refinery standard batch
  for (const auto& nom : instance.data().nominations) {
    const auto& site = instance.sites()[instance.site_at(nom.refinery)];
    for (const auto& l : nom.limits) {
      nominated[l.product] += l.volume;
      if (site.standard_batch.contains(l.product)) batch[l.product] = site.standard_batch.at(l.product);
    }
  }
  std::string findings;
  for (const auto& [product, volume] : nominated) {
    if (!batch.contains(product) || batch[product] <= 0) continue;
    const Volume size = batch[product];
    Volume needed = 0;
    for (const auto& site : instance.sites()) {
      if (site.kind != SiteKind::storage) continue;
      Volume deficit = 0;
      for (int t = 0; t <= t_max; ++t) deficit = std::max(deficit, site.min_at(product, t) - site.base_at(product, t));
      needed += (deficit + size - 1) / size;
    }
    const Volume available = volume / size;
    if (needed > available)
      findings += (findings.empty() ? "" : "; ") + std::string("product '") + product + "' needs " +
                  std::to_string(needed) + " batches to cover outtake but only " + std::to_string(available) +
                  " are nominated";
  }
  // A site nothing is pumped out of can never fall below its base level.
  std::set<std::string> has_outflow;
  for (const auto& regime : instance.regimes())
    if (!regime.edges.empty()) has_outflow.insert(instance.edges()[instance.edge_at(regime.edges.front())].origin);
  for (const auto& site : instance.sites()) {
    if (site.kind != SiteKind::storage || has_outflow.contains(site.id)) continue;
    for (const auto& product : instance.products()) {
      for (int t = 0; t <= t_max; ++t) {
        const auto cap = site.max_at(product.id, t);
        if (!cap || *cap >= site.base_at(product.id, t)) continue;
        findings += (findings.empty() ? "" : "; ") + std::string("site '") + site.id + "' product '" + product.id +
                    "' has capacity " + std::to_string(*cap) + " below its base level " +
                    std::to_string(site.base_at(product.id, t)) + " at t=" + std::to_string(t);
        break;
      }
    }
  }
  if (findings.empty()) return std::nullopt;
  return findings;
}

ojson path_instance_json(const PathExperimentParams& params) {
  if (params.vertices < 2) throw InstanceError("path instances need at least 2 vertices");
  const auto row = setting_row(params.setting);
  const int horizon = params.horizon.value_or(row.horizon);
  const Volume cap = params.capacity_max.value_or(1000);
  const Volume flush_batch = 100, stain_batch = 44;
  const Volume pipe_volume = flush_batch;
  const int storage = params.vertices - 1;

  ojson doc;
  doc["horizon"] = {{"steps", horizon}, {"step_hours", 1}};
  doc["products"] = ojson::array({{{"id", "F"}, {"kind", "flushing"}, {"unit_volume", 58.14}},
                                   {{"id", "S"}, {"kind", "staining"}, {"unit_volume", 64.94}}});

  ojson sites = ojson::array();
  sites.push_back({{"id", "R"}, {"kind", "refinery"}, {"standard_batch", {{"F", flush_batch}, {"S", stain_batch}}}});
  const auto deltas = outtake_deltas(params.outtake, horizon);
  for (int i = 1; i <= storage; ++i) {
    const Volume initial = 120 + 10 * (i - 1);
    ojson base = ojson::array();
    for (const auto& product : {"F", "S"})
      for (const auto& [t, d] : deltas) base.push_back({{"product", product}, {"t", t}, {"delta", d}});
    sites.push_back({{"id", "S" + std::to_string(i)},
                     {"kind", "storage"},
                     {"standard_batch", {{"F", flush_batch}, {"S", stain_batch}}},
                     {"capacity_max", {{"F", cap}, {"S", cap}}},
                     {"capacity_min", {{"F", 0}, {"S", 0}}},
                     {"initial", {{"F", initial}, {"S", initial}}},
                     {"base_deltas", std::move(base)}});
  }
  doc["sites"] = std::move(sites);

  ojson edges = ojson::array();
  for (int k = 1; k <= storage; ++k)
    edges.push_back({{"id", "e" + std::to_string(k)},
                     {"from", k == 1 ? std::string("R") : "S" + std::to_string(k - 1)},
                     {"to", "S" + std::to_string(k)},
                     {"pipe_volume", pipe_volume}});
  doc["edges"] = std::move(edges);

  // One regime from every site to each storage site further down the path.
  ojson regimes = ojson::array();
  for (int from = 0; from < storage; ++from) {
    const std::string origin = from == 0 ? std::string("R") : "S" + std::to_string(from);
    for (int to = from + 1; to <= storage; ++to) {
      ojson path = ojson::array();
      for (int j = from + 1; j <= to; ++j) path.push_back("e" + std::to_string(j));
      regimes.push_back({{"id", origin + "-S" + std::to_string(to)},
                         {"edges", std::move(path)},
                         {"flow_rate", {{"F", "969/58.14"}, {"S", "952.45/64.94"}}},
                         {"step_cost", 1}});
    }
  }
  doc["regimes"] = std::move(regimes);

  doc["nominations"] = ojson::array(
      {{{"refinery", "R"},
        {"limits", ojson::array({{{"product", "F"}, {"volume", row.batches * flush_batch}},
                                 {{"product", "S"}, {"volume", row.batches * stain_batch}}})}}});

  const bool sdc = params.cost_mode == CostMode::SDC;
  doc["weights"] = {{"alpha", 5}, {"beta", 0}, {"gamma", 0}, {"theta", sdc ? 3e-3 : 0.0}, {"eta", {{"F", 1}, {"S", 1}}}};
  return doc;
}

GeneratedInstance generate_path_instance(const PathExperimentParams& params) {
  GeneratedInstance out{instance_from_json(path_instance_json(params)), {}};
  if (auto w = demand_precheck(out.instance)) out.warnings.push_back(*w);
  return out;
}

static Instance draw_oracle_instance(Rng& rng, const OracleLimits& limits) {
  const int n_edges = std::min<int>(limits.max_edges, static_cast<int>(rng.between(1, 2)));
  const int horizon = std::min<int>(limits.max_horizon, static_cast<int>(rng.between(8, 14)));
  const bool staining = rng.chance(75);

  ojson doc;
  doc["horizon"] = {{"steps", horizon}, {"step_hours", 1}};
  ojson products = ojson::array({{{"id", "f"}, {"kind", "flushing"}, {"unit_volume", 1}}});
  if (staining) products.push_back({{"id", "s"}, {"kind", "staining"}, {"unit_volume", 1}});
  doc["products"] = products;
  std::vector<std::string> pids = {"f"};
  if (staining) pids.push_back("s");

  const Volume f_batch = 10 * rng.between(2, 3);
  const Volume s_batch = 10 * rng.between(1, 2);
  auto batches = [&] {
    ojson b = {{"f", f_batch}};
    if (staining) b["s"] = s_batch;
    return b;
  };

  std::vector<std::string> site_ids = {"R", "A"};
  if (n_edges == 2) site_ids.push_back("B");
  ojson sites = ojson::array();
  sites.push_back({{"id", "R"}, {"kind", "refinery"}, {"standard_batch", batches()}});
  for (std::size_t i = 1; i < site_ids.size(); ++i) {
    ojson site = {{"id", site_ids[i]}, {"kind", "storage"}};
    ojson cmax = ojson::object(), cmin = ojson::object(), init = ojson::object(), deltas = ojson::array();
    for (const auto& p : pids) {
      const Volume initial = 10 * rng.between(0, 3);
      init[p] = initial;
      if (rng.chance(70)) cmax[p] = initial + 10 * rng.between(3, 8);
      if (rng.chance(30)) {
        const int t = static_cast<int>(rng.between(1, horizon - 1));
        deltas.push_back({{"product", p}, {"t", t}, {"delta", -10 * rng.between(1, 2)}});
        cmin[p] = 0;
      }
    }
    site["capacity_max"] = cmax;
    site["capacity_min"] = cmin;
    site["initial"] = init;
    site["base_deltas"] = deltas;
    if (i == 1 && n_edges == 2) site["standard_batch"] = batches();
    sites.push_back(std::move(site));
  }
  doc["sites"] = std::move(sites);

  ojson edges = ojson::array();
  for (int k = 0; k < n_edges; ++k)
    edges.push_back({{"id", "e" + std::to_string(k + 1)},
                     {"from", site_ids[static_cast<std::size_t>(k)]},
                     {"to", site_ids[static_cast<std::size_t>(k) + 1]},
                     {"pipe_volume", 10 * rng.between(1, 3)}});
  doc["edges"] = std::move(edges);

  auto rates = [&] {
    ojson r = {{"f", 10}};
    if (staining) r["s"] = 10;
    return r;
  };
  ojson regimes = ojson::array();
  regimes.push_back({{"id", "r1"}, {"edges", {"e1"}}, {"flow_rate", rates()}, {"step_cost", rng.between(0, 2)}});
  if (n_edges == 2) {
    const bool through = rng.chance(50);
    regimes.push_back({{"id", "r2"},
                       {"edges", through ? ojson::array({"e1", "e2"}) : ojson::array({"e2"})},
                       {"flow_rate", rates()},
                       {"step_cost", rng.between(0, 2)}});
  }
  doc["regimes"] = std::move(regimes);

  ojson nom_limits = ojson::array({{{"product", "f"}, {"volume", f_batch * rng.between(1, 3)}}});
  if (staining) nom_limits.push_back({{"product", "s"}, {"volume", s_batch * rng.between(0, 3)}});
  doc["nominations"] = ojson::array({{{"refinery", "R"}, {"limits", nom_limits}}});

  ojson weights = {{"alpha", 1}, {"beta", 0}, {"gamma", 0}, {"theta", rng.between(0, 1)}};
  if (rng.chance(25)) {
    weights["beta"] = 1;
    weights["distribution_targets"] =
        ojson::array({{{"site", "A"}, {"product", "f"}, {"optimum", 10 * rng.between(1, 6)}, {"k", 1}}});
  }
  if (rng.chance(25)) {
    weights["gamma"] = 2;
    const int t = static_cast<int>(rng.between(0, horizon - 4));
    weights["previous_plan"] =
        ojson::array({{{"edge", "e1"}, {"batch", "r1/f/" + std::to_string(f_batch)}, {"t", t}, {"executed", false}}});
  }
  doc["weights"] = std::move(weights);
  return instance_from_json(doc);
}

Instance generate_oracle_instance(std::uint64_t seed, const OracleLimits& limits) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto inst = draw_oracle_instance(rng, limits);
    // Keep only draws the exhaustive search can settle.
    try {
      if (!brute_force_optimum(inst, limits).budget_exceeded) return inst;
    } catch (const OracleError&) {
    }
  }
  throw std::runtime_error("no oracle-sized instance after 100 draws for seed " + std::to_string(seed));
}

std::string manifest_json(const std::vector<ManifestEntry>& entries) {
  ojson rows = ojson::array();
  for (const auto& e : entries) rows.push_back({{"path", e.path}, {"params", e.params}, {"hash", e.hash}});
  return ojson{{"instances", std::move(rows)}}.dump(2) + "\n";
}

}  // namespace pipesched
