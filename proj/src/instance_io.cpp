#include "pipesched/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <set>

#include "pipesched/util.hpp"

namespace pipesched {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Reader {
 public:
  explicit Reader(const LoadOptions& options) : options_(options) {}

  void expect_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    if (!options_.strict) return;
    for (const auto& item : obj.items()) {
      bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
      if (!ok) fail(path, "unknown key '" + item.key() + "'");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw InstanceError("instance " + (path.empty() ? std::string("document") : path) + ": " + what);
  }

  static const json& required(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
  }

  static std::string string_at(const json& obj, const std::string& path, const char* key) {
    const auto& v = required(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
  }

  static std::optional<std::string> opt_string(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) fail(path + "." + key, "expected a string");
    return it->get<std::string>();
  }

  static std::int64_t integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
    }
    fail(path, "expected an integer");
  }

  static std::int64_t integer_at(const json& obj, const std::string& path, const char* key) {
    return integer(required(obj, path, key), path + "." + key);
  }

  static std::optional<std::int64_t> opt_integer(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    return integer(*it, path + "." + key);
  }

  // Accepts plain numbers or "num/den" strings for exact ratios.
  static double number(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      auto slash = s.find('/');
      auto parse = [&](std::string_view part) {
        double out = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc() || ptr != part.data() + part.size()) fail(path, "malformed number '" + s + "'");
        return out;
      };
      if (slash == std::string::npos) return parse(s);
      double den = parse(std::string_view(s).substr(slash + 1));
      if (den == 0) fail(path, "zero denominator in '" + s + "'");
      return parse(std::string_view(s).substr(0, slash)) / den;
    }
    fail(path, "expected a number");
  }

  static double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, path + "." + key);
  }

  static const json& array_at(const json& obj, const std::string& path, const char* key) {
    const auto& v = required(obj, path, key);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
  }

  static std::vector<std::string> strings(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  // Either an explicit list of steps or an inclusive {"from","to"} range.
  std::vector<int> time_set(const json& v, const std::string& path) const {
    std::vector<int> out;
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<int>(integer(v[i], path + "[" + std::to_string(i) + "]")));
    } else if (v.is_object()) {
      expect_keys(v, path, {"from", "to"});
      auto from = integer_at(v, path, "from");
      auto to = integer_at(v, path, "to");
      for (auto t = from; t <= to; ++t) out.push_back(static_cast<int>(t));
    } else {
      fail(path, "expected a time list or {\"from\", \"to\"} range");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  LoadOptions options_;
};

std::vector<Volume> series(const json& v, int horizon, const std::string& path) {
  if (v.is_array()) {
    std::vector<Volume> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Reader::integer(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }
  return std::vector<Volume>(static_cast<std::size_t>(std::max(horizon, 0)), Reader::integer(v, path));
}

Product read_product(const Reader& rd, const json& j, const std::string& path) {
  rd.expect_keys(j, path, {"id", "kind", "unit_volume"});
  Product p;
  p.id = Reader::string_at(j, path, "id");
  auto kind = Reader::string_at(j, path, "kind");
  if (kind == "flushing") p.kind = ProductKind::flushing;
  else if (kind == "staining") p.kind = ProductKind::staining;
  else Reader::fail(path + ".kind", "expected 'flushing' or 'staining'");
  p.unit_volume = Reader::number_or(j, path, "unit_volume", 1.0);
  return p;
}

Site read_site(const Reader& rd, const json& j, const std::string& path, int horizon) {
  rd.expect_keys(j, path, {"id", "kind", "capacity_max", "capacity_min", "initial", "base_deltas", "standard_batch"});
  Site s;
  s.id = Reader::string_at(j, path, "id");
  auto kind = Reader::string_at(j, path, "kind");
  if (kind == "storage") s.kind = SiteKind::storage;
  else if (kind == "refinery") s.kind = SiteKind::refinery;
  else Reader::fail(path + ".kind", "expected 'storage' or 'refinery'");

  auto read_map = [&](const char* key, auto&& fn) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_object()) Reader::fail(path + "." + key, "expected an object keyed by product");
    for (const auto& item : it->items()) fn(item.key(), item.value(), path + "." + key + "." + item.key());
  };
  read_map("capacity_max", [&](const std::string& p, const json& v, const std::string& at) {
    s.capacity_max[p] = series(v, horizon, at);
  });
  read_map("capacity_min", [&](const std::string& p, const json& v, const std::string& at) {
    s.capacity_min[p] = series(v, horizon, at);
  });
  read_map("standard_batch", [&](const std::string& p, const json& v, const std::string& at) {
    s.standard_batch[p] = Reader::integer(v, at);
  });

  std::map<std::string, Volume> initial;
  read_map("initial", [&](const std::string& p, const json& v, const std::string& at) {
    initial[p] = Reader::integer(v, at);
  });
  std::map<std::string, std::vector<Volume>> deltas;
  for (const auto& [p, v] : initial) deltas[p].assign(static_cast<std::size_t>(std::max(horizon, 0)), 0);
  if (auto it = j.find("base_deltas"); it != j.end()) {
    if (!it->is_array()) Reader::fail(path + ".base_deltas", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& d = (*it)[i];
      const auto at = path + ".base_deltas[" + std::to_string(i) + "]";
      rd.expect_keys(d, at, {"product", "t", "delta"});
      auto p = Reader::string_at(d, at, "product");
      auto t = Reader::integer_at(d, at, "t");
      if (t < 0 || t >= horizon) Reader::fail(at, "time outside the horizon");
      auto& row = deltas[p];
      if (row.empty()) row.assign(static_cast<std::size_t>(horizon), 0);
      row[static_cast<std::size_t>(t)] += Reader::integer_at(d, at, "delta");
    }
  }
  // Planners state outtakes as events; the model wants cumulative levels.
  for (auto& [p, row] : deltas) {
    Volume level = initial.contains(p) ? initial[p] : 0;
    std::vector<Volume> cumulative(row.size());
    for (std::size_t t = 0; t < row.size(); ++t) {
      level += row[t];
      cumulative[t] = level;
    }
    s.base_occupancy[p] = std::move(cumulative);
  }
  return s;
}

Edge read_edge(const Reader& rd, const json& j, const std::string& path) {
  rd.expect_keys(j, path, {"id", "from", "to", "pipe_volume"});
  Edge e;
  e.id = Reader::string_at(j, path, "id");
  e.origin = Reader::string_at(j, path, "from");
  e.destination = Reader::string_at(j, path, "to");
  e.pipe_volume = Reader::opt_integer(j, path, "pipe_volume").value_or(0);
  return e;
}

PumpingRegime read_regime(const Reader& rd, const json& j, const std::string& path) {
  rd.expect_keys(j, path, {"id", "edges", "flow_rate", "flush_volume", "step_cost", "batch_cost", "pass_times"});
  PumpingRegime r;
  r.id = Reader::string_at(j, path, "id");
  r.edges = Reader::strings(Reader::required(j, path, "edges"), path + ".edges");
  const auto& rates = Reader::required(j, path, "flow_rate");
  if (!rates.is_object()) Reader::fail(path + ".flow_rate", "expected an object keyed by product");
  for (const auto& item : rates.items())
    r.flow_rate[item.key()] = Reader::number(item.value(), path + ".flow_rate." + item.key());
  if (auto v = Reader::opt_integer(j, path, "flush_volume")) r.flush_volume = *v;
  r.step_cost = Reader::number_or(j, path, "step_cost", 0.0);
  if (auto it = j.find("batch_cost"); it != j.end()) {
    if (!it->is_object()) Reader::fail(path + ".batch_cost", "expected an object");
    for (const auto& item : it->items())
      r.batch_cost[item.key()] = Reader::number(item.value(), path + ".batch_cost." + item.key());
  }
  if (auto it = j.find("pass_times"); it != j.end()) {
    if (!it->is_object()) Reader::fail(path + ".pass_times", "expected an object");
    for (const auto& item : it->items())
      r.pass_times[item.key()] = static_cast<int>(Reader::integer(item.value(), path + ".pass_times." + item.key()));
  }
  return r;
}

BatchSelector read_selector(const Reader& rd, const json& j, const std::string& path) {
  rd.expect_keys(j, path, {"batch", "regime", "product", "volume", "edge"});
  BatchSelector s;
  s.batch = Reader::opt_string(j, path, "batch");
  s.regime = Reader::opt_string(j, path, "regime");
  s.product = Reader::opt_string(j, path, "product");
  if (auto v = Reader::opt_integer(j, path, "volume")) s.volume = *v;
  s.edge = Reader::opt_string(j, path, "edge");
  return s;
}

CostWeights read_weights(const Reader& rd, const json& j, const std::string& path) {
  rd.expect_keys(j, path, {"alpha", "beta", "gamma", "theta", "eta", "distribution_targets", "previous_plan"});
  CostWeights w;
  w.alpha = Reader::number_or(j, path, "alpha", 0.0);
  w.beta = Reader::number_or(j, path, "beta", 0.0);
  w.gamma = Reader::number_or(j, path, "gamma", 0.0);
  w.theta = Reader::number_or(j, path, "theta", 0.0);
  if (auto it = j.find("eta"); it != j.end()) {
    if (!it->is_object()) Reader::fail(path + ".eta", "expected an object keyed by product");
    for (const auto& item : it->items()) w.eta[item.key()] = Reader::number(item.value(), path + ".eta." + item.key());
  }
  if (auto it = j.find("distribution_targets"); it != j.end()) {
    if (!it->is_array()) Reader::fail(path + ".distribution_targets", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& t = (*it)[i];
      const auto at = path + ".distribution_targets[" + std::to_string(i) + "]";
      rd.expect_keys(t, at, {"site", "product", "optimum", "k", "k_prime"});
      DistributionTarget target;
      target.site = Reader::string_at(t, at, "site");
      target.product = Reader::string_at(t, at, "product");
      const bool has_opt = t.contains("optimum");
      const bool has_prime = t.contains("k_prime");
      if (has_opt == has_prime) Reader::fail(at, "give either 'optimum' with 'k', or 'k_prime'");
      if (has_opt) {
        target.optimum = Reader::integer_at(t, at, "optimum");
        target.weight = Reader::number(Reader::required(t, at, "k"), at + ".k");
      } else {
        if (t.contains("k")) Reader::fail(at, "'k' is only used together with 'optimum'");
        target.weight = Reader::number(t.at("k_prime"), at + ".k_prime");
      }
      w.distribution_targets.push_back(std::move(target));
    }
  }
  if (auto it = j.find("previous_plan"); it != j.end()) {
    if (!it->is_array()) Reader::fail(path + ".previous_plan", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& e = (*it)[i];
      const auto at = path + ".previous_plan[" + std::to_string(i) + "]";
      rd.expect_keys(e, at, {"edge", "batch", "t", "executed"});
      PlanEntry entry;
      entry.edge = Reader::string_at(e, at, "edge");
      entry.batch = Reader::string_at(e, at, "batch");
      entry.t = static_cast<int>(Reader::integer_at(e, at, "t"));
      if (auto x = e.find("executed"); x != e.end()) {
        if (!x->is_boolean()) Reader::fail(at + ".executed", "expected a boolean");
        entry.executed = x->get<bool>();
      }
      w.previous_plan.push_back(std::move(entry));
    }
  }
  return w;
}

}  // namespace

Instance instance_from_json(const json& doc, const LoadOptions& options) {
  Reader rd(options);
  rd.expect_keys(doc, "", {"products", "sites", "edges", "regimes", "horizon", "nominations", "outages", "limits",
                           "exclusion_groups", "weights", "fixed_transports"});
  InstanceData d;

  const auto& horizon = Reader::required(doc, "", "horizon");
  rd.expect_keys(horizon, "horizon", {"steps", "step_hours"});
  d.grid.horizon_len = static_cast<int>(Reader::integer_at(horizon, "horizon", "steps"));
  d.grid.step_hours = Reader::number_or(horizon, "horizon", "step_hours", 1.0);

  auto each = [&](const char* key, bool needed, auto&& fn) {
    if (!needed && !doc.contains(key)) return;
    const auto& arr = Reader::array_at(doc, "", key);
    for (std::size_t i = 0; i < arr.size(); ++i) fn(arr[i], std::string(key) + "[" + std::to_string(i) + "]");
  };

  each("products", true, [&](const json& j, const std::string& at) { d.products.push_back(read_product(rd, j, at)); });
  each("sites", true, [&](const json& j, const std::string& at) {
    d.sites.push_back(read_site(rd, j, at, d.grid.horizon_len));
  });
  each("edges", true, [&](const json& j, const std::string& at) { d.edges.push_back(read_edge(rd, j, at)); });
  each("regimes", true, [&](const json& j, const std::string& at) { d.regimes.push_back(read_regime(rd, j, at)); });
  each("nominations", false, [&](const json& j, const std::string& at) {
    rd.expect_keys(j, at, {"refinery", "limits"});
    Nomination n;
    n.refinery = Reader::string_at(j, at, "refinery");
    const auto& limits = Reader::array_at(j, at, "limits");
    for (std::size_t i = 0; i < limits.size(); ++i) {
      const auto lat = at + ".limits[" + std::to_string(i) + "]";
      rd.expect_keys(limits[i], lat, {"product", "volume"});
      n.limits.push_back({Reader::string_at(limits[i], lat, "product"), Reader::integer_at(limits[i], lat, "volume")});
    }
    d.nominations.push_back(std::move(n));
  });
  each("outages", false, [&](const json& j, const std::string& at) {
    if (!j.is_object()) Reader::fail(at, "expected an object");
    auto kind = Reader::string_at(j, at, "kind");
    if (kind == "tank") {
      rd.expect_keys(j, at, {"kind", "site", "product", "reduction", "times"});
      TankOutage o;
      o.site = Reader::string_at(j, at, "site");
      o.product = Reader::string_at(j, at, "product");
      o.reduction = Reader::integer_at(j, at, "reduction");
      o.times = rd.time_set(Reader::required(j, at, "times"), at + ".times");
      d.tank_outages.push_back(std::move(o));
    } else if (kind == "transport") {
      rd.expect_keys(j, at, {"kind", "batches", "times"});
      TransportOutage o;
      const auto& batches = Reader::array_at(j, at, "batches");
      for (std::size_t i = 0; i < batches.size(); ++i)
        o.batches.push_back(read_selector(rd, batches[i], at + ".batches[" + std::to_string(i) + "]"));
      o.times = rd.time_set(Reader::required(j, at, "times"), at + ".times");
      d.transport_outages.push_back(std::move(o));
    } else {
      Reader::fail(at + ".kind", "expected 'tank' or 'transport'");
    }
  });
  each("limits", false, [&](const json& j, const std::string& at) {
    rd.expect_keys(j, at, {"edges", "product", "window", "limit"});
    ThroughputLimit l;
    l.edges = Reader::strings(Reader::required(j, at, "edges"), at + ".edges");
    l.product = Reader::string_at(j, at, "product");
    l.window = rd.time_set(Reader::required(j, at, "window"), at + ".window");
    l.limit = Reader::integer_at(j, at, "limit");
    d.limits.push_back(std::move(l));
  });
  each("exclusion_groups", false, [&](const json& j, const std::string& at) {
    rd.expect_keys(j, at, {"members"});
    d.exclusion_groups.push_back({Reader::strings(Reader::required(j, at, "members"), at + ".members")});
  });
  if (auto it = doc.find("weights"); it != doc.end()) d.weights = read_weights(rd, *it, "weights");
  each("fixed_transports", false, [&](const json& j, const std::string& at) {
    rd.expect_keys(j, at, {"regime", "product", "start", "volume"});
    FixedTransport f;
    f.regime = Reader::string_at(j, at, "regime");
    f.product = Reader::string_at(j, at, "product");
    f.start = static_cast<int>(Reader::integer_at(j, at, "start"));
    if (auto v = Reader::opt_integer(j, at, "volume")) f.volume = *v;
    d.fixed_transports.push_back(std::move(f));
  });

  return Instance(std::move(d));
}

Instance parse_instance(const std::string& text, const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("instance document is not valid JSON: ") + e.what());
  }
  return instance_from_json(doc, options);
}

Instance load_instance(const std::filesystem::path& path, const LoadOptions& options) {
  return parse_instance(read_text_file(path), options);
}

namespace {

ordered_json time_set_json(const std::vector<int>& times) {
  bool contiguous = !times.empty();
  for (std::size_t i = 1; i < times.size(); ++i) contiguous = contiguous && times[i] == times[i - 1] + 1;
  if (contiguous && times.size() > 2) return ordered_json{{"from", times.front()}, {"to", times.back()}};
  return ordered_json(times);
}

ordered_json series_json(const std::vector<Volume>& values) {
  if (!values.empty() && std::all_of(values.begin(), values.end(), [&](Volume v) { return v == values.front(); }))
    return values.front();
  return ordered_json(values);
}

}  // namespace

ordered_json instance_to_json(const Instance& instance) {
  const auto& d = instance.data();
  ordered_json doc;
  doc["horizon"] = {{"steps", d.grid.horizon_len}, {"step_hours", d.grid.step_hours}};

  doc["products"] = ordered_json::array();
  for (const auto& p : d.products)
    doc["products"].push_back(
        {{"id", p.id}, {"kind", p.kind == ProductKind::flushing ? "flushing" : "staining"}, {"unit_volume", p.unit_volume}});

  doc["sites"] = ordered_json::array();
  for (const auto& s : d.sites) {
    ordered_json j;
    j["id"] = s.id;
    j["kind"] = s.kind == SiteKind::storage ? "storage" : "refinery";
    if (!s.standard_batch.empty()) {
      j["standard_batch"] = ordered_json::object();
      for (const auto& [p, v] : s.standard_batch) j["standard_batch"][p] = v;
    }
    if (!s.capacity_max.empty()) {
      j["capacity_max"] = ordered_json::object();
      for (const auto& [p, v] : s.capacity_max) j["capacity_max"][p] = series_json(v);
    }
    if (!s.capacity_min.empty()) {
      j["capacity_min"] = ordered_json::object();
      for (const auto& [p, v] : s.capacity_min) j["capacity_min"][p] = series_json(v);
    }
    if (!s.base_occupancy.empty()) {
      j["initial"] = ordered_json::object();
      ordered_json deltas = ordered_json::array();
      for (const auto& [p, v] : s.base_occupancy) {
        j["initial"][p] = v.empty() ? 0 : v.front();
        for (std::size_t t = 1; t < v.size(); ++t)
          if (v[t] != v[t - 1]) deltas.push_back({{"product", p}, {"t", t}, {"delta", v[t] - v[t - 1]}});
      }
      if (!deltas.empty()) j["base_deltas"] = std::move(deltas);
    }
    doc["sites"].push_back(std::move(j));
  }

  doc["edges"] = ordered_json::array();
  for (const auto& e : d.edges)
    doc["edges"].push_back({{"id", e.id}, {"from", e.origin}, {"to", e.destination}, {"pipe_volume", e.pipe_volume}});

  doc["regimes"] = ordered_json::array();
  for (const auto& r : d.regimes) {
    ordered_json j;
    j["id"] = r.id;
    j["edges"] = r.edges;
    j["flow_rate"] = ordered_json::object();
    for (const auto& [p, v] : r.flow_rate) j["flow_rate"][p] = v;
    if (r.flush_volume) j["flush_volume"] = *r.flush_volume;
    if (r.step_cost != 0) j["step_cost"] = r.step_cost;
    if (!r.batch_cost.empty()) {
      j["batch_cost"] = ordered_json::object();
      for (const auto& [k, v] : r.batch_cost) j["batch_cost"][k] = v;
    }
    if (!r.pass_times.empty()) {
      j["pass_times"] = ordered_json::object();
      for (const auto& [k, v] : r.pass_times) j["pass_times"][k] = v;
    }
    doc["regimes"].push_back(std::move(j));
  }

  doc["nominations"] = ordered_json::array();
  for (const auto& n : d.nominations) {
    ordered_json limits = ordered_json::array();
    for (const auto& l : n.limits) limits.push_back({{"product", l.product}, {"volume", l.volume}});
    doc["nominations"].push_back({{"refinery", n.refinery}, {"limits", std::move(limits)}});
  }

  doc["outages"] = ordered_json::array();
  for (const auto& o : d.tank_outages)
    doc["outages"].push_back({{"kind", "tank"},
                              {"site", o.site},
                              {"product", o.product},
                              {"reduction", o.reduction},
                              {"times", time_set_json(o.times)}});
  for (const auto& o : d.transport_outages) {
    ordered_json batches = ordered_json::array();
    for (const auto& s : o.batches) {
      ordered_json j = ordered_json::object();
      if (s.batch) j["batch"] = *s.batch;
      if (s.regime) j["regime"] = *s.regime;
      if (s.product) j["product"] = *s.product;
      if (s.volume) j["volume"] = *s.volume;
      if (s.edge) j["edge"] = *s.edge;
      batches.push_back(std::move(j));
    }
    doc["outages"].push_back({{"kind", "transport"}, {"batches", std::move(batches)}, {"times", time_set_json(o.times)}});
  }

  doc["limits"] = ordered_json::array();
  for (const auto& l : d.limits)
    doc["limits"].push_back(
        {{"edges", l.edges}, {"product", l.product}, {"window", time_set_json(l.window)}, {"limit", l.limit}});

  doc["exclusion_groups"] = ordered_json::array();
  for (const auto& g : d.exclusion_groups) doc["exclusion_groups"].push_back({{"members", g.members}});

  const auto& w = d.weights;
  ordered_json weights;
  weights["alpha"] = w.alpha;
  weights["beta"] = w.beta;
  weights["gamma"] = w.gamma;
  weights["theta"] = w.theta;
  weights["eta"] = ordered_json::object();
  for (const auto& [p, v] : w.eta) weights["eta"][p] = v;
  weights["distribution_targets"] = ordered_json::array();
  for (const auto& t : w.distribution_targets) {
    ordered_json j{{"site", t.site}, {"product", t.product}};
    if (t.optimum) {
      j["optimum"] = *t.optimum;
      j["k"] = t.weight;
    } else {
      j["k_prime"] = t.weight;
    }
    weights["distribution_targets"].push_back(std::move(j));
  }
  weights["previous_plan"] = ordered_json::array();
  for (const auto& e : w.previous_plan)
    weights["previous_plan"].push_back({{"edge", e.edge}, {"batch", e.batch}, {"t", e.t}, {"executed", e.executed}});
  doc["weights"] = std::move(weights);

  doc["fixed_transports"] = ordered_json::array();
  for (const auto& f : d.fixed_transports) {
    ordered_json j{{"regime", f.regime}, {"product", f.product}, {"start", f.start}};
    if (f.volume) j["volume"] = *f.volume;
    doc["fixed_transports"].push_back(std::move(j));
  }
  return doc;
}

std::string dump_instance(const Instance& instance) { return instance_to_json(instance).dump(2) + "\n"; }

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, dump_instance(instance));
}

std::string instance_hash(const Instance& instance) { return hex64(fnv1a64(instance_to_json(instance).dump())); }

}  // namespace pipesched
