#include "pipesched/instance.hpp"

#include <algorithm>
#include <set>

namespace pipesched {

namespace {

template <class Series>
const std::vector<Volume>* series_of(const Series& series, const std::string& product) {
  auto it = series.find(product);
  return it == series.end() ? nullptr : &it->second;
}

template <class T>
void index_ids(const std::vector<T>& items, std::unordered_map<std::string, std::size_t>& out) {
  for (std::size_t i = 0; i < items.size(); ++i) out.emplace(items[i].id, i);
}

std::optional<std::size_t> find_in(const std::unordered_map<std::string, std::size_t>& m,
                                   std::string_view id) {
  auto it = m.find(std::string(id));
  if (it == m.end()) return std::nullopt;
  return it->second;
}

std::size_t must_find(const std::unordered_map<std::string, std::size_t>& m, std::string_view id,
                      const char* what) {
  auto idx = find_in(m, id);
  if (!idx) throw InstanceError(std::string("unknown ") + what + " '" + std::string(id) + "'");
  return *idx;
}

}  // namespace

std::optional<Volume> Site::max_at(const std::string& product, int t) const {
  auto* s = series_of(capacity_max, product);
  if (!s || t < 0 || t >= static_cast<int>(s->size())) return std::nullopt;
  return (*s)[static_cast<std::size_t>(t)];
}

Volume Site::min_at(const std::string& product, int t) const {
  auto* s = series_of(capacity_min, product);
  if (!s || t < 0 || t >= static_cast<int>(s->size())) return 0;
  return (*s)[static_cast<std::size_t>(t)];
}

Volume Site::base_at(const std::string& product, int t) const {
  auto* s = series_of(base_occupancy, product);
  if (!s || t < 0 || t >= static_cast<int>(s->size())) return 0;
  return (*s)[static_cast<std::size_t>(t)];
}

double CostWeights::eta_of(const std::string& product) const {
  auto it = eta.find(product);
  return it == eta.end() ? 1.0 : it->second;
}

Instance::Instance(InstanceData data) : data_(std::move(data)) {
  index_ids(data_.products, products_);
  index_ids(data_.sites, sites_);
  index_ids(data_.edges, edges_);
  index_ids(data_.regimes, regimes_);
}

std::optional<std::size_t> Instance::product_index(std::string_view id) const { return find_in(products_, id); }
std::optional<std::size_t> Instance::site_index(std::string_view id) const { return find_in(sites_, id); }
std::optional<std::size_t> Instance::edge_index(std::string_view id) const { return find_in(edges_, id); }
std::optional<std::size_t> Instance::regime_index(std::string_view id) const { return find_in(regimes_, id); }

std::size_t Instance::product_at(std::string_view id) const { return must_find(products_, id, "product"); }
std::size_t Instance::site_at(std::string_view id) const { return must_find(sites_, id, "site"); }
std::size_t Instance::edge_at(std::string_view id) const { return must_find(edges_, id, "edge"); }
std::size_t Instance::regime_at(std::string_view id) const { return must_find(regimes_, id, "regime"); }

Volume Instance::regime_flush_volume(std::size_t regime) const {
  const auto& r = data_.regimes.at(regime);
  if (r.flush_volume) return *r.flush_volume;
  Volume total = 0;
  for (const auto& e : r.edges) total += data_.edges.at(edge_at(e)).pipe_volume;
  return total;
}

std::size_t Instance::regime_origin(std::size_t regime) const {
  const auto& r = data_.regimes.at(regime);
  if (r.edges.empty()) throw InstanceError("regime '" + r.id + "' has no edges");
  return site_at(data_.edges.at(edge_at(r.edges.front())).origin);
}

std::size_t Instance::regime_destination(std::size_t regime) const {
  const auto& r = data_.regimes.at(regime);
  if (r.edges.empty()) throw InstanceError("regime '" + r.id + "' has no edges");
  return site_at(data_.edges.at(edge_at(r.edges.back())).destination);
}

namespace {

class Reporter {
 public:
  void add(std::string code, std::string message) {
    out_.push_back({std::move(code), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

template <class T>
void check_ids(const std::vector<T>& items, const char* what, Reporter& rep) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (item.id.empty()) rep.add("empty_id", std::string("empty ") + what + " id");
    if (item.id.find_first_of("/ \t\n") != std::string::npos)
      rep.add("invalid_id", std::string(what) + " id '" + item.id + "' contains '/' or whitespace");
    if (!seen.insert(item.id).second)
      rep.add("duplicate_id", std::string("duplicate ") + what + " id '" + item.id + "'");
  }
}

void check_times(const std::vector<int>& times, int horizon, const std::string& where, Reporter& rep) {
  for (int t : times) {
    if (t < 0 || t >= horizon) {
      rep.add("time_out_of_range", where + ": time " + std::to_string(t) + " outside the horizon");
      return;
    }
  }
}

}  // namespace

std::vector<Violation> validate_instance(const Instance& instance) {
  Reporter rep;
  const auto& d = instance.data();
  const int horizon = d.grid.horizon_len;

  if (horizon < 1) rep.add("horizon_empty", "horizon must contain at least one time step");
  if (!(d.grid.step_hours > 0)) rep.add("invalid_step", "time step duration must be positive");

  check_ids(d.products, "product", rep);
  check_ids(d.sites, "site", rep);
  check_ids(d.edges, "edge", rep);
  check_ids(d.regimes, "regime", rep);

  for (const auto& p : d.products)
    if (!(p.unit_volume > 0))
      rep.add("nonpositive_unit_volume", "product '" + p.id + "' has non-positive unit volume");

  auto known_product = [&](const std::string& id, const std::string& where) {
    if (instance.product_index(id)) return true;
    rep.add("unknown_reference", where + ": unknown product '" + id + "'");
    return false;
  };

  for (const auto& s : d.sites) {
    const std::string where = "site '" + s.id + "'";
    auto check_series = [&](const auto& series, const char* name) {
      for (const auto& [p, values] : series) {
        known_product(p, where);
        if (static_cast<int>(values.size()) != horizon)
          rep.add("series_length_mismatch", where + ": " + name + " series for '" + p +
                                                "' does not match the horizon length");
      }
    };
    check_series(s.capacity_max, "capacity_max");
    check_series(s.capacity_min, "capacity_min");
    check_series(s.base_occupancy, "base_occupancy");
    for (const auto& [p, v] : s.standard_batch) {
      known_product(p, where);
      if (v <= 0) rep.add("nonpositive_batch", where + ": standard batch for '" + p + "' must be positive");
    }
    for (const auto& [p, values] : s.base_occupancy)
      if (!values.empty() && values.front() < 0)
        rep.add("negative_initial_occupancy", where + ": negative initial occupancy of '" + p + "'");
    for (const auto& [p, maxima] : s.capacity_max) {
      for (int t = 0; t < std::min<int>(horizon, static_cast<int>(maxima.size())); ++t) {
        if (s.min_at(p, t) > maxima[static_cast<std::size_t>(t)]) {
          rep.add("min_exceeds_max", where + ": minimum exceeds maximum capacity of '" + p +
                                         "' at t=" + std::to_string(t));
          break;
        }
      }
    }
  }

  std::set<std::string> edges_in_regimes;
  for (const auto& e : d.edges) {
    const std::string where = "edge '" + e.id + "'";
    if (!instance.site_index(e.origin)) rep.add("unknown_reference", where + ": unknown origin '" + e.origin + "'");
    if (!instance.site_index(e.destination))
      rep.add("unknown_reference", where + ": unknown destination '" + e.destination + "'");
    if (e.origin == e.destination) rep.add("edge_self_loop", where + ": origin equals destination");
    if (e.pipe_volume < 0) rep.add("negative_pipe_volume", where + ": negative pipe volume");
  }

  for (const auto& r : d.regimes) {
    const std::string where = "regime '" + r.id + "'";
    if (r.edges.empty()) {
      rep.add("regime_empty", where + ": no edges");
      continue;
    }
    bool resolved = true;
    std::set<std::string> seen;
    bool simple = true;
    for (const auto& e : r.edges) {
      if (!instance.edge_index(e)) {
        rep.add("unknown_reference", where + ": unknown edge '" + e + "'");
        resolved = false;
      }
      if (!seen.insert(e).second) simple = false;
      edges_in_regimes.insert(e);
    }
    if (!simple) rep.add("regime_path_not_simple", where + ": regime path not simple");
    if (resolved) {
      std::set<std::string> visited;
      for (std::size_t i = 0; i < r.edges.size(); ++i) {
        const auto& e = d.edges[instance.edge_at(r.edges[i])];
        if (i == 0) visited.insert(e.origin);
        if (i + 1 < r.edges.size()) {
          const auto& next = d.edges[instance.edge_at(r.edges[i + 1])];
          if (e.destination != next.origin) {
            rep.add("regime_path_disconnected", where + ": edge '" + e.id + "' does not chain into '" + next.id + "'");
            break;
          }
        }
        if (simple && !visited.insert(e.destination).second) {
          rep.add("regime_path_not_simple", where + ": regime path not simple (revisits site '" +
                                                e.destination + "')");
          break;
        }
      }
    }
    for (const auto& [p, rate] : r.flow_rate) {
      if (!known_product(p, where)) continue;
      if (!(rate > 0)) rep.add("nonpositive_flow_rate", where + ": non-positive flow rate for '" + p + "'");
      if (resolved) {
        const auto& origin = d.edges[instance.edge_at(r.edges.front())].origin;
        if (auto si = instance.site_index(origin); si && !d.sites[*si].standard_batch.contains(p))
          rep.add("missing_standard_batch",
                  where + ": origin '" + origin + "' has no standard batch for '" + p + "'");
      }
    }
    if (r.flush_volume && *r.flush_volume < 0) rep.add("negative_flush_volume", where + ": negative flush volume");
    if (r.step_cost < 0) rep.add("negative_cost", where + ": negative step cost");
    for (const auto& [key, c] : r.batch_cost)
      if (c < 0) rep.add("negative_cost", where + ": negative batch cost for '" + key + "'");
    for (const auto& [e, steps] : r.pass_times) {
      if (!seen.contains(e)) rep.add("unknown_reference", where + ": pass time for edge '" + e + "' not on the path");
      if (steps < 0) rep.add("negative_pass_time", where + ": negative pass time");
    }
  }

  for (const auto& e : d.edges)
    if (!edges_in_regimes.contains(e.id))
      rep.add("edge_not_in_regime", "edge '" + e.id + "' is not used by any regime");

  for (const auto& n : d.nominations) {
    const std::string where = "nomination of '" + n.refinery + "'";
    auto si = instance.site_index(n.refinery);
    if (!si) rep.add("unknown_reference", where + ": unknown site");
    else if (d.sites[*si].kind != SiteKind::refinery)
      rep.add("nomination_not_refinery", where + ": site is not a refinery");
    for (const auto& l : n.limits) {
      known_product(l.product, where);
      if (l.volume < 0) rep.add("negative_nomination", where + ": negative limit for '" + l.product + "'");
    }
  }

  for (const auto& o : d.tank_outages) {
    const std::string where = "tank outage at '" + o.site + "'";
    auto si = instance.site_index(o.site);
    if (!si) rep.add("unknown_reference", where + ": unknown site");
    else if (d.sites[*si].kind != SiteKind::storage) rep.add("outage_not_storage", where + ": not a storage site");
    known_product(o.product, where);
    if (o.reduction < 0) rep.add("negative_reduction", where + ": negative capacity reduction");
    check_times(o.times, horizon, where, rep);
  }
  for (const auto& o : d.transport_outages) {
    const std::string where = "transport outage";
    for (const auto& sel : o.batches) {
      if (sel.regime && !instance.regime_index(*sel.regime))
        rep.add("unknown_reference", where + ": unknown regime '" + *sel.regime + "'");
      if (sel.product) known_product(*sel.product, where);
      if (sel.edge && !instance.edge_index(*sel.edge))
        rep.add("unknown_reference", where + ": unknown edge '" + *sel.edge + "'");
      if (!sel.batch && !sel.regime && !sel.product && !sel.volume && !sel.edge)
        rep.add("empty_selector", where + ": selector matches every batch");
    }
    check_times(o.times, horizon, where, rep);
  }
  for (const auto& l : d.limits) {
    const std::string where = "throughput limit on '" + l.product + "'";
    known_product(l.product, where);
    for (const auto& e : l.edges)
      if (!instance.edge_index(e)) rep.add("unknown_reference", where + ": unknown edge '" + e + "'");
    if (l.limit < 0) rep.add("negative_limit", where + ": negative limit");
    if (l.window.empty()) rep.add("empty_window", where + ": empty time window");
    check_times(l.window, horizon, where, rep);
  }
  for (const auto& g : d.exclusion_groups) {
    std::set<std::string> members(g.members.begin(), g.members.end());
    if (members.size() < 2) rep.add("group_too_small", "exclusion group needs at least two regimes");
    for (const auto& m : g.members)
      if (!instance.regime_index(m)) rep.add("unknown_reference", "exclusion group: unknown regime '" + m + "'");
  }

  const auto& w = d.weights;
  if (w.alpha < 0 || w.beta < 0 || w.gamma < 0 || w.theta < 0)
    rep.add("negative_weight", "objective weights alpha, beta, gamma, theta must be non-negative");
  for (const auto& [p, eta] : w.eta) {
    known_product(p, "eta");
    if (eta < 0) rep.add("negative_weight", "eta for '" + p + "' is negative");
  }
  for (const auto& target : w.distribution_targets) {
    const std::string where = "distribution target '" + target.site + "/" + target.product + "'";
    auto si = instance.site_index(target.site);
    if (!si) rep.add("unknown_reference", where + ": unknown site");
    else if (d.sites[*si].kind != SiteKind::storage) rep.add("target_not_storage", where + ": not a storage site");
    known_product(target.product, where);
    if (target.optimum) {
      if (*target.optimum < 0) rep.add("invalid_target", where + ": negative optimal occupancy");
      if (!(target.weight > 0)) rep.add("invalid_target", where + ": weight k must be positive");
    }
  }
  for (const auto& entry : w.previous_plan) {
    if (!instance.edge_index(entry.edge))
      rep.add("unknown_reference", "previous plan: unknown edge '" + entry.edge + "'");
    if (entry.t < 0 || entry.t >= horizon)
      rep.add("time_out_of_range", "previous plan: time " + std::to_string(entry.t) + " outside the horizon");
  }

  for (const auto& f : d.fixed_transports) {
    const std::string where = "fixed transport on '" + f.regime + "'";
    if (!instance.regime_index(f.regime)) rep.add("unknown_reference", where + ": unknown regime");
    known_product(f.product, where);
    if (f.start < 0 || f.start >= horizon) rep.add("time_out_of_range", where + ": start outside the horizon");
  }

  return rep.take();
}

}  // namespace pipesched
