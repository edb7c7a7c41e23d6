#include "pipesched/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"
#include "pipesched/instance_io.hpp"

namespace pipesched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Merges duplicate variables and drops zero coefficients.
std::vector<Term> normalized(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().var == t.var) out.back().coef += t.coef;
    else out.push_back(t);
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

LinearConstraint row(std::vector<Term> terms, Sense sense, double rhs, Family family) {
  LinearConstraint c;
  c.terms = normalized(std::move(terms));
  c.sense = sense;
  c.rhs = rhs;
  c.family = family;
  return c;
}

}  // namespace

VarId VariableRegistry::add(Variable v) {
  Key key{v.kind, v.first, v.second, v.t};
  if (index_.contains(key)) throw ModelError("duplicate variable coordinate");
  const VarId id = vars_.size();
  index_.emplace(key, id);
  vars_.push_back(v);
  return id;
}

std::optional<VarId> VariableRegistry::lookup(VarKind kind, std::size_t a, std::size_t b, int t) const {
  auto it = index_.find(Key{kind, a, b, t});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<VarId> VariableRegistry::placement(std::size_t edge, std::size_t batch, int t) const {
  return lookup(VarKind::placement, edge, batch, t);
}
std::optional<VarId> VariableRegistry::endpoint(std::size_t edge, std::size_t batch, int t) const {
  return lookup(VarKind::endpoint, edge, batch, t);
}
std::optional<VarId> VariableRegistry::occupancy_upper(std::size_t site, std::size_t product, int t) const {
  return lookup(VarKind::occupancy_upper, site, product, t);
}
std::optional<VarId> VariableRegistry::occupancy_lower(std::size_t site, std::size_t product, int t) const {
  return lookup(VarKind::occupancy_lower, site, product, t);
}
std::optional<VarId> VariableRegistry::deviation(std::size_t site, std::size_t product) const {
  return lookup(VarKind::distribution_deviation, site, product, 0);
}

std::size_t MILPModel::count(Family f) const {
  auto it = metadata.family_counts.find(f);
  return it == metadata.family_counts.end() ? 0 : it->second;
}

std::size_t MILPModel::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(constraints.begin(), constraints.end(), [](const LinearConstraint& c) { return !c.lazy; }));
}

VariableRegistry build_variables(const BatchCatalog& catalog, const Instance& instance) {
  VariableRegistry reg;
  const int t_max = instance.grid().t_max();
  const int horizon = instance.grid().horizon_len;

  for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
    for (const auto& pb : catalog.on_edge(e)) {
      const int len = catalog.spec(pb.batch).length;
      // Starts whose batch would run past the horizon are never created.
      for (int t = 0; t + len <= horizon; ++t) reg.add({VarKind::placement, e, pb.batch, t, true, 0.0, 1.0});
    }
  }
  for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
    for (const auto& pb : catalog.on_edge(e)) {
      const auto& spec = catalog.spec(pb.batch);
      if (!spec.staining || !is_initial(pb.role)) continue;
      for (int t = spec.length; t <= horizon; ++t) reg.add({VarKind::endpoint, e, pb.batch, t, true, 0.0, 1.0});
    }
  }
  for (std::size_t s = 0; s < instance.sites().size(); ++s) {
    if (instance.sites()[s].kind != SiteKind::storage) continue;
    for (std::size_t p = 0; p < instance.products().size(); ++p) {
      for (int t = 0; t <= t_max; ++t) reg.add({VarKind::occupancy_upper, s, p, t, false, -kInf, kInf});
      for (int t = 0; t <= t_max; ++t) reg.add({VarKind::occupancy_lower, s, p, t, false, -kInf, kInf});
    }
  }
  for (const auto& target : instance.weights().distribution_targets) {
    if (!target.optimum) continue;
    const auto s = instance.site_at(target.site);
    const auto p = instance.product_at(target.product);
    if (reg.deviation(s, p)) throw ModelError("duplicate distribution target for '" + target.site + "/" + target.product + "'");
    reg.add({VarKind::distribution_deviation, s, p, 0, false, 0.0, kInf});
  }
  return reg;
}

std::size_t emit_packing(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                         std::vector<LinearConstraint>& out) {
  const int t_max = instance.grid().t_max();
  std::size_t n = 0;
  for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
    for (int t = 0; t <= t_max; ++t) {
      std::vector<Term> terms;
      for (const auto& pb : catalog.on_edge(e)) {
        const int len = catalog.spec(pb.batch).length;
        for (int start = std::max(0, t - len + 1); start <= t; ++start)
          if (auto v = vars.placement(e, pb.batch, start)) terms.push_back({*v, 1.0});
      }
      out.push_back(row(std::move(terms), Sense::le, 1.0, Family::packing));
      ++n;
    }
  }
  return n;
}

std::size_t emit_routes(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                        std::vector<LinearConstraint>& out) {
  const int t_max = instance.grid().t_max();
  std::size_t n = 0;
  for (std::size_t b = 0; b < catalog.specs().size(); ++b) {
    const auto& chain = catalog.chain(b);
    for (int t = 0; t <= t_max; ++t) {
      if (!vars.placement(chain.front(), b, t)) continue;
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        auto here = vars.placement(chain[i], b, t);
        auto next = vars.placement(chain[i + 1], b, t);
        if (!here || !next) throw ModelError("route chain of '" + catalog.spec(b).id + "' is missing a variable");
        out.push_back(row({{*here, 1.0}, {*next, -1.0}}, Sense::eq, 0.0, Family::routes));
        ++n;
      }
    }
  }
  return n;
}

std::size_t emit_flushing(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                          const SemanticOptions& semantics, std::vector<LinearConstraint>& out) {
  const int horizon = instance.grid().horizon_len;
  std::size_t n = 0;
  for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
    for (const auto& pb : catalog.on_edge(e)) {
      const auto& stain = catalog.spec(pb.batch);
      if (!stain.staining || !is_initial(pb.role)) continue;
      const auto& flushes = catalog.flush_candidates(pb.batch);
      const auto excluded = catalog.exclusion_set(e, stain.product);
      int shortest_follow = stain.length;
      for (auto f : flushes) shortest_follow = std::min(shortest_follow, catalog.spec(f).length);

      // End-point marker linkage.
      for (int t = 0; t + stain.length <= horizon; ++t) {
        auto v = vars.placement(e, pb.batch, t);
        auto w = vars.endpoint(e, pb.batch, t + stain.length);
        out.push_back(row({{*v, 1.0}, {*w, -1.0}}, Sense::eq, 0.0, Family::flushing));
        ++n;
      }
      // No other staining product may start where this one ends.
      for (int t = stain.length; t <= horizon; ++t) {
        std::vector<Term> terms{{*vars.endpoint(e, pb.batch, t), 1.0}};
        for (auto b : excluded)
          if (auto v = vars.placement(e, b, t)) terms.push_back({*v, 1.0});
        out.push_back(row(std::move(terms), Sense::le, 1.0, Family::flushing));
        ++n;
      }
      // The end point must be followed by the same batch or a large enough flush.
      for (int t = stain.length; t <= horizon; ++t) {
        if (semantics.relax_terminal_flush && t + shortest_follow > horizon) continue;
        std::vector<Term> terms{{*vars.endpoint(e, pb.batch, t), 1.0}};
        if (auto v = vars.placement(e, pb.batch, t)) terms.push_back({*v, -1.0});
        for (auto f : flushes)
          if (auto v = vars.placement(e, f, t)) terms.push_back({*v, -1.0});
        out.push_back(row(std::move(terms), Sense::le, 0.0, Family::flushing));
        ++n;
      }
    }
  }
  return n;
}

std::size_t emit_regime_exclusions(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                                   std::vector<LinearConstraint>& out) {
  const int t_max = instance.grid().t_max();
  std::size_t n = 0;
  for (const auto& group : instance.data().exclusion_groups) {
    std::set<std::size_t> members;
    for (const auto& id : group.members) {
      auto r = instance.regime_index(id);
      if (!r) throw ModelError("exclusion group references unknown regime '" + id + "'");
      members.insert(*r);
    }
    std::vector<std::pair<std::size_t, std::size_t>> initial;  // (edge, batch)
    for (std::size_t b = 0; b < catalog.specs().size(); ++b)
      if (members.contains(catalog.spec(b).regime)) initial.emplace_back(catalog.initial_edge(b), b);

    for (int t = 0; t <= t_max; ++t) {
      std::vector<Term> terms;
      for (const auto& [e, b] : initial) {
        const int last = std::min(t + catalog.spec(b).length, t_max);
        for (int s = t; s <= last; ++s)
          if (auto v = vars.placement(e, b, s)) terms.push_back({*v, 1.0});
      }
      out.push_back(row(std::move(terms), Sense::le, 1.0, Family::exclusion));
      ++n;
    }
  }
  return n;
}

Volume tank_outage_reduction(const Instance& instance, std::size_t site, std::size_t product, int t) {
  Volume total = 0;
  const auto& s = instance.sites().at(site);
  const auto& p = instance.products().at(product);
  for (const auto& o : instance.data().tank_outages)
    if (o.site == s.id && o.product == p.id && std::binary_search(o.times.begin(), o.times.end(), t))
      total += o.reduction;
  return total;
}

void emit_capacity(const BatchCatalog& catalog, const Instance& instance, const ModelOptions& options,
                   MILPModel& model) {
  const int t_max = instance.grid().t_max();
  const auto& vars = model.vars;
  auto& out = model.constraints;
  std::size_t defs = 0, uppers = 0, lowers = 0;

  for (std::size_t s = 0; s < instance.sites().size(); ++s) {
    const auto& site = instance.sites()[s];
    if (site.kind != SiteKind::storage) continue;
    for (std::size_t p = 0; p < instance.products().size(); ++p) {
      const auto& pid = instance.products()[p].id;
      struct Flow {
        std::size_t edge, batch;
        double volume;
        int length;
      };
      std::vector<Flow> inflow, outflow;
      for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
        const auto& edge = instance.edges()[e];
        for (const auto& pb : catalog.on_edge(e)) {
          const auto& spec = catalog.spec(pb.batch);
          if (spec.product != p) continue;
          Flow f{e, pb.batch, static_cast<double>(spec.volume), spec.length};
          if (edge.destination == site.id && is_final(pb.role)) inflow.push_back(f);
          if (edge.origin == site.id && is_initial(pb.role)) outflow.push_back(f);
        }
      }
      auto add_placement = [&](std::vector<Term>& terms, const Flow& f, int start, double sign) {
        if (start < 0) return;
        if (auto v = vars.placement(f.edge, f.batch, start)) terms.push_back({*v, sign * f.volume});
      };

      for (int t = 0; t <= t_max; ++t) {
        const auto cu = *vars.occupancy_upper(s, p, t);
        const auto cl = *vars.occupancy_lower(s, p, t);
        std::vector<Term> upper{{cu, 1.0}};
        std::vector<Term> lower{{cl, 1.0}};
        double rhs = static_cast<double>(site.base_at(pid, t));
        if (options.capacity_form == CapacityForm::incremental) {
          // Upper level: inflow counted at start, outflow at completion;
          // lower level the other way round.
          if (t > 0) {
            upper.push_back({*vars.occupancy_upper(s, p, t - 1), -1.0});
            lower.push_back({*vars.occupancy_lower(s, p, t - 1), -1.0});
            rhs -= static_cast<double>(site.base_at(pid, t - 1));
          }
          for (const auto& f : inflow) {
            add_placement(upper, f, t, -1.0);
            add_placement(lower, f, t - f.length, -1.0);
          }
          for (const auto& f : outflow) {
            add_placement(upper, f, t - f.length, 1.0);
            add_placement(lower, f, t, 1.0);
          }
        } else {
          for (const auto& f : inflow) {
            for (int s2 = 0; s2 <= t; ++s2) add_placement(upper, f, s2, -1.0);
            for (int s2 = 0; s2 <= t - f.length; ++s2) add_placement(lower, f, s2, -1.0);
          }
          for (const auto& f : outflow) {
            for (int s2 = 0; s2 <= t - f.length; ++s2) add_placement(upper, f, s2, 1.0);
            for (int s2 = 0; s2 <= t; ++s2) add_placement(lower, f, s2, 1.0);
          }
        }
        out.push_back(row(std::move(upper), Sense::eq, rhs, Family::capacity_definition));
        out.push_back(row(std::move(lower), Sense::eq, rhs, Family::capacity_definition));
        defs += 2;
      }

      if (auto it = site.capacity_max.find(pid); it != site.capacity_max.end()) {
        for (int t = 0; t <= t_max; ++t) {
          const double bound =
              static_cast<double>(site.max_at(pid, t).value_or(0) - tank_outage_reduction(instance, s, p, t));
          auto r = row({{*vars.occupancy_upper(s, p, t), 1.0}}, Sense::le, bound, Family::capacity_upper);
          r.lazy = options.capacity_lazy;
          model.upper_bound_rows[{s, p, t}] = out.size();
          out.push_back(std::move(r));
          ++uppers;
        }
      } else if (std::any_of(instance.data().tank_outages.begin(), instance.data().tank_outages.end(),
                             [&](const TankOutage& o) { return o.site == site.id && o.product == pid; })) {
        model.metadata.warnings.push_back("tank outage on uncapped product '" + pid + "' at '" + site.id +
                                          "' has no effect");
      }
      for (int t = 0; t <= t_max; ++t) {
        auto r = row({{*vars.occupancy_lower(s, p, t), 1.0}}, Sense::ge, static_cast<double>(site.min_at(pid, t)),
                     Family::capacity_lower);
        r.lazy = options.capacity_lazy;
        model.lower_bound_rows[{s, p, t}] = out.size();
        out.push_back(std::move(r));
        ++lowers;
      }
    }
  }
  model.metadata.family_counts[Family::capacity_definition] += defs;
  model.metadata.family_counts[Family::capacity_upper] += uppers;
  model.metadata.family_counts[Family::capacity_lower] += lowers;
}

namespace {

std::set<VarId> outage_zeroes(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars) {
  std::set<VarId> zero;
  for (const auto& o : instance.data().transport_outages) {
    for (const auto& sel : o.batches) {
      auto matches = catalog.select(instance, sel);
      if (matches.empty()) throw ModelError("transport outage references a nonexistent batch coordinate");
      for (const auto& pb : matches)
        for (int t : o.times)
          if (auto v = vars.placement(pb.edge, pb.batch, t)) zero.insert(*v);
    }
  }
  return zero;
}

}  // namespace

std::size_t emit_outages(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                         std::vector<LinearConstraint>& out) {
  std::size_t n = 0;
  for (VarId v : outage_zeroes(instance, catalog, vars)) {
    out.push_back(row({{v, 1.0}}, Sense::eq, 0.0, Family::outage));
    ++n;
  }
  return n;
}

std::size_t emit_throughput_limits(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                                   const SemanticOptions& semantics, std::vector<LinearConstraint>& out) {
  std::size_t n = 0;
  for (const auto& limit : instance.data().limits) {
    const auto p = instance.product_at(limit.product);
    std::vector<Term> terms;
    for (const auto& eid : limit.edges) {
      const auto e = instance.edge_at(eid);
      for (const auto& pb : catalog.on_edge(e)) {
        const auto& spec = catalog.spec(pb.batch);
        if (spec.product != p) continue;
        if (!semantics.throughput_per_edge && !is_initial(pb.role)) continue;
        for (int t : limit.window)
          if (auto v = vars.placement(e, pb.batch, t)) terms.push_back({*v, static_cast<double>(spec.volume)});
      }
    }
    out.push_back(row(std::move(terms), Sense::le, static_cast<double>(limit.limit), Family::throughput));
    ++n;
  }
  return n;
}

std::vector<std::tuple<std::size_t, std::size_t, int>> fixed_placements(const Instance& instance,
                                                                        const BatchCatalog& catalog) {
  std::vector<std::tuple<std::size_t, std::size_t, int>> out;
  for (const auto& f : instance.data().fixed_transports) {
    const auto r = instance.regime_at(f.regime);
    const auto origin = instance.regime_origin(r);
    Volume volume = 0;
    if (f.volume) {
      volume = *f.volume;
    } else {
      const auto& sb = instance.sites()[origin].standard_batch;
      auto it = sb.find(f.product);
      if (it == sb.end()) throw ModelError("fixed transport on '" + f.regime + "': no standard batch for '" + f.product + "'");
      volume = it->second;
    }
    const auto id = f.regime + "/" + f.product + "/" + std::to_string(volume);
    auto b = catalog.find(id);
    if (!b) throw ModelError("fixed transport references unknown batch '" + id + "'");
    out.emplace_back(catalog.initial_edge(*b), *b, f.start);
  }
  for (const auto& entry : instance.weights().previous_plan) {
    if (!entry.executed) continue;
    auto b = catalog.find(entry.batch);
    if (!b) throw ModelError("executed plan entry references unknown batch '" + entry.batch + "'");
    out.emplace_back(instance.edge_at(entry.edge), *b, entry.t);
  }
  return out;
}

std::size_t emit_fixed_transport(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                                 std::vector<LinearConstraint>& out) {
  const auto zero = outage_zeroes(instance, catalog, vars);
  std::set<VarId> fixed;
  for (const auto& [e, b, t] : fixed_placements(instance, catalog)) {
    auto v = vars.placement(e, b, t);
    if (!v)
      throw ModelError("fixed placement of '" + catalog.spec(b).id + "' at t=" + std::to_string(t) +
                       " does not fit the horizon or edge");
    if (zero.contains(*v))
      throw ModelError("contradictory fixings: '" + catalog.spec(b).id + "' at t=" + std::to_string(t) +
                       " is both fixed and excluded by an outage");
    fixed.insert(*v);
  }
  for (VarId v : fixed) out.push_back(row({{v, 1.0}}, Sense::eq, 1.0, Family::fixed));
  return fixed.size();
}

std::size_t emit_nominations(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                             std::vector<LinearConstraint>& out) {
  std::size_t n = 0;
  for (const auto& nom : instance.data().nominations) {
    for (const auto& limit : nom.limits) {
      const auto p = instance.product_at(limit.product);
      std::vector<Term> terms;
      for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
        if (instance.edges()[e].origin != nom.refinery) continue;
        for (const auto& pb : catalog.on_edge(e)) {
          const auto& spec = catalog.spec(pb.batch);
          if (spec.product != p || !is_initial(pb.role)) continue;
          for (int t = 0; t <= instance.grid().t_max(); ++t)
            if (auto v = vars.placement(e, pb.batch, t)) terms.push_back({*v, static_cast<double>(spec.volume)});
        }
      }
      out.push_back(row(std::move(terms), Sense::le, static_cast<double>(limit.volume), Family::nomination));
      ++n;
    }
  }
  return n;
}

double batch_cost(const Instance& instance, const BatchSpec& spec) {
  const auto& regime = instance.regimes().at(spec.regime);
  double cost = regime.step_cost * spec.length;
  if (auto it = regime.batch_cost.find(spec.id); it != regime.batch_cost.end()) {
    cost += it->second;
  } else if (auto jt = regime.batch_cost.find(instance.products().at(spec.product).id);
             jt != regime.batch_cost.end()) {
    cost += jt->second;
  }
  return cost;
}

Objective emit_objective(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                         std::vector<LinearConstraint>& out) {
  const auto& w = instance.weights();
  const int t_max = instance.grid().t_max();
  Objective obj;
  std::vector<Term> terms;

  // Refinery intake.
  if (w.alpha != 0) {
    for (const auto& nom : instance.data().nominations) {
      std::set<std::size_t> nominated;
      for (const auto& l : nom.limits) nominated.insert(instance.product_at(l.product));
      for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
        if (instance.edges()[e].origin != nom.refinery) continue;
        for (const auto& pb : catalog.on_edge(e)) {
          const auto& spec = catalog.spec(pb.batch);
          if (!is_initial(pb.role) || !nominated.contains(spec.product)) continue;
          const double coef = w.alpha * w.eta_of(instance.products()[spec.product].id) * static_cast<double>(spec.volume);
          for (int t = 0; t <= t_max; ++t)
            if (auto v = vars.placement(e, pb.batch, t)) terms.push_back({*v, coef});
        }
      }
    }
  }

  // Final distribution.
  for (const auto& target : w.distribution_targets) {
    auto s = instance.site_index(target.site);
    if (!s || instance.sites()[*s].kind != SiteKind::storage)
      throw ModelError("distribution target on non-storage site '" + target.site + "'");
    const auto p = instance.product_at(target.product);
    const auto level = *vars.occupancy_lower(*s, p, t_max);
    if (target.optimum) {
      const auto d = *vars.deviation(*s, p);
      const double opt = static_cast<double>(*target.optimum);
      out.push_back(row({{d, 1.0}, {level, -1.0}}, Sense::ge, -opt, Family::distribution));
      out.push_back(row({{d, 1.0}, {level, 1.0}}, Sense::ge, opt, Family::distribution));
      terms.push_back({d, -w.beta * target.weight});
    } else {
      terms.push_back({level, w.beta * target.weight});
    }
  }

  // Re-planning: -sum (1 - v) over the previous plan.
  std::set<VarId> previous;
  for (const auto& entry : w.previous_plan) {
    auto b = catalog.find(entry.batch);
    auto e = instance.edge_index(entry.edge);
    std::optional<VarId> v;
    if (b && e) v = vars.placement(*e, *b, entry.t);
    if (!v)
      throw ModelError("previous plan entry '" + entry.edge + "/" + entry.batch + "@" + std::to_string(entry.t) +
                       "' is not a placeable coordinate");
    previous.insert(*v);
  }
  for (VarId v : previous) terms.push_back({v, w.gamma});
  obj.constant = -w.gamma * static_cast<double>(previous.size());

  // Pumping cost on every initial placement.
  if (w.theta != 0) {
    for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
      for (const auto& pb : catalog.on_edge(e)) {
        if (!is_initial(pb.role)) continue;
        const double cost = batch_cost(instance, catalog.spec(pb.batch));
        for (int t = 0; t <= t_max; ++t)
          if (auto v = vars.placement(e, pb.batch, t)) terms.push_back({*v, -w.theta * cost});
      }
    }
  }

  obj.terms = normalized(std::move(terms));
  return obj;
}

MILPModel build_model(const Instance& instance, const BatchCatalog& catalog, const ModelOptions& options) {
  MILPModel model;
  model.vars = build_variables(catalog, instance);
  auto& meta = model.metadata;
  auto& rows = model.constraints;
  for (Family f : kAllFamilies) meta.family_counts[f] = 0;

  meta.family_counts[Family::packing] = emit_packing(catalog, instance, model.vars, rows);
  meta.family_counts[Family::routes] = emit_routes(catalog, instance, model.vars, rows);
  meta.family_counts[Family::flushing] = emit_flushing(catalog, instance, model.vars, options.semantics, rows);
  meta.family_counts[Family::exclusion] = emit_regime_exclusions(catalog, instance, model.vars, rows);
  emit_capacity(catalog, instance, options, model);
  meta.family_counts[Family::outage] = emit_outages(instance, catalog, model.vars, rows);
  meta.family_counts[Family::throughput] =
      emit_throughput_limits(instance, catalog, model.vars, options.semantics, rows);
  meta.family_counts[Family::nomination] = emit_nominations(instance, catalog, model.vars, rows);
  meta.family_counts[Family::fixed] = emit_fixed_transport(instance, catalog, model.vars, rows);
  const auto before = rows.size();
  model.objective = emit_objective(instance, catalog, model.vars, rows);
  meta.family_counts[Family::distribution] = rows.size() - before;

  meta.instance_hash = instance_hash(instance);
  for (const auto& v : model.vars.all()) {
    switch (v.kind) {
      case VarKind::placement: ++meta.placement_vars; break;
      case VarKind::endpoint: ++meta.endpoint_vars; break;
      case VarKind::occupancy_upper:
      case VarKind::occupancy_lower: ++meta.occupancy_vars; break;
      case VarKind::distribution_deviation: ++meta.deviation_vars; break;
    }
  }
  for (std::size_t s = 0; s < instance.sites().size(); ++s) {
    if (instance.sites()[s].kind != SiteKind::storage) continue;
    Volume worst = 0;
    for (std::size_t r = 0; r < instance.regimes().size(); ++r) {
      if (instance.regime_origin(r) != s && instance.regime_destination(r) != s) continue;
      Volume path = 0;
      for (const auto& e : instance.regimes()[r].edges) path += instance.edges()[instance.edge_at(e)].pipe_volume;
      worst = std::max(worst, path);
    }
    meta.counting_error_bound[instance.sites()[s].id] = worst;
  }
  for (const auto& w : catalog.warnings()) meta.warnings.push_back(w);
  return model;
}

double row_activity(const LinearConstraint& row, const std::vector<double>& values) {
  double a = 0;
  for (const auto& t : row.terms) a += t.coef * values.at(t.var);
  return a;
}

double row_violation(const LinearConstraint& row, const std::vector<double>& values) {
  const double a = row_activity(row, values);
  switch (row.sense) {
    case Sense::le: return std::max(0.0, a - row.rhs);
    case Sense::ge: return std::max(0.0, row.rhs - a);
    case Sense::eq: return std::abs(a - row.rhs);
  }
  return 0.0;
}

double objective_value(const Objective& objective, const std::vector<double>& values) {
  double total = objective.constant;
  for (const auto& t : objective.terms) total += t.coef * values.at(t.var);
  return total;
}

std::string metadata_json(const MILPModel& model) {
  nlohmann::ordered_json j;
  const auto& m = model.metadata;
  j["instance_hash"] = m.instance_hash;
  j["variables"] = {{"total", model.vars.size()},
                    {"placement", m.placement_vars},
                    {"endpoint", m.endpoint_vars},
                    {"occupancy", m.occupancy_vars},
                    {"deviation", m.deviation_vars}};
  j["constraints"] = {{"total", model.constraints.size()}, {"active", model.active_count()}};
  nlohmann::ordered_json families = nlohmann::ordered_json::object();
  for (Family f : kAllFamilies) families[std::string(family_name(f))] = model.count(f);
  j["families"] = std::move(families);
  j["counting_error_bound"] = nlohmann::ordered_json::object();
  for (const auto& [site, bound] : m.counting_error_bound) j["counting_error_bound"][site] = bound;
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

}  // namespace pipesched
