// Feasibility and objective semantics re-derived from the instance without
// touching the model emitters. Disagreement between the two is a bug in one
// of them.

#include "pipesched/validator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pipesched/util.hpp"

namespace pipesched {

Rational to_rational(double value) {
  std::string text = format_number(value);
  if (text == "inf" || text == "-inf") throw ValidationError("cannot represent an infinite weight exactly");
  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '-') {
    negative = true;
    ++pos;
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    exponent = std::stol(text.substr(e + 1));
    text = text.substr(0, e);
  }
  boost::multiprecision::cpp_int digits = 0;
  long frac_digits = 0;
  bool after_point = false;
  for (; pos < text.size(); ++pos) {
    if (text[pos] == '.') {
      after_point = true;
      continue;
    }
    digits = digits * 10 + (text[pos] - '0');
    if (after_point) ++frac_digits;
  }
  exponent -= frac_digits;
  Rational r(digits);
  boost::multiprecision::cpp_int scale = 1;
  for (long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  if (exponent < 0) r /= Rational(scale);
  else r *= Rational(scale);
  return negative ? -r : r;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

const OccupancyTrack* OccupancySeries::find(std::size_t site, std::size_t product) const {
  for (const auto& t : tracks)
    if (t.site == site && t.product == product) return &t;
  return nullptr;
}

std::size_t ViolationReport::count(Family f) const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [&](const ViolationItem& v) { return v.family == f; }));
}

namespace {

struct Ctx {
  const Instance& inst;
  const BatchCatalog& cat;
  int t_max;

  const BatchSpec& spec(const Placement& p) const { return cat.spec(p.batch); }
  const std::string& edge_id(std::size_t e) const { return inst.edges()[e].id; }
  std::string where(const Placement& p) const {
    return edge_id(p.edge) + "/" + spec(p).id + "@" + std::to_string(p.start);
  }
  bool in_horizon(const Placement& p) const { return p.start >= 0 && p.start + spec(p).length <= t_max + 1; }
  bool on_path(const Placement& p) const { return cat.role_on(p.edge, p.batch).has_value(); }
};

Volume reduction_at(const Instance& inst, const std::string& site, const std::string& product, int t) {
  Volume r = 0;
  for (const auto& o : inst.data().tank_outages)
    if (o.site == site && o.product == product && std::find(o.times.begin(), o.times.end(), t) != o.times.end())
      r += o.reduction;
  return r;
}

double cost_of(const Instance& inst, const BatchSpec& spec) {
  const auto& regime = inst.regimes()[spec.regime];
  double c = regime.step_cost * static_cast<double>(spec.length);
  const auto& product = inst.products()[spec.product].id;
  if (regime.batch_cost.contains(spec.id)) c += regime.batch_cost.at(spec.id);
  else if (regime.batch_cost.contains(product)) c += regime.batch_cost.at(product);
  return c;
}

bool selector_matches(const Ctx& c, const BatchSelector& sel, const Placement& p) {
  const auto& s = c.spec(p);
  if (sel.batch && *sel.batch != s.id) return false;
  if (sel.regime && *sel.regime != c.inst.regimes()[s.regime].id) return false;
  if (sel.product && *sel.product != c.inst.products()[s.product].id) return false;
  if (sel.volume && *sel.volume != s.volume) return false;
  if (sel.edge && *sel.edge != c.edge_id(p.edge)) return false;
  return true;
}

OccupancySeries simulate(const Ctx& c, const std::vector<Placement>& placements) {
  OccupancySeries series;
  const auto horizon = static_cast<std::size_t>(c.t_max + 1);
  for (std::size_t s = 0; s < c.inst.sites().size(); ++s) {
    const auto& site = c.inst.sites()[s];
    if (site.kind != SiteKind::storage) continue;
    for (std::size_t p = 0; p < c.inst.products().size(); ++p) {
      OccupancyTrack track{s, p, std::vector<Volume>(horizon), std::vector<Volume>(horizon)};
      const auto& pid = c.inst.products()[p].id;
      for (int t = 0; t <= c.t_max; ++t) {
        Volume upper = site.base_at(pid, t);
        Volume lower = upper;
        for (const auto& pl : placements) {
          const auto& spec = c.spec(pl);
          if (spec.product != p) continue;
          const auto& edge = c.inst.edges()[pl.edge];
          const auto role = *c.cat.role_on(pl.edge, pl.batch);
          if (edge.destination == site.id && is_final(role)) {
            if (pl.start <= t) upper += spec.volume;
            if (pl.start + spec.length <= t) lower += spec.volume;
          }
          if (edge.origin == site.id && is_initial(role)) {
            if (pl.start + spec.length <= t) upper -= spec.volume;
            if (pl.start <= t) lower -= spec.volume;
          }
        }
        track.upper[static_cast<std::size_t>(t)] = upper;
        track.lower[static_cast<std::size_t>(t)] = lower;
      }
      series.tracks.push_back(std::move(track));
    }
  }
  return series;
}

}  // namespace

OccupancySeries simulate_occupancy(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule) {
  Ctx c{instance, catalog, instance.grid().t_max()};
  for (const auto& p : schedule.placements) {
    if (!c.on_path(p)) throw ValidationError("placement " + c.where(p) + " is not on its regime path");
    if (!c.in_horizon(p)) throw ValidationError("placement " + c.where(p) + " lies outside the horizon");
  }
  return simulate(c, schedule.placements);
}

ViolationReport check_schedule(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule,
                               const SemanticOptions& semantics) {
  Ctx c{instance, catalog, instance.grid().t_max()};
  ViolationReport rep;
  auto add = [&](Family f, std::string coord, double measured, double bound, std::string msg) {
    rep.items.push_back({f, std::move(coord), measured, bound, std::move(msg)});
  };

  std::vector<Placement> valid;
  for (const auto& p : schedule.placements) {
    if (!c.on_path(p)) {
      add(Family::routes, c.where(p), 1, 0, "batch is not routed over this edge");
      continue;
    }
    if (!c.in_horizon(p)) {
      add(Family::horizon_fit, c.where(p), p.start + c.spec(p).length, c.t_max + 1, "batch does not fit the horizon");
      continue;
    }
    valid.push_back(p);
  }
  auto has = [&](std::size_t e, std::size_t b, int t) {
    return std::binary_search(valid.begin(), valid.end(), Placement{e, b, t});
  };

  // Packing: at most one batch occupies an edge at any time.
  for (std::size_t e = 0; e < instance.edges().size(); ++e) {
    std::vector<int> load(static_cast<std::size_t>(c.t_max + 1), 0);
    for (const auto& p : valid)
      if (p.edge == e)
        for (int t = p.start; t < p.start + c.spec(p).length; ++t) ++load[static_cast<std::size_t>(t)];
    for (int t = 0; t <= c.t_max; ++t)
      if (load[static_cast<std::size_t>(t)] > 1)
        add(Family::packing, c.edge_id(e) + "@" + std::to_string(t), load[static_cast<std::size_t>(t)], 1,
            "overlapping batches");
  }

  // Routes: every edge of the regime carries the batch at the same time.
  for (const auto& p : valid) {
    for (auto e : catalog.chain(p.batch)) {
      if (e == p.edge || has(e, p.batch, p.start)) continue;
      add(Family::routes, c.where(p) + "->" + c.edge_id(e), 0, 1,
          "batch missing on edge '" + c.edge_id(e) + "' of its regime");
    }
  }

  // Flushing on initial edges.
  for (const auto& p : valid) {
    const auto& stain = c.spec(p);
    if (!stain.staining || catalog.initial_edge(p.batch) != p.edge) continue;
    const int end = p.start + stain.length;
    const Volume needed = instance.regime_flush_volume(stain.regime);
    bool followed = false;
    int shortest = stain.length;
    for (std::size_t b = 0; b < catalog.specs().size(); ++b) {
      const auto& other = catalog.spec(b);
      if (!catalog.role_on(p.edge, b)) continue;
      const bool flush = !other.staining && other.regime == stain.regime && other.volume >= needed;
      if (flush) shortest = std::min(shortest, other.length);
      if (!has(p.edge, b, end)) continue;
      if (b == p.batch || flush) followed = true;
      if (other.staining && other.product != stain.product)
        add(Family::flushing, c.where(p), 1, 0, "staining batch '" + other.id + "' starts where '" + stain.id + "' ends");
    }
    const bool exempt = semantics.relax_terminal_flush && end + shortest > c.t_max + 1;
    if (!followed && !exempt)
      add(Family::flushing, c.where(p), 0, 1, "staining batch not followed by itself or a flush");
  }

  // Regime exclusion windows over initial batches.
  for (const auto& group : instance.data().exclusion_groups) {
    std::set<std::string> members(group.members.begin(), group.members.end());
    std::vector<Placement> inits;
    for (const auto& p : valid)
      if (catalog.initial_edge(p.batch) == p.edge && members.contains(instance.regimes()[c.spec(p).regime].id))
        inits.push_back(p);
    for (int t = 0; t <= c.t_max; ++t) {
      int n = 0;
      for (const auto& p : inits)
        if (p.start >= t && p.start <= t + c.spec(p).length) ++n;
      if (n > 1) add(Family::exclusion, "group@" + std::to_string(t), n, 1, "mutually exclusive regimes overlap");
    }
  }

  // Storage levels.
  const auto series = simulate(c, valid);
  for (const auto& track : series.tracks) {
    const auto& site = instance.sites()[track.site];
    const auto& pid = instance.products()[track.product].id;
    for (int t = 0; t <= c.t_max; ++t) {
      const auto i = static_cast<std::size_t>(t);
      const std::string coord = site.id + "/" + pid + "@" + std::to_string(t);
      if (auto cap = site.max_at(pid, t)) {
        const Volume bound = *cap - reduction_at(instance, site.id, pid, t);
        if (track.upper[i] > bound)
          add(Family::capacity_upper, coord, static_cast<double>(track.upper[i]), static_cast<double>(bound),
              "blocked occupancy exceeds capacity");
      }
      const Volume floor = site.min_at(pid, t);
      if (track.lower[i] < floor)
        add(Family::capacity_lower, coord, static_cast<double>(track.lower[i]), static_cast<double>(floor),
            "on-stock occupancy below minimum");
    }
  }

  // Transport outages.
  for (const auto& o : instance.data().transport_outages) {
    for (const auto& p : valid) {
      if (std::find(o.times.begin(), o.times.end(), p.start) == o.times.end()) continue;
      for (const auto& sel : o.batches) {
        if (selector_matches(c, sel, p)) {
          add(Family::outage, c.where(p), 1, 0, "batch placed during a transport outage");
          break;
        }
      }
    }
  }

  // Throughput limits.
  for (const auto& limit : instance.data().limits) {
    Volume total = 0;
    for (const auto& p : valid) {
      const auto& s = c.spec(p);
      if (instance.products()[s.product].id != limit.product) continue;
      if (std::find(limit.edges.begin(), limit.edges.end(), c.edge_id(p.edge)) == limit.edges.end()) continue;
      if (std::find(limit.window.begin(), limit.window.end(), p.start) == limit.window.end()) continue;
      if (!semantics.throughput_per_edge && catalog.initial_edge(p.batch) != p.edge) continue;
      total += s.volume;
    }
    if (total > limit.limit)
      add(Family::throughput, limit.product, static_cast<double>(total), static_cast<double>(limit.limit),
          "throughput limit exceeded");
  }

  // Nominations.
  for (const auto& nom : instance.data().nominations) {
    for (const auto& l : nom.limits) {
      Volume total = 0;
      for (const auto& p : valid) {
        const auto& s = c.spec(p);
        if (instance.edges()[p.edge].origin != nom.refinery || catalog.initial_edge(p.batch) != p.edge) continue;
        if (instance.products()[s.product].id == l.product) total += s.volume;
      }
      if (total > l.volume)
        add(Family::nomination, nom.refinery + "/" + l.product, static_cast<double>(total),
            static_cast<double>(l.volume), "nomination exceeded");
    }
  }

  // Fixed transports and executed plan entries.
  for (const auto& f : instance.data().fixed_transports) {
    const auto& regime = instance.regimes()[instance.regime_at(f.regime)];
    const auto& origin = instance.edges()[instance.edge_at(regime.edges.front())].origin;
    const auto& sb = instance.sites()[instance.site_at(origin)].standard_batch;
    const Volume volume = f.volume ? *f.volume : (sb.contains(f.product) ? sb.at(f.product) : 0);
    const std::string id = f.regime + "/" + f.product + "/" + std::to_string(volume);
    auto b = catalog.find(id);
    const auto e = instance.edge_at(regime.edges.front());
    if (!b || !has(e, *b, f.start))
      add(Family::fixed, id + "@" + std::to_string(f.start), 0, 1, "fixed transport not scheduled");
  }
  for (const auto& entry : instance.weights().previous_plan) {
    if (!entry.executed) continue;
    auto b = catalog.find(entry.batch);
    auto e = instance.edge_index(entry.edge);
    if (!b || !e || !has(*e, *b, entry.t))
      add(Family::fixed, entry.edge + "/" + entry.batch + "@" + std::to_string(entry.t), 0, 1,
          "executed plan entry missing");
  }

  for (std::size_t s = 0; s < instance.sites().size(); ++s) {
    const auto& site = instance.sites()[s];
    if (site.kind != SiteKind::storage) continue;
    Volume worst = 0;
    for (const auto& regime : instance.regimes()) {
      if (regime.edges.empty()) continue;
      const auto& first = instance.edges()[instance.edge_at(regime.edges.front())];
      const auto& last = instance.edges()[instance.edge_at(regime.edges.back())];
      if (first.origin != site.id && last.destination != site.id) continue;
      Volume path = 0;
      for (const auto& e : regime.edges) path += instance.edges()[instance.edge_at(e)].pipe_volume;
      worst = std::max(worst, path);
    }
    rep.counting_error_bound.emplace_back(site.id, worst);
  }
  return rep;
}

ObjectiveBreakdown evaluate_objective(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule,
                                      const CostWeights& weights) {
  Ctx c{instance, catalog, instance.grid().t_max()};
  ObjectiveBreakdown out;

  for (const auto& nom : instance.data().nominations) {
    std::set<std::string> nominated;
    for (const auto& l : nom.limits) nominated.insert(l.product);
    for (const auto& p : schedule.placements) {
      const auto& s = c.spec(p);
      const auto& pid = instance.products()[s.product].id;
      if (instance.edges()[p.edge].origin != nom.refinery || catalog.initial_edge(p.batch) != p.edge) continue;
      if (!nominated.contains(pid)) continue;
      out.inflow += to_rational(weights.eta_of(pid)) * s.volume;
    }
  }

  if (!weights.distribution_targets.empty()) {
    std::vector<Placement> valid;
    for (const auto& p : schedule.placements)
      if (c.on_path(p) && c.in_horizon(p)) valid.push_back(p);
    const auto series = simulate(c, valid);
    for (const auto& target : weights.distribution_targets) {
      const auto* track = series.find(instance.site_at(target.site), instance.product_at(target.product));
      if (!track) throw ValidationError("distribution target on non-storage site '" + target.site + "'");
      const Volume final_level = track->lower.back();
      if (target.optimum) {
        const Volume gap = final_level > *target.optimum ? final_level - *target.optimum : *target.optimum - final_level;
        out.distribution -= to_rational(target.weight) * gap;
      } else {
        out.distribution += to_rational(target.weight) * final_level;
      }
    }
  }

  std::set<std::tuple<std::string, std::string, int>> previous;
  for (const auto& entry : weights.previous_plan) previous.emplace(entry.edge, entry.batch, entry.t);
  for (const auto& [edge, batch, t] : previous) {
    const int realized = [&] {
      auto b = catalog.find(batch);
      auto e = instance.edge_index(edge);
      return (b && e && schedule.contains({*e, *b, t})) ? 1 : 0;
    }();
    out.replanning -= (1 - realized) * (1 - realized);
  }

  for (const auto& p : schedule.placements)
    if (catalog.initial_edge(p.batch) == p.edge) out.pumping -= to_rational(cost_of(instance, c.spec(p)));

  out.total = to_rational(weights.alpha) * out.inflow + to_rational(weights.beta) * out.distribution +
              to_rational(weights.gamma) * out.replanning + to_rational(weights.theta) * out.pumping;
  return out;
}

Volume intake_volume(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule) {
  Volume total = 0;
  for (const auto& nom : instance.data().nominations) {
    std::set<std::string> nominated;
    for (const auto& l : nom.limits) nominated.insert(l.product);
    for (const auto& p : schedule.placements) {
      const auto& s = catalog.spec(p.batch);
      if (instance.edges()[p.edge].origin != nom.refinery || catalog.initial_edge(p.batch) != p.edge) continue;
      if (nominated.contains(instance.products()[s.product].id)) total += s.volume;
    }
  }
  return total;
}

double pumping_cost(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule) {
  double total = 0;
  for (const auto& p : schedule.placements)
    if (catalog.initial_edge(p.batch) == p.edge) total += cost_of(instance, catalog.spec(p.batch));
  return total;
}

std::string report_json(const ViolationReport& report) {
  nlohmann::ordered_json j;
  j["clean"] = report.clean();
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : report.items)
    j["violations"].push_back({{"family", std::string(family_name(v.family))},
                               {"coordinate", v.coordinate},
                               {"measured", v.measured},
                               {"bound", v.bound},
                               {"message", v.message}});
  j["counting_error_bound"] = nlohmann::ordered_json::object();
  for (const auto& [site, bound] : report.counting_error_bound) j["counting_error_bound"][site] = bound;
  return j.dump(2) + "\n";
}

std::string report_table(const ViolationReport& report) {
  std::ostringstream out;
  if (report.clean()) {
    out << "schedule is feasible (0 violations)\n";
    return out.str();
  }
  out << report.items.size() << " violation(s)\n";
  out << "family               coordinate                         measured      bound  message\n";
  for (const auto& v : report.items) {
    std::string fam(family_name(v.family));
    fam.resize(std::max<std::size_t>(fam.size(), 20), ' ');
    std::string coord = v.coordinate;
    coord.resize(std::max<std::size_t>(coord.size(), 34), ' ');
    out << fam << ' ' << coord << ' ' << format_number(v.measured) << '\t' << format_number(v.bound) << "  "
        << v.message << '\n';
  }
  return out.str();
}

std::string occupancy_csv(const Instance& instance, const OccupancySeries& series) {
  std::ostringstream out;
  out << "site,product,t,lower,upper\n";
  for (const auto& track : series.tracks)
    for (std::size_t t = 0; t < track.upper.size(); ++t)
      out << instance.sites()[track.site].id << ',' << instance.products()[track.product].id << ',' << t << ','
          << track.lower[t] << ',' << track.upper[t] << '\n';
  return out.str();
}

}  // namespace pipesched
