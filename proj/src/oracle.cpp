#include "pipesched/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pipesched {

namespace {

// Families that only get worse when placements are added.
bool monotone(Family f) {
  switch (f) {
    case Family::packing:
    case Family::exclusion:
    case Family::outage:
    case Family::throughput:
    case Family::nomination:
    case Family::horizon_fit:
    case Family::routes: return true;
    default: return false;
  }
}

bool has_monotone_violation(const ViolationReport& r) {
  return std::any_of(r.items.begin(), r.items.end(), [](const ViolationItem& v) { return monotone(v.family); });
}

struct Candidate {
  Placement initial;
  double gain = 0;        // linear objective part excluding intake
  double intake = 0;      // weighted intake part
  std::string product;    // nominated product key, empty if none
  Volume volume = 0;
};

class Search {
 public:
  Search(const Instance& inst, const BatchCatalog& cat, const OracleLimits& limits, const SemanticOptions& sem)
      : inst_(inst), cat_(cat), limits_(limits), sem_(sem) {}

  OracleResult run() {
    collect();
    OracleResult out;
    std::vector<std::size_t> chosen;
    visit(chosen, 0);
    out.nodes = nodes_;
    if (aborted_) {
      out.budget_exceeded = true;
      return out;
    }
    out.feasible = found_;
    if (found_) {
      out.objective = best_;
      out.schedule = best_schedule_;
    }
    return out;
  }

 private:
  void collect() {
    const auto& w = inst_.weights();
    std::set<std::tuple<std::string, std::string, int>> previous;
    for (const auto& e : w.previous_plan) previous.emplace(e.edge, e.batch, e.t);
    std::map<std::string, std::set<std::string>> nominated;  // refinery -> products
    for (const auto& nom : inst_.data().nominations)
      for (const auto& l : nom.limits) {
        nominated[nom.refinery].insert(l.product);
        nom_left_[l.product] += l.volume;
      }

    for (std::size_t b = 0; b < cat_.specs().size(); ++b) {
      const auto& spec = cat_.spec(b);
      const auto e = cat_.initial_edge(b);
      for (int t = 0; t + spec.length <= inst_.grid().horizon_len; ++t) {
        Candidate c;
        c.initial = {e, b, t};
        const auto single = schedule_from_initial(cat_, {c.initial});
        if (has_monotone_violation(check_schedule(inst_, cat_, single, sem_))) continue;
        const auto& pid = inst_.products()[spec.product].id;
        const auto& origin = inst_.edges()[e].origin;
        if (nominated.contains(origin) && nominated[origin].contains(pid)) {
          c.product = pid;
          c.volume = spec.volume;
          c.intake = w.alpha * w.eta_of(pid) * static_cast<double>(spec.volume);
        }
        const double flat = to_double(evaluate_objective(inst_, cat_, single, w).pumping);
        c.gain = w.theta * flat;
        for (auto chain_edge : cat_.chain(b))
          if (previous.contains({inst_.edges()[chain_edge].id, spec.id, t})) c.gain += w.gamma;
        cands_.push_back(c);
      }
    }
    // Canonical (edge, batch, t) order. Depth-first preorder then visits
    // placement sets in lexicographic order, so the first optimum found is
    // the smallest one and ties never need to be explored.
    std::sort(cands_.begin(), cands_.end(),
              [](const Candidate& a, const Candidate& b) { return a.initial < b.initial; });
    if (cands_.size() > limits_.max_candidates)
      throw OracleError("instance has " + std::to_string(cands_.size()) + " candidate placements, limit is " +
                        std::to_string(limits_.max_candidates));

    // Pairwise conflicts among monotone families.
    const std::size_t n = cands_.size();
    conflict_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto pair = schedule_from_initial(cat_, {cands_[i].initial, cands_[j].initial});
        conflict_[i][j] = conflict_[j][i] = has_monotone_violation(check_schedule(inst_, cat_, pair, sem_));
      }

    suffix_pos_.assign(n + 1, 0.0);
    suffix_intake_.assign(n + 1, 0.0);
    suffix_gain_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      suffix_pos_[i] = suffix_pos_[i + 1] + std::max(0.0, cands_[i].intake + cands_[i].gain);
      suffix_intake_[i] = suffix_intake_[i + 1] + cands_[i].intake;
      suffix_gain_[i] = suffix_gain_[i + 1] + std::max(0.0, cands_[i].gain);
    }

    // Distribution terms: |level - optimum| parts never add; k' parts add at
    // most the weight times the largest level reachable.
    const auto& w2 = inst_.weights();
    for (const auto& target : w2.distribution_targets) {
      if (target.optimum) continue;
      const auto& site = inst_.sites()[inst_.site_at(target.site)];
      Volume reach = site.base_at(target.product, inst_.grid().t_max());
      for (const auto& c : cands_) reach += cat_.spec(c.initial.batch).volume;
      distribution_cap_ += w2.beta * target.weight * static_cast<double>(std::max<Volume>(0, reach));
    }
    constant_ = -w2.gamma * static_cast<double>(previous.size());
  }

  double optimistic(std::size_t from, double linear) const {
    double intake_cap = 0;
    for (const auto& [product, left] : nom_left_) intake_cap += inst_.weights().alpha * inst_.weights().eta_of(product) *
                                                                static_cast<double>(std::max<Volume>(0, left));
    const double rest = std::min(suffix_pos_[from], std::min(intake_cap, suffix_intake_[from]) + suffix_gain_[from]);
    return constant_ + linear + rest + distribution_cap_;
  }

  void evaluate(const std::vector<std::size_t>& chosen) {
    std::vector<Placement> initial;
    for (auto i : chosen) initial.push_back(cands_[i].initial);
    const auto schedule = schedule_from_initial(cat_, initial);
    if (!check_schedule(inst_, cat_, schedule, sem_).clean()) return;
    const auto value = evaluate_objective(inst_, cat_, schedule).total;
    if (!found_ || value > best_) {
      found_ = true;
      best_ = value;
      best_schedule_ = schedule;
    }
  }

  void visit(std::vector<std::size_t>& chosen, std::size_t from) {
    if (aborted_) return;
    if (++nodes_ > limits_.node_budget) {
      aborted_ = true;
      return;
    }
    evaluate(chosen);
    double linear = 0;
    for (auto i : chosen) linear += cands_[i].intake + cands_[i].gain;
    for (std::size_t j = from; j < cands_.size(); ++j) {
      if (found_ && optimistic(j, linear) <= to_double(best_) + 1e-9) return;
      const auto& c = cands_[j];
      if (std::any_of(chosen.begin(), chosen.end(), [&](std::size_t i) { return conflict_[i][j]; })) continue;
      if (!c.product.empty() && nom_left_[c.product] < c.volume) continue;
      if (!c.product.empty()) nom_left_[c.product] -= c.volume;
      chosen.push_back(j);
      if (!has_monotone_violation(check_schedule(inst_, cat_, selected(chosen), sem_))) visit(chosen, j + 1);
      chosen.pop_back();
      if (!c.product.empty()) nom_left_[c.product] += c.volume;
      if (aborted_) return;
    }
  }

  Schedule selected(const std::vector<std::size_t>& chosen) const {
    std::vector<Placement> initial;
    for (auto i : chosen) initial.push_back(cands_[i].initial);
    return schedule_from_initial(cat_, initial);
  }

  const Instance& inst_;
  const BatchCatalog& cat_;
  OracleLimits limits_;
  SemanticOptions sem_;
  std::vector<Candidate> cands_;
  std::vector<std::vector<bool>> conflict_;
  std::vector<double> suffix_pos_, suffix_intake_, suffix_gain_;
  std::map<std::string, Volume> nom_left_;
  double distribution_cap_ = 0;
  double constant_ = 0;
  std::size_t nodes_ = 0;
  bool aborted_ = false;
  bool found_ = false;
  Rational best_;
  Schedule best_schedule_;
};

}  // namespace

OracleResult brute_force_optimum(const Instance& instance, const OracleLimits& limits,
                                 const SemanticOptions& semantics) {
  if (static_cast<int>(instance.edges().size()) > limits.max_edges)
    throw OracleError("instance has " + std::to_string(instance.edges().size()) + " edges, limit is " +
                      std::to_string(limits.max_edges));
  if (instance.grid().horizon_len > limits.max_horizon)
    throw OracleError("horizon " + std::to_string(instance.grid().horizon_len) + " exceeds oracle limit " +
                      std::to_string(limits.max_horizon));
  const BatchCatalog catalog(instance);
  Search search(instance, catalog, limits, semantics);
  return search.run();
}

}  // namespace pipesched
