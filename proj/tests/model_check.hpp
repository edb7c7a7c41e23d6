#pragma once

#include <cmath>

#include "pipesched/milp_model.hpp"
#include "pipesched/schedule.hpp"
#include "pipesched/validator.hpp"

namespace fixtures {

// Variable values implied by a schedule: placements, their endpoints, the
// simulated occupancies and exact deviations. A binary assignment is feasible
// for the model iff these values satisfy every row.
inline std::vector<double> assignment(const pipesched::Instance& inst, const pipesched::BatchCatalog& cat,
                                      const pipesched::MILPModel& model, const pipesched::Schedule& s) {
  using namespace pipesched;
  std::vector<double> x(model.vars.size(), 0.0);
  for (const auto& p : s.placements) {
    if (auto v = model.vars.placement(p.edge, p.batch, p.start)) x[*v] = 1;
    if (auto w = model.vars.endpoint(p.edge, p.batch, p.start + cat.spec(p.batch).length)) x[*w] = 1;
  }
  const auto series = simulate_occupancy(inst, cat, s);
  for (const auto& tr : series.tracks)
    for (std::size_t t = 0; t < tr.upper.size(); ++t) {
      x[*model.vars.occupancy_upper(tr.site, tr.product, static_cast<int>(t))] = static_cast<double>(tr.upper[t]);
      x[*model.vars.occupancy_lower(tr.site, tr.product, static_cast<int>(t))] = static_cast<double>(tr.lower[t]);
    }
  for (const auto& target : inst.weights().distribution_targets) {
    if (!target.optimum) continue;
    const auto site = inst.site_at(target.site), product = inst.product_at(target.product);
    const auto level = series.find(site, product)->lower.back();
    x[*model.vars.deviation(site, product)] = std::abs(static_cast<double>(level - *target.optimum));
  }
  return x;
}

inline bool satisfies_all(const pipesched::MILPModel& model, const std::vector<double>& x) {
  for (const auto& row : model.constraints)
    if (pipesched::row_violation(row, x) > 1e-9) return false;
  return true;
}

// All initial placements of the catalog that fit the horizon.
inline std::vector<pipesched::Placement> initial_candidates(const pipesched::Instance& inst,
                                                            const pipesched::BatchCatalog& cat) {
  std::vector<pipesched::Placement> out;
  for (std::size_t b = 0; b < cat.specs().size(); ++b)
    for (int t = 0; t + cat.spec(b).length <= inst.grid().horizon_len; ++t) out.push_back({cat.initial_edge(b), b, t});
  return out;
}

}  // namespace fixtures
