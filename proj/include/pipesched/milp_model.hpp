#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pipesched/batch_catalog.hpp"
#include "pipesched/family.hpp"
#include "pipesched/instance.hpp"

namespace pipesched {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VarId = std::size_t;

enum class VarKind { placement, endpoint, occupancy_upper, occupancy_lower, distribution_deviation };

// `first`/`second` are (edge, batch) for placement and endpoint variables and
// (site, product) for occupancy and deviation variables.
struct Variable {
  VarKind kind = VarKind::placement;
  std::size_t first = 0;
  std::size_t second = 0;
  int t = 0;
  bool binary = true;
  double lower = 0.0;
  double upper = 1.0;
};

enum class Sense { le, eq, ge };

struct Term {
  VarId var = 0;
  double coef = 0.0;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
  Family family = Family::packing;
  bool lazy = false;
};

enum class CapacityForm {
  // c_t - c_{t-1} = flow at t + base delta; same feasible set, O(T) nonzeros.
  incremental,
  // Literal running sums over all earlier starts, O(T^2) nonzeros.
  cumulative,
};

struct ModelOptions {
  SemanticOptions semantics;
  bool capacity_lazy = false;
  CapacityForm capacity_form = CapacityForm::incremental;
};

struct ModelMetadata {
  std::string instance_hash;
  std::map<Family, std::size_t> family_counts;
  std::size_t placement_vars = 0;
  std::size_t endpoint_vars = 0;
  std::size_t occupancy_vars = 0;
  std::size_t deviation_vars = 0;
  // Per storage site: largest path volume among regimes starting or ending
  // there, the worst case by which start/finish counting misstates levels.
  std::map<std::string, Volume> counting_error_bound;
  std::vector<std::string> warnings;
};

class VariableRegistry {
 public:
  VarId add(Variable v);
  const std::vector<Variable>& all() const { return vars_; }
  const Variable& at(VarId id) const { return vars_.at(id); }
  std::size_t size() const { return vars_.size(); }

  std::optional<VarId> placement(std::size_t edge, std::size_t batch, int t) const;
  std::optional<VarId> endpoint(std::size_t edge, std::size_t batch, int t) const;
  std::optional<VarId> occupancy_upper(std::size_t site, std::size_t product, int t) const;
  std::optional<VarId> occupancy_lower(std::size_t site, std::size_t product, int t) const;
  std::optional<VarId> deviation(std::size_t site, std::size_t product) const;

 private:
  using Key = std::tuple<VarKind, std::size_t, std::size_t, int>;
  std::optional<VarId> lookup(VarKind kind, std::size_t a, std::size_t b, int t) const;
  std::vector<Variable> vars_;
  std::map<Key, VarId> index_;
};

struct Objective {
  std::vector<Term> terms;  // maximized
  double constant = 0.0;
};

struct MILPModel {
  VariableRegistry vars;
  std::vector<LinearConstraint> constraints;
  Objective objective;
  ModelMetadata metadata;
  // Bound rows keyed by (site, product, t) for activating lazy rows.
  std::map<std::tuple<std::size_t, std::size_t, int>, std::size_t> upper_bound_rows;
  std::map<std::tuple<std::size_t, std::size_t, int>, std::size_t> lower_bound_rows;

  std::size_t count(Family f) const;
  std::size_t active_count() const;
};

// Individual emitters. Each appends to `out` and returns the number of rows.
VariableRegistry build_variables(const BatchCatalog& catalog, const Instance& instance);
std::size_t emit_packing(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                         std::vector<LinearConstraint>& out);
std::size_t emit_routes(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                        std::vector<LinearConstraint>& out);
std::size_t emit_flushing(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                          const SemanticOptions& semantics, std::vector<LinearConstraint>& out);
std::size_t emit_regime_exclusions(const BatchCatalog& catalog, const Instance& instance, const VariableRegistry& vars,
                                   std::vector<LinearConstraint>& out);
// Appends definitional rows and bound rows; bound rows are registered in `model`.
void emit_capacity(const BatchCatalog& catalog, const Instance& instance, const ModelOptions& options,
                   MILPModel& model);
std::size_t emit_outages(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                         std::vector<LinearConstraint>& out);
std::size_t emit_throughput_limits(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                                   const SemanticOptions& semantics, std::vector<LinearConstraint>& out);
std::size_t emit_fixed_transport(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                                 std::vector<LinearConstraint>& out);
std::size_t emit_nominations(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                             std::vector<LinearConstraint>& out);
// Builds the maximization objective; deviation rows are appended to `out`.
Objective emit_objective(const Instance& instance, const BatchCatalog& catalog, const VariableRegistry& vars,
                         std::vector<LinearConstraint>& out);

// Total capacity reduction from tank outages for (site, product, t).
Volume tank_outage_reduction(const Instance& instance, std::size_t site, std::size_t product, int t);
// Resolved fixed-transport placements (edge, batch, t) on initial edges.
std::vector<std::tuple<std::size_t, std::size_t, int>> fixed_placements(const Instance& instance,
                                                                        const BatchCatalog& catalog);
double batch_cost(const Instance& instance, const BatchSpec& spec);

MILPModel build_model(const Instance& instance, const BatchCatalog& catalog, const ModelOptions& options = {});

// Row activity and violation amount (positive when violated) under `values`.
double row_activity(const LinearConstraint& row, const std::vector<double>& values);
double row_violation(const LinearConstraint& row, const std::vector<double>& values);
double objective_value(const Objective& objective, const std::vector<double>& values);

std::string metadata_json(const MILPModel& model);

}  // namespace pipesched
