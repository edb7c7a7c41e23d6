#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipesched/batch_catalog.hpp"
#include "pipesched/family.hpp"
#include "pipesched/instance.hpp"
#include "pipesched/schedule.hpp"

namespace pipesched {

using Rational = boost::multiprecision::cpp_rational;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decimal value of the shortest round-trip text of `value`, so 0.003 maps to 3/1000.
Rational to_rational(double value);
double to_double(const Rational& value);

struct OccupancyTrack {
  std::size_t site = 0;
  std::size_t product = 0;
  std::vector<Volume> upper;  // blocked occupancy
  std::vector<Volume> lower;  // on-stock occupancy
};

struct OccupancySeries {
  std::vector<OccupancyTrack> tracks;  // one per (storage site, product)

  const OccupancyTrack* find(std::size_t site, std::size_t product) const;
};

struct ViolationItem {
  Family family = Family::packing;
  std::string coordinate;
  double measured = 0.0;
  double bound = 0.0;
  std::string message;
};

struct ViolationReport {
  std::vector<ViolationItem> items;
  // Per storage site: path-volume counting error, reported with the occupancy.
  std::vector<std::pair<std::string, Volume>> counting_error_bound;

  bool clean() const { return items.empty(); }
  std::size_t count(Family f) const;
};

struct ObjectiveBreakdown {
  Rational inflow;        // J_N
  Rational distribution;  // J_D (+ J_D')
  Rational replanning;    // J_P
  Rational pumping;       // J_C
  Rational total;
};

// Direct summation of inflows and outflows; throws ValidationError on a
// placement outside the horizon or off its regime path.
OccupancySeries simulate_occupancy(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule);

ViolationReport check_schedule(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule,
                               const SemanticOptions& semantics = {});

ObjectiveBreakdown evaluate_objective(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule,
                                      const CostWeights& weights);
inline ObjectiveBreakdown evaluate_objective(const Instance& instance, const BatchCatalog& catalog,
                                             const Schedule& schedule) {
  return evaluate_objective(instance, catalog, schedule, instance.weights());
}

// Total delivered volume (J_N with unit eta) and pumping cost (-J_C) of a schedule.
Volume intake_volume(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule);
double pumping_cost(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule);

std::string report_json(const ViolationReport& report);
std::string report_table(const ViolationReport& report);
std::string occupancy_csv(const Instance& instance, const OccupancySeries& series);

}  // namespace pipesched
