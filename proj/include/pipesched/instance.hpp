#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pipesched {

// Integral volume bookkeeping; one unit is Product::unit_volume cubic metres.
using Volume = std::int64_t;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProductKind { flushing, staining };
enum class SiteKind { storage, refinery };

struct Product {
  std::string id;
  ProductKind kind = ProductKind::flushing;
  double unit_volume = 1.0;  // m3 per volume unit
};

// Time-indexed site series are keyed by product id and hold one entry per
// time step. A product missing from capacity_max is uncapped; missing from
// capacity_min or base_occupancy means zero.
struct Site {
  std::string id;
  SiteKind kind = SiteKind::storage;
  std::map<std::string, std::vector<Volume>> capacity_max;
  std::map<std::string, std::vector<Volume>> capacity_min;
  // Cumulative: entry t is the absolute externally driven level at t.
  std::map<std::string, std::vector<Volume>> base_occupancy;
  std::map<std::string, Volume> standard_batch;

  std::optional<Volume> max_at(const std::string& product, int t) const;
  Volume min_at(const std::string& product, int t) const;
  Volume base_at(const std::string& product, int t) const;
};

struct Edge {
  std::string id;
  std::string origin;
  std::string destination;
  Volume pipe_volume = 0;
};

struct PumpingRegime {
  std::string id;
  std::vector<std::string> edges;
  // Volume units per time step, keyed by product id. Products without an
  // entry are not transported by this regime.
  std::map<std::string, double> flow_rate;
  // Overrides the default flush volume (sum of pipe volumes along the path).
  std::optional<Volume> flush_volume;
  // Cost of one batch: step_cost * L(b) + batch_cost[batch id or product id].
  double step_cost = 0.0;
  std::map<std::string, double> batch_cost;
  std::map<std::string, int> pass_times;  // informational only
};

struct TimeGrid {
  int horizon_len = 1;
  double step_hours = 1.0;
  int t_max() const { return horizon_len - 1; }
};

struct NominationLimit {
  std::string product;
  Volume volume = 0;
};

struct Nomination {
  std::string refinery;
  std::vector<NominationLimit> limits;
};

// Selects catalog batches by regime, optionally narrowed by product, volume
// and edge. An explicit batch id takes precedence over the other fields.
struct BatchSelector {
  std::optional<std::string> batch;
  std::optional<std::string> regime;
  std::optional<std::string> product;
  std::optional<Volume> volume;
  std::optional<std::string> edge;
};

struct TankOutage {
  std::string site;
  std::string product;
  Volume reduction = 0;
  std::vector<int> times;
};

struct TransportOutage {
  std::vector<BatchSelector> batches;
  std::vector<int> times;
};

struct ThroughputLimit {
  std::vector<std::string> edges;
  std::string product;
  std::vector<int> window;
  Volume limit = 0;
};

struct RegimeExclusionGroup {
  std::vector<std::string> members;
};

struct DistributionTarget {
  std::string site;
  std::string product;
  // Either an optimal occupancy with weight k, or a signed linear weight k'.
  std::optional<Volume> optimum;
  double weight = 0.0;
};

struct PlanEntry {
  std::string edge;
  std::string batch;
  int t = 0;
  bool executed = false;
};

struct CostWeights {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
  std::map<std::string, double> eta;
  std::vector<DistributionTarget> distribution_targets;
  std::vector<PlanEntry> previous_plan;

  double eta_of(const std::string& product) const;
};

struct FixedTransport {
  std::string regime;
  std::string product;
  int start = 0;
  std::optional<Volume> volume;  // defaults to the standard batch size
};

struct InstanceData {
  std::vector<Product> products;
  std::vector<Site> sites;
  std::vector<Edge> edges;
  std::vector<PumpingRegime> regimes;
  TimeGrid grid;
  std::vector<Nomination> nominations;
  std::vector<TankOutage> tank_outages;
  std::vector<TransportOutage> transport_outages;
  std::vector<ThroughputLimit> limits;
  std::vector<RegimeExclusionGroup> exclusion_groups;
  CostWeights weights;
  std::vector<FixedTransport> fixed_transports;
};

// Immutable problem instance with id lookup tables. Cross references are kept
// as ids so that broken instances can still be loaded and reported on.
class Instance {
 public:
  explicit Instance(InstanceData data);

  const InstanceData& data() const { return data_; }
  const std::vector<Product>& products() const { return data_.products; }
  const std::vector<Site>& sites() const { return data_.sites; }
  const std::vector<Edge>& edges() const { return data_.edges; }
  const std::vector<PumpingRegime>& regimes() const { return data_.regimes; }
  const TimeGrid& grid() const { return data_.grid; }
  const CostWeights& weights() const { return data_.weights; }

  std::optional<std::size_t> product_index(std::string_view id) const;
  std::optional<std::size_t> site_index(std::string_view id) const;
  std::optional<std::size_t> edge_index(std::string_view id) const;
  std::optional<std::size_t> regime_index(std::string_view id) const;

  // Throwing lookups for code running on validated instances.
  std::size_t product_at(std::string_view id) const;
  std::size_t site_at(std::string_view id) const;
  std::size_t edge_at(std::string_view id) const;
  std::size_t regime_at(std::string_view id) const;

  // Flush volume r_V: explicit override or the summed pipe volume of the path.
  Volume regime_flush_volume(std::size_t regime) const;
  std::size_t regime_origin(std::size_t regime) const;
  std::size_t regime_destination(std::size_t regime) const;

 private:
  InstanceData data_;
  std::unordered_map<std::string, std::size_t> products_;
  std::unordered_map<std::string, std::size_t> sites_;
  std::unordered_map<std::string, std::size_t> edges_;
  std::unordered_map<std::string, std::size_t> regimes_;
};

struct Violation {
  std::string code;
  std::string message;
};

// Lists every broken invariant; an empty result means the instance is valid.
std::vector<Violation> validate_instance(const Instance& instance);

}  // namespace pipesched
