#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "pipesched/instance.hpp"

namespace pipesched {

enum class SizeVariant { standard, flush_fill };

// Position of an edge within its regime path.
enum class BatchRole { initial, transit, final, initial_final };

inline bool is_initial(BatchRole role) { return role == BatchRole::initial || role == BatchRole::initial_final; }
inline bool is_final(BatchRole role) { return role == BatchRole::final || role == BatchRole::initial_final; }
const char* role_name(BatchRole role);

// One (regime, product, volume) combination. The id "<regime>/<product>/<volume>"
// is stable across runs and is what files refer to.
struct BatchSpec {
  std::string id;
  std::size_t regime = 0;
  std::size_t product = 0;
  Volume volume = 0;
  int length = 0;
  SizeVariant variant = SizeVariant::standard;
  bool staining = false;
};

struct PlacedBatch {
  std::size_t edge = 0;
  std::size_t batch = 0;
  BatchRole role = BatchRole::initial;
};

// Number of time steps needed to pump `volume` units under the regime's rate
// for `product`. Ratios within a relative 1e-4 of an integer snap to it, which
// absorbs rounding in physically specified rates.
int compute_batch_length(const PumpingRegime& regime, const Product& product, Volume volume);

// Candidate batch volumes for a product leaving `site`: the standard size,
// plus for flushing products every regime flush volume exceeding it.
std::set<Volume> build_batch_sizes(const Instance& instance, std::size_t site, std::size_t product);
// Regime-restricted view of the above.
std::set<Volume> build_batch_sizes(const Instance& instance, std::size_t site, std::size_t product, std::size_t regime);

class BatchCatalog {
 public:
  explicit BatchCatalog(const Instance& instance);

  const std::vector<BatchSpec>& specs() const { return specs_; }
  const BatchSpec& spec(std::size_t b) const { return specs_.at(b); }
  std::optional<std::size_t> find(std::string_view id) const;

  // Batches relevant to the edge's packing problem, in catalog order.
  std::span<const PlacedBatch> on_edge(std::size_t edge) const { return by_edge_.at(edge); }
  std::optional<BatchRole> role_on(std::size_t edge, std::size_t batch) const;
  // Edge chain of the batch's regime, initial edge first.
  const std::vector<std::size_t>& chain(std::size_t batch) const { return chains_.at(specs_.at(batch).regime); }
  std::size_t initial_edge(std::size_t batch) const { return chain(batch).front(); }
  std::size_t placed_count() const;

  // F set: flushing batches of the same regime with volume >= r_V.
  const std::vector<std::size_t>& flush_candidates(std::size_t staining_batch) const;
  // E set: staining batches on `edge` whose product differs from `product`.
  std::vector<std::size_t> exclusion_set(std::size_t edge, std::size_t product) const;

  // Resolves a selector against placed batches; empty result means no match.
  std::vector<PlacedBatch> select(const Instance& instance, const BatchSelector& selector) const;

  std::size_t edge_count() const { return by_edge_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<BatchSpec> specs_;
  std::vector<std::vector<PlacedBatch>> by_edge_;
  std::vector<std::vector<std::size_t>> chains_;
  std::vector<std::vector<std::size_t>> flush_sets_;
  std::vector<std::string> warnings_;
};

inline BatchCatalog enumerate_batches(const Instance& instance) { return BatchCatalog(instance); }

std::string catalog_csv(const Instance& instance, const BatchCatalog& catalog);

}  // namespace pipesched
