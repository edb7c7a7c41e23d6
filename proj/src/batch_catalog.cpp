#include "pipesched/batch_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pipesched {

const char* role_name(BatchRole role) {
  switch (role) {
    case BatchRole::initial: return "initial";
    case BatchRole::transit: return "transit";
    case BatchRole::final: return "final";
    case BatchRole::initial_final: return "initial_final";
  }
  return "?";
}

int compute_batch_length(const PumpingRegime& regime, const Product& product, Volume volume) {
  auto it = regime.flow_rate.find(product.id);
  if (it == regime.flow_rate.end() || !(it->second > 0))
    throw InstanceError("regime cannot pump product: regime '" + regime.id + "' has no positive flow rate for '" +
                        product.id + "'");
  if (volume <= 0) throw InstanceError("batch volume must be positive");
  const double ratio = static_cast<double>(volume) / it->second;
  const double nearest = std::round(ratio);
  double steps = std::ceil(ratio);
  if (nearest >= 1 && std::abs(ratio - nearest) <= 1e-4 * nearest) steps = nearest;
  return std::max(1, static_cast<int>(steps));
}

std::set<Volume> build_batch_sizes(const Instance& instance, std::size_t site, std::size_t product) {
  std::set<Volume> out;
  for (std::size_t r = 0; r < instance.regimes().size(); ++r) {
    if (instance.regime_origin(r) != site) continue;
    auto sizes = build_batch_sizes(instance, site, product, r);
    out.insert(sizes.begin(), sizes.end());
  }
  if (out.empty()) {
    const auto& s = instance.sites().at(site);
    const auto& p = instance.products().at(product);
    auto it = s.standard_batch.find(p.id);
    if (it == s.standard_batch.end())
      throw InstanceError("site '" + s.id + "' has no standard batch size for '" + p.id + "'");
    out.insert(it->second);
  }
  return out;
}

std::set<Volume> build_batch_sizes(const Instance& instance, std::size_t site, std::size_t product,
                                   std::size_t regime) {
  const auto& s = instance.sites().at(site);
  const auto& p = instance.products().at(product);
  auto it = s.standard_batch.find(p.id);
  if (it == s.standard_batch.end())
    throw InstanceError("site '" + s.id + "' has no standard batch size for '" + p.id + "'");
  std::set<Volume> out{it->second};
  if (p.kind == ProductKind::flushing) {
    const Volume flush = instance.regime_flush_volume(regime);
    if (flush > it->second) out.insert(flush);
  }
  return out;
}

BatchCatalog::BatchCatalog(const Instance& instance) {
  by_edge_.resize(instance.edges().size());
  chains_.resize(instance.regimes().size());

  for (std::size_t r = 0; r < instance.regimes().size(); ++r) {
    const auto& regime = instance.regimes()[r];
    for (const auto& e : regime.edges) chains_[r].push_back(instance.edge_at(e));
    const std::size_t origin = instance.regime_origin(r);

    for (std::size_t p = 0; p < instance.products().size(); ++p) {
      const auto& product = instance.products()[p];
      if (!regime.flow_rate.contains(product.id)) continue;
      const auto sizes = build_batch_sizes(instance, origin, p, r);
      const Volume standard = *sizes.begin();
      for (Volume w : sizes) {
        BatchSpec spec;
        spec.id = regime.id + "/" + product.id + "/" + std::to_string(w);
        spec.regime = r;
        spec.product = p;
        spec.volume = w;
        spec.length = compute_batch_length(regime, product, w);
        spec.staining = product.kind == ProductKind::staining;
        // Sizes other than the standard one only arise from flush volumes.
        spec.variant = (w == standard || spec.staining) ? SizeVariant::standard : SizeVariant::flush_fill;
        const std::size_t b = specs_.size();
        specs_.push_back(std::move(spec));
        const auto& chain = chains_[r];
        for (std::size_t i = 0; i < chain.size(); ++i) {
          BatchRole role = BatchRole::transit;
          if (chain.size() == 1) role = BatchRole::initial_final;
          else if (i == 0) role = BatchRole::initial;
          else if (i + 1 == chain.size()) role = BatchRole::final;
          by_edge_[chain[i]].push_back({chain[i], b, role});
        }
      }
    }
  }

  flush_sets_.resize(specs_.size());
  for (std::size_t b0 = 0; b0 < specs_.size(); ++b0) {
    if (!specs_[b0].staining) continue;
    const Volume flush_volume = instance.regime_flush_volume(specs_[b0].regime);
    for (std::size_t b = 0; b < specs_.size(); ++b) {
      const auto& cand = specs_[b];
      if (!cand.staining && cand.regime == specs_[b0].regime && cand.volume >= flush_volume)
        flush_sets_[b0].push_back(b);
    }
    if (flush_sets_[b0].empty())
      warnings_.push_back("staining batch can never be flushed: '" + specs_[b0].id + "'");
  }
}

std::optional<std::size_t> BatchCatalog::find(std::string_view id) const {
  for (std::size_t b = 0; b < specs_.size(); ++b)
    if (specs_[b].id == id) return b;
  return std::nullopt;
}

std::optional<BatchRole> BatchCatalog::role_on(std::size_t edge, std::size_t batch) const {
  if (edge >= by_edge_.size()) return std::nullopt;
  for (const auto& pb : by_edge_[edge])
    if (pb.batch == batch) return pb.role;
  return std::nullopt;
}

std::size_t BatchCatalog::placed_count() const {
  std::size_t n = 0;
  for (const auto& e : by_edge_) n += e.size();
  return n;
}

const std::vector<std::size_t>& BatchCatalog::flush_candidates(std::size_t staining_batch) const {
  return flush_sets_.at(staining_batch);
}

std::vector<std::size_t> BatchCatalog::exclusion_set(std::size_t edge, std::size_t product) const {
  std::vector<std::size_t> out;
  for (const auto& pb : by_edge_.at(edge)) {
    const auto& s = specs_[pb.batch];
    if (s.staining && s.product != product) out.push_back(pb.batch);
  }
  return out;
}

std::vector<PlacedBatch> BatchCatalog::select(const Instance& instance, const BatchSelector& sel) const {
  std::vector<PlacedBatch> out;
  for (const auto& edge : by_edge_) {
    for (const auto& pb : edge) {
      const auto& s = specs_[pb.batch];
      if (sel.batch && s.id != *sel.batch) continue;
      if (sel.regime && instance.regimes()[s.regime].id != *sel.regime) continue;
      if (sel.product && instance.products()[s.product].id != *sel.product) continue;
      if (sel.volume && s.volume != *sel.volume) continue;
      if (sel.edge && instance.edges()[pb.edge].id != *sel.edge) continue;
      out.push_back(pb);
    }
  }
  return out;
}

std::string catalog_csv(const Instance& instance, const BatchCatalog& catalog) {
  std::ostringstream out;
  out << "edge,batch,regime,product,volume,length,classification\n";
  for (std::size_t e = 0; e < catalog.edge_count(); ++e) {
    for (const auto& pb : catalog.on_edge(e)) {
      const auto& s = catalog.spec(pb.batch);
      out << instance.edges()[e].id << ',' << s.id << ',' << instance.regimes()[s.regime].id << ','
          << instance.products()[s.product].id << ',' << s.volume << ',' << s.length << ',' << role_name(pb.role)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace pipesched
