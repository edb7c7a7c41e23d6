#include "pipesched/family.hpp"

namespace pipesched {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::packing: return "packing";
    case Family::routes: return "routes";
    case Family::flushing: return "flushing";
    case Family::exclusion: return "exclusion";
    case Family::capacity_definition: return "capacity_definition";
    case Family::capacity_upper: return "capacity_upper";
    case Family::capacity_lower: return "capacity_lower";
    case Family::outage: return "outage";
    case Family::throughput: return "throughput";
    case Family::nomination: return "nomination";
    case Family::fixed: return "fixed";
    case Family::distribution: return "distribution";
    case Family::horizon_fit: return "horizon_fit";
  }
  return "unknown";
}

std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  return std::nullopt;
}

}  // namespace pipesched
