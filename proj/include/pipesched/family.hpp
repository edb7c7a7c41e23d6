#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace pipesched {

// Constraint families shared by the model emitters and the validator report.
enum class Family {
  packing,
  routes,
  flushing,
  exclusion,
  capacity_definition,
  capacity_upper,
  capacity_lower,
  outage,
  throughput,
  nomination,
  fixed,
  distribution,
  horizon_fit,
};

inline constexpr std::array<Family, 13> kAllFamilies = {
    Family::packing,        Family::routes,     Family::flushing,   Family::exclusion, Family::capacity_definition,
    Family::capacity_upper, Family::capacity_lower, Family::outage, Family::throughput, Family::nomination,
    Family::fixed,          Family::distribution, Family::horizon_fit};

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

// Semantic switches that change the feasible set. The model builder and the
// validator must be given the same values.
struct SemanticOptions {
  // Drop the flush-follow requirement for staining batches ending so late
  // that nothing could follow them inside the horizon.
  bool relax_terminal_flush = false;
  // Count throughput limits on every batch crossing the listed edges instead
  // of initial batches only.
  bool throughput_per_edge = false;
};

}  // namespace pipesched
