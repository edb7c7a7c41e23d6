#pragma once

#include <optional>
#include <stdexcept>

#include "pipesched/generator.hpp"
#include "pipesched/validator.hpp"

namespace pipesched {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool budget_exceeded = false;  // no answer; never a guess
  bool feasible = false;         // some schedule passes every check
  Rational objective;
  Schedule schedule;
  std::size_t nodes = 0;
};

// Exhaustive search over sets of initial placements taken in (edge, batch, t)
// order. Each visited set is judged by the validator. Throws OracleError when
// the instance exceeds the size limits.
OracleResult brute_force_optimum(const Instance& instance, const OracleLimits& limits = {},
                                 const SemanticOptions& semantics = {});

}  // namespace pipesched
