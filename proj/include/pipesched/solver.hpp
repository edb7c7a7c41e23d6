#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipesched/milp_model.hpp"
#include "pipesched/schedule.hpp"
#include "pipesched/validator.hpp"

namespace pipesched {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Placeholders: {solver} {model} {solution} {time_limit} {gap} {threads}.
// The default matches the CBC command line.
inline constexpr const char* kDefaultCommand =
    "{solver} {model} sec {time_limit} ratio {gap} threads {threads} solve solu {solution}";

struct SolverConfig {
  std::string command = kDefaultCommand;
  std::string solver;  // empty: PIPESCHED_SOLVER, then "cbc" on PATH
  double time_limit = 1800.0;
  double gap = 1e-3;
  int threads = 1;
  std::filesystem::path work_dir;  // empty: fresh directory under the system temp dir
  bool keep_files = true;
};

// Throws SolverError on a non-positive time limit, negative gap or bad template.
void check_config(const SolverConfig& config);
std::string resolve_solver_path(const SolverConfig& config);

enum class SolveStatus { optimal, gap_reached, time_limit, infeasible, error };
const char* status_name(SolveStatus status);

struct LazyIteration {
  int iteration = 0;
  std::size_t added = 0;  // bound rows activated after this solve
  double objective = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::error;
  std::optional<Schedule> schedule;
  std::optional<double> objective;
  std::optional<ObjectiveBreakdown> breakdown;
  std::optional<double> bound;
  std::optional<double> gap;
  double wall_seconds = 0.0;
  std::vector<LazyIteration> lazy_trace;
  std::string message;
  bool validation_failed = false;  // solver answer rejected by the validator
  std::vector<std::filesystem::path> artifacts;

  bool has_incumbent() const { return schedule.has_value(); }
};

// LP-format variable names: v<k>, w<k>, cu<k>, cl<k>, d<k>.
std::string variable_name(const MILPModel& model, VarId id);

// Deterministic LP text. Lazy rows are left out and the objective constant is
// not written; rows without terms are dropped when trivially satisfied.
std::string write_lp(const MILPModel& model);

struct ParsedSolution {
  std::string status_line;
  std::optional<double> reported_objective;  // solver's value, constant excluded
  std::vector<double> values;                // indexed by VarId, absent = 0
  bool has_values = false;
};

// Reads a CBC-style solution file. Throws SolverError with an excerpt when the
// text cannot be understood.
ParsedSolution read_solution(const std::string& text, const MILPModel& model);

struct SolutionOutcome {
  Schedule schedule;
  double objective = 0.0;  // recomputed from the model, constant included
};

// Turns variable values into a schedule. Throws SolverError on a fractional
// binary or an objective that disagrees with the solver's figure.
SolutionOutcome parse_solution(const std::string& text, const MILPModel& model);
SolutionOutcome parse_solution(const ParsedSolution& parsed, const MILPModel& model);

struct SolverLogInfo {
  std::optional<std::string> result;  // text after "Result - "
  std::optional<double> objective;
  std::optional<double> bound;
  bool no_solution = false;
};
SolverLogInfo read_solver_log(const std::string& log);

// Runs the external solver on `model` and validates any returned schedule.
SolveResult solve(const Instance& instance, const BatchCatalog& catalog, const MILPModel& model,
                  const SolverConfig& config, const SemanticOptions& semantics = {});

// Outer cut loop: bound rows start lazy and are activated where the
// incumbent's simulated occupancy breaks them.
SolveResult solve_lazy_capacity(const Instance& instance, const BatchCatalog& catalog, const ModelOptions& options,
                                const SolverConfig& config, int max_iterations = 50);

// Lazy bound rows of `model` violated by the occupancy of `schedule`.
std::vector<std::size_t> violated_lazy_rows(const Instance& instance, const BatchCatalog& catalog,
                                            const MILPModel& model, const Schedule& schedule);

std::string result_json(const SolveResult& result);

}  // namespace pipesched
