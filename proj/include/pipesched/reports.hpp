#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesched/solver.hpp"

namespace pipesched {

// Rows (edge, batch, product, start, end, volume) sorted by edge, then start.
std::string gantt_csv(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule);

struct RunManifest {
  std::string instance_path;
  std::string instance_hash;
  nlohmann::ordered_json options;
  SolverConfig solver;
  std::optional<SolveResult> result;
  std::vector<std::pair<std::string, std::string>> artifacts;  // (role, path)
  std::string started_at;
  std::string finished_at;
};

std::string utc_timestamp();
std::string manifest_json(const RunManifest& manifest);

struct ExperimentRow {
  int vertices = 0;
  std::string setting;
  std::string mode;
  std::string status;
  double seconds = 0;
  std::optional<double> gap;
  std::optional<double> objective;
  std::optional<Volume> intake;
  std::optional<double> pumping_cost;
  std::optional<double> improvement;  // percent, SDC rows only
  std::vector<std::string> warnings;
};

nlohmann::ordered_json experiment_json(const std::string& suite, const std::string& outtake,
                                       const std::vector<ExperimentRow>& rows);
std::string experiment_table(const std::string& suite, const std::string& outtake,
                             const std::vector<ExperimentRow>& rows);

// Percent saving of `sdc` against `sd`; nullopt when `sd` is zero.
std::optional<double> improvement_percent(double sd, double sdc);

}  // namespace pipesched
