#include "pipesched/solver.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "pipesched/util.hpp"

namespace pipesched {

namespace fs = std::filesystem;

namespace {

constexpr double kIntegrality = 1e-5;
constexpr double kObjectiveTolerance = 1e-6;

std::string excerpt(const std::string& text, std::size_t limit = 400) {
  if (text.size() <= limit) return text;
  return text.substr(0, limit) + "...";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(std::string_view s) {
  const auto text = trim(s);
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) return std::nullopt;
  return v;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  const std::string token = "{" + key + "}";
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size()))
    text.replace(pos, token.size(), value);
  return text;
}

bool executable(const fs::path& p) { return ::access(p.c_str(), X_OK) == 0 && fs::is_regular_file(p); }

std::optional<VarId> parse_var_name(const std::string& name, const MILPModel& model) {
  std::size_t digits = name.find_first_of("0123456789");
  if (digits == 0 || digits == std::string::npos) return std::nullopt;
  VarId id = 0;
  for (std::size_t i = digits; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return std::nullopt;
    id = id * 10 + static_cast<VarId>(name[i] - '0');
  }
  if (id >= model.vars.size() || variable_name(model, id) != name) return std::nullopt;
  return id;
}

fs::path fresh_work_dir() {
  static std::atomic<unsigned> counter{0};
  auto dir = fs::temp_directory_path() /
             ("pipesched-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);
  return dir;
}

struct RunFiles {
  fs::path model, solution, log;
};

RunFiles run_files(const fs::path& dir, int iteration) {
  const std::string suffix = iteration > 0 ? "_iter" + std::to_string(iteration) : "";
  return {dir / ("model" + suffix + ".lp"), dir / ("solution" + suffix + ".txt"), dir / ("solver" + suffix + ".log")};
}

// One solver invocation plus validation; the working directory is given.
SolveResult solve_once(const Instance& instance, const BatchCatalog& catalog, const MILPModel& model,
                       const SolverConfig& config, const SemanticOptions& semantics, const RunFiles& files,
                       bool capacity_pending = false) {
  SolveResult res;
  const auto started = std::chrono::steady_clock::now();
  auto finish = [&](SolveResult& r) -> SolveResult& {
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
  };

  write_text_file(files.model, write_lp(model));
  fs::remove(files.solution);
  std::string cmd = config.command;
  if (cmd.find("{solver}") != std::string::npos)
    cmd = substitute(cmd, "solver", shell_quote(resolve_solver_path(config)));
  cmd = substitute(cmd, "model", shell_quote(files.model.string()));
  cmd = substitute(cmd, "solution", shell_quote(files.solution.string()));
  cmd = substitute(cmd, "time_limit", format_number(config.time_limit));
  cmd = substitute(cmd, "gap", format_number(config.gap));
  cmd = substitute(cmd, "threads", std::to_string(config.threads));
  cmd += " > " + shell_quote(files.log.string()) + " 2>&1";

  const int raw = std::system(cmd.c_str());
  const int exit_code = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  res.artifacts = {files.model, files.log};
  const std::string log = fs::exists(files.log) ? read_text_file(files.log) : std::string();
  const auto info = read_solver_log(log);

  if (!fs::exists(files.solution)) {
    res.status = SolveStatus::error;
    res.message = "solver exited with code " + std::to_string(exit_code) +
                  " without a solution file; log: " + excerpt(log.size() > 400 ? log.substr(log.size() - 400) : log);
    return finish(res);
  }
  res.artifacts.push_back(files.solution);

  ParsedSolution parsed;
  try {
    parsed = read_solution(read_text_file(files.solution), model);
  } catch (const SolverError& e) {
    res.status = SolveStatus::error;
    res.message = e.what();
    return finish(res);
  }

  const auto& head = parsed.status_line;
  const bool infeasible = head.find("nfeasible") != std::string::npos;
  if (infeasible || (info.result && info.result->find("infeasible") != std::string::npos)) {
    res.status = SolveStatus::infeasible;
    res.message = head;
    return finish(res);
  }
  if (head.rfind("Unbounded", 0) == 0) {
    res.status = SolveStatus::error;
    res.message = "solver reports an unbounded model";
    return finish(res);
  }
  const bool optimal = head.rfind("Optimal", 0) == 0;
  const bool stopped = head.rfind("Stopped", 0) == 0;
  if (!optimal && !stopped) {
    res.status = SolveStatus::error;
    res.message = "unrecognized solver status: " + excerpt(head);
    return finish(res);
  }
  if (stopped && info.no_solution) {
    res.status = SolveStatus::time_limit;
    res.message = "limits reached without an incumbent";
    return finish(res);
  }

  SolutionOutcome outcome;
  try {
    outcome = parse_solution(parsed, model);
  } catch (const SolverError& e) {
    res.status = SolveStatus::error;
    res.message = e.what();
    return finish(res);
  }

  res.objective = outcome.objective;
  if (optimal && head.find("gap") == std::string::npos) {
    res.bound = outcome.objective;
  } else if (info.bound) {
    // The log bound is printed to three decimals; never let rounding push
    // it to the wrong side of the incumbent.
    res.bound = std::max(*info.bound + model.objective.constant, outcome.objective);
  }
  if (res.bound) res.gap = std::abs(*res.objective - *res.bound) / std::max(1.0, std::abs(*res.objective));
  if (optimal) res.status = (res.gap && *res.gap > 1e-9) ? SolveStatus::gap_reached : SolveStatus::optimal;
  else res.status = SolveStatus::time_limit;

  auto report = check_schedule(instance, catalog, outcome.schedule, semantics);
  // Inside the lazy loop capacity rows may still be missing from the model;
  // the loop checks them itself.
  if (capacity_pending)
    std::erase_if(report.items, [](const ViolationItem& v) {
      return v.family == Family::capacity_upper || v.family == Family::capacity_lower;
    });
  if (!report.clean()) {
    res.status = SolveStatus::error;
    res.validation_failed = true;
    res.message = "returned schedule fails validation: " + report.items.front().message + " at " +
                  report.items.front().coordinate;
    return finish(res);
  }
  res.breakdown = evaluate_objective(instance, catalog, outcome.schedule);
  const double validated = to_double(res.breakdown->total);
  if (std::abs(validated - outcome.objective) > kObjectiveTolerance * std::max(1.0, std::abs(validated))) {
    res.status = SolveStatus::error;
    res.validation_failed = true;
    res.message = "validator objective " + format_number(validated) + " differs from model objective " +
                  format_number(outcome.objective);
    return finish(res);
  }
  res.schedule = std::move(outcome.schedule);
  return finish(res);
}

}  // namespace

void check_config(const SolverConfig& config) {
  if (!(config.time_limit > 0)) throw SolverError("time limit must be positive");
  if (!(config.gap >= 0)) throw SolverError("gap target must be nonnegative");
  if (config.threads < 1) throw SolverError("threads must be at least 1");
  for (const char* key : {"{model}", "{solution}"})
    if (config.command.find(key) == std::string::npos)
      throw SolverError(std::string("solver command template lacks ") + key);
}

std::string resolve_solver_path(const SolverConfig& config) {
  std::string name = config.solver;
  if (name.empty())
    if (const char* env = std::getenv("PIPESCHED_SOLVER"); env && *env) name = env;
  if (name.empty()) name = "cbc";
  if (name.find('/') != std::string::npos) {
    if (!executable(name)) throw SolverError("solver '" + name + "' is not an executable file");
    return name;
  }
  if (const char* path = std::getenv("PATH")) {
    std::stringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':'))
      if (!dir.empty() && executable(fs::path(dir) / name)) return (fs::path(dir) / name).string();
  }
  throw SolverError("solver '" + name + "' not found; set PIPESCHED_SOLVER or pass --solver");
}

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::gap_reached: return "gap_reached";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::error: return "error";
  }
  return "error";
}

ParsedSolution read_solution(const std::string& text, const MILPModel& model) {
  ParsedSolution out;
  out.values.assign(model.vars.size(), 0.0);
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (!header) {
      out.status_line = trim(line);
      header = true;
      const std::string key = "objective value";
      if (auto pos = line.find(key); pos != std::string::npos)
        out.reported_objective = parse_double(std::string_view(line).substr(pos + key.size()));
      if (out.status_line.find(" - ") == std::string::npos)
        throw SolverError("unparseable solver output: " + excerpt(text));
      continue;
    }
    std::istringstream row(line);
    std::string tok, name, value;
    row >> tok;
    if (tok == "**") row >> tok;
    row >> name >> value;
    auto id = parse_var_name(name, model);
    auto v = parse_double(value);
    if (!id || !v) throw SolverError("unparseable solution row '" + trim(line) + "' in: " + excerpt(text));
    out.values[*id] = *v;
    out.has_values = true;
  }
  if (!header) throw SolverError("empty solver output");
  return out;
}

SolutionOutcome parse_solution(const ParsedSolution& parsed, const MILPModel& model) {
  SolutionOutcome out;
  std::vector<double> values = parsed.values;
  for (VarId id = 0; id < model.vars.size(); ++id) {
    const auto& v = model.vars.at(id);
    if (!v.binary) continue;
    const double rounded = std::round(values[id]);
    if (std::abs(values[id] - rounded) > kIntegrality || rounded < 0 || rounded > 1)
      throw SolverError("integrality violation: " + variable_name(model, id) + " = " + format_number(values[id]));
    values[id] = rounded;
    if (v.kind == VarKind::placement && rounded > 0.5) out.schedule.placements.push_back({v.first, v.second, v.t});
  }
  out.schedule.normalize();
  // Recompute with rounded binaries and occupancies taken as given.
  out.objective = objective_value(model.objective, values);
  if (parsed.reported_objective) {
    const double reported = *parsed.reported_objective + model.objective.constant;
    if (std::abs(reported - out.objective) > kObjectiveTolerance * std::max(1.0, std::abs(out.objective)))
      throw SolverError("objective mismatch: solver reports " + format_number(reported) + ", model gives " +
                        format_number(out.objective));
  }
  return out;
}

SolutionOutcome parse_solution(const std::string& text, const MILPModel& model) {
  return parse_solution(read_solution(text, model), model);
}

SolverLogInfo read_solver_log(const std::string& log) {
  SolverLogInfo info;
  std::istringstream in(log);
  std::string line;
  auto after = [](const std::string& l, std::string_view key) -> std::optional<std::string> {
    if (l.rfind(key, 0) != 0) return std::nullopt;
    return trim(std::string_view(l).substr(key.size()));
  };
  while (std::getline(in, line)) {
    if (auto r = after(line, "Result - ")) info.result = *r;
    else if (auto o = after(line, "Objective value:")) info.objective = parse_double(*o);
    else if (auto u = after(line, "Upper bound:")) info.bound = parse_double(*u);
    else if (auto l = after(line, "Lower bound:")) info.bound = parse_double(*l);
    else if (line.rfind("No feasible solution found", 0) == 0) info.no_solution = true;
  }
  return info;
}

SolveResult solve(const Instance& instance, const BatchCatalog& catalog, const MILPModel& model,
                  const SolverConfig& config, const SemanticOptions& semantics) {
  check_config(config);
  const fs::path dir = config.work_dir.empty() ? fresh_work_dir() : config.work_dir;
  fs::create_directories(dir);
  auto res = solve_once(instance, catalog, model, config, semantics, run_files(dir, 0));
  if (!config.keep_files && config.work_dir.empty()) {
    fs::remove_all(dir);
    res.artifacts.clear();
  }
  return res;
}

std::vector<std::size_t> violated_lazy_rows(const Instance& instance, const BatchCatalog& catalog,
                                            const MILPModel& model, const Schedule& schedule) {
  const auto series = simulate_occupancy(instance, catalog, schedule);
  std::vector<double> values(model.vars.size(), 0.0);
  for (const auto& track : series.tracks) {
    for (std::size_t t = 0; t < track.upper.size(); ++t) {
      const int ti = static_cast<int>(t);
      if (auto v = model.vars.occupancy_upper(track.site, track.product, ti))
        values[*v] = static_cast<double>(track.upper[t]);
      if (auto v = model.vars.occupancy_lower(track.site, track.product, ti))
        values[*v] = static_cast<double>(track.lower[t]);
    }
  }
  std::vector<std::size_t> rows;
  for (const auto* index : {&model.upper_bound_rows, &model.lower_bound_rows})
    for (const auto& [key, r] : *index)
      if (model.constraints[r].lazy && row_violation(model.constraints[r], values) > 1e-9) rows.push_back(r);
  std::sort(rows.begin(), rows.end());
  return rows;
}

SolveResult solve_lazy_capacity(const Instance& instance, const BatchCatalog& catalog, const ModelOptions& options,
                                const SolverConfig& config, int max_iterations) {
  check_config(config);
  const auto started = std::chrono::steady_clock::now();
  ModelOptions relaxed = options;
  relaxed.capacity_lazy = true;
  MILPModel model = build_model(instance, catalog, relaxed);
  const fs::path dir = config.work_dir.empty() ? fresh_work_dir() : config.work_dir;
  fs::create_directories(dir);

  std::vector<LazyIteration> trace;
  std::vector<fs::path> artifacts;
  SolveResult last;
  for (int it = 1; it <= max_iterations; ++it) {
    SolverConfig step = config;
    const double spent = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    step.time_limit = std::max(1.0, config.time_limit - spent);
    last = solve_once(instance, catalog, model, step, options.semantics, run_files(dir, it), true);
    artifacts.insert(artifacts.end(), last.artifacts.begin(), last.artifacts.end());
    if (!last.schedule) {
      trace.push_back({it, 0, 0.0});
      break;
    }
    const auto rows = violated_lazy_rows(instance, catalog, model, *last.schedule);
    trace.push_back({it, rows.size(), *last.objective});
    if (rows.empty()) {
      const auto report = check_schedule(instance, catalog, *last.schedule, options.semantics);
      if (!report.clean()) {
        last.status = SolveStatus::error;
        last.validation_failed = true;
        last.message = "lazy loop converged on a schedule that fails validation: " + report.items.front().message +
                       " at " + report.items.front().coordinate;
        last.schedule.reset();
        last.breakdown.reset();
      }
      break;
    }
    for (auto r : rows) model.constraints[r].lazy = false;
    // The incumbent is not feasible for the full model.
    last.schedule.reset();
    last.breakdown.reset();
    if (it == max_iterations) {
      last.status = SolveStatus::error;
      last.message = "lazy capacity loop hit the iteration cap of " + std::to_string(max_iterations);
    } else if (last.status == SolveStatus::time_limit) {
      last.message = "time limit reached inside the lazy loop";
      break;
    }
  }
  last.lazy_trace = std::move(trace);
  last.artifacts = std::move(artifacts);
  last.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return last;
}

std::string result_json(const SolveResult& r) {
  nlohmann::ordered_json j;
  j["status"] = status_name(r.status);
  j["objective"] = r.objective ? nlohmann::ordered_json(*r.objective) : nlohmann::ordered_json();
  j["bound"] = r.bound ? nlohmann::ordered_json(*r.bound) : nlohmann::ordered_json();
  j["gap"] = r.gap ? nlohmann::ordered_json(*r.gap) : nlohmann::ordered_json();
  j["wall_seconds"] = r.wall_seconds;
  if (r.breakdown)
    j["breakdown"] = {{"inflow", to_double(r.breakdown->inflow)},
                      {"distribution", to_double(r.breakdown->distribution)},
                      {"replanning", to_double(r.breakdown->replanning)},
                      {"pumping", to_double(r.breakdown->pumping)},
                      {"total", to_double(r.breakdown->total)}};
  j["placements"] = r.schedule ? nlohmann::ordered_json(r.schedule->size()) : nlohmann::ordered_json();
  j["lazy_iterations"] = nlohmann::ordered_json::array();
  for (const auto& it : r.lazy_trace)
    j["lazy_iterations"].push_back({{"iteration", it.iteration}, {"added", it.added}, {"objective", it.objective}});
  j["message"] = r.message;
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : r.artifacts) j["artifacts"].push_back(a.string());
  return j.dump(2) + "\n";
}

}  // namespace pipesched
