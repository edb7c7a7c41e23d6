// pipesched: generate, build, solve and check pipeline scheduling instances.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pipesched/generator.hpp"
#include "pipesched/instance_io.hpp"
#include "pipesched/milp_model.hpp"
#include "pipesched/oracle.hpp"
#include "pipesched/reports.hpp"
#include "pipesched/solver.hpp"
#include "pipesched/util.hpp"

namespace fs = std::filesystem;
using namespace pipesched;

namespace {

enum Exit { kOk = 0, kInfeasible = 2, kNoIncumbent = 3, kInvalid = 4, kConfig = 5 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  bool lazy = false;
  bool cumulative = false;
  bool relax_terminal_flush = false;
  bool throughput_per_edge = false;

  ModelOptions options() const {
    ModelOptions o;
    o.capacity_lazy = lazy;
    o.capacity_form = cumulative ? CapacityForm::cumulative : CapacityForm::incremental;
    o.semantics.relax_terminal_flush = relax_terminal_flush;
    o.semantics.throughput_per_edge = throughput_per_edge;
    return o;
  }
  nlohmann::ordered_json json() const {
    return {{"lazy", lazy},
            {"capacity_form", cumulative ? "cumulative" : "incremental"},
            {"relax_terminal_flush", relax_terminal_flush},
            {"throughput_per_edge", throughput_per_edge}};
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_lazy) {
  if (with_lazy) cmd->add_flag("--lazy", f.lazy, "Start with capacity bounds omitted and add them as violated");
  cmd->add_flag("--cumulative", f.cumulative, "Write capacity definitions as running sums");
  cmd->add_flag("--relax-terminal-flush", f.relax_terminal_flush, "Exempt stains ending too late to be flushed");
  cmd->add_flag("--throughput-per-edge", f.throughput_per_edge, "Count throughput limits on every crossing");
}

void add_solver_flags(CLI::App* cmd, SolverConfig& c) {
  cmd->add_option("--gap", c.gap, "Relative optimality gap target")->capture_default_str();
  cmd->add_option("--time-limit", c.time_limit, "Solver time limit in seconds")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Solver threads")->capture_default_str();
  cmd->add_option("--solver", c.solver, "Solver executable (default: $PIPESCHED_SOLVER, then cbc)");
  cmd->add_option("--command", c.command, "Solver command template")->capture_default_str();
}

Instance load(const std::string& path) {
  std::optional<Instance> inst;
  try {
    inst.emplace(load_instance(path));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto problems = validate_instance(*inst);
  if (!problems.empty()) {
    std::string msg = path + " is not a valid instance:";
    for (const auto& v : problems) msg += "\n  " + v.code + ": " + v.message;
    throw ConfigError(msg);
  }
  return std::move(*inst);
}

int exit_for(const SolveResult& r) {
  if (r.validation_failed) return kInvalid;
  if (r.schedule) return kOk;
  switch (r.status) {
    case SolveStatus::infeasible: return kInfeasible;
    case SolveStatus::time_limit: return kNoIncumbent;
    default: return kConfig;
  }
}

std::string summary_line(const SolveResult& r) {
  std::string s = std::string("status ") + status_name(r.status);
  if (r.objective) s += "  objective " + format_number(*r.objective);
  if (r.bound) s += "  bound " + format_number(*r.bound);
  if (r.gap) s += "  gap " + format_number(*r.gap);
  s += "  time " + format_number(std::round(r.wall_seconds * 100) / 100) + "s";
  if (!r.lazy_trace.empty()) s += "  lazy iterations " + std::to_string(r.lazy_trace.size());
  if (!r.message.empty()) s += "\n" + r.message;
  return s;
}

SolveResult run_solve(const Instance& inst, const BatchCatalog& cat, const ModelFlags& flags, SolverConfig config) {
  const auto options = flags.options();
  if (flags.lazy) return solve_lazy_capacity(inst, cat, options, config);
  const auto model = build_model(inst, cat, options);
  return solve(inst, cat, model, config, options.semantics);
}

// Writes schedule, gantt, occupancy and report files next to the manifest.
void write_outputs(const fs::path& dir, const Instance& inst, const BatchCatalog& cat, const SolveResult& r,
                   const SemanticOptions& sem, RunManifest& m) {
  for (std::size_t i = 0; i < r.artifacts.size(); ++i)
    m.artifacts.emplace_back(r.artifacts[i].stem().string(), r.artifacts[i].string());
  if (!r.schedule) return;
  write_text_file(dir / "schedule.json", schedule_to_json(inst, cat, *r.schedule).dump(2) + "\n");
  write_text_file(dir / "gantt.csv", gantt_csv(inst, cat, *r.schedule));
  write_text_file(dir / "occupancy.csv", occupancy_csv(inst, simulate_occupancy(inst, cat, *r.schedule)));
  write_text_file(dir / "report.json", report_json(check_schedule(inst, cat, *r.schedule, sem)));
  for (const char* name : {"schedule.json", "gantt.csv", "occupancy.csv", "report.json"})
    m.artifacts.emplace_back(fs::path(name).stem().string(), (dir / name).string());
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct ExperimentArgs {
  std::string suite;
  std::string vertices;
  std::string settings = "A";
  std::string outtake = "daily";
  std::string out_dir = "runs";
  ModelFlags flags;
  SolverConfig solver;
  bool gap_given = false;
  int jobs = 1;
  std::uint64_t seed = 0;
};

int run_experiment(ExperimentArgs a) {
  if (a.suite != "SD" && a.suite != "SDC" && a.suite != "large")
    throw ConfigError("unknown suite '" + a.suite + "' (expected SD, SDC or large)");
  auto policy = outtake_policy_from_name(a.outtake);
  if (!policy) throw ConfigError("unknown outtake policy '" + a.outtake + "'");
  if (a.vertices.empty()) a.vertices = a.suite == "large" ? "6,7,8" : "4,5";
  if (a.suite == "large" && !a.gap_given) a.solver.gap = 1e-4;
  check_config(a.solver);
  resolve_solver_path(a.solver);

  struct Task {
    int vertices;
    Setting setting;
    CostMode mode;
  };
  std::vector<Task> tasks;
  for (const auto& v : split(a.vertices)) {
    int l = 0;
    try {
      l = std::stoi(v);
    } catch (const std::exception&) {
      throw ConfigError("bad vertex count '" + v + "'");
    }
    if (l < 2) throw ConfigError("vertex count must be at least 2");
    for (const auto& s : split(a.settings)) {
      auto setting = setting_from_name(s);
      if (!setting) throw ConfigError("unknown setting '" + s + "'");
      tasks.push_back({l, *setting, CostMode::SD});
      if (a.suite == "SDC") tasks.push_back({l, *setting, CostMode::SDC});
    }
  }

  const fs::path root(a.out_dir);
  std::vector<ExperimentRow> rows(tasks.size());
  std::vector<std::string> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      PathExperimentParams params{t.vertices, t.setting, t.mode, *policy, a.seed, {}, {}};
      const auto gen = generate_path_instance(params);
      const std::string name = "l" + std::to_string(t.vertices) + "_" + setting_name(t.setting) + "_" +
                               cost_mode_name(t.mode);
      const fs::path dir = root / name;
      save_instance(gen.instance, dir / "instance.json");
      const BatchCatalog cat(gen.instance);
      SolverConfig cfg = a.solver;
      cfg.work_dir = dir / "solver";
      RunManifest m;
      m.started_at = utc_timestamp();
      m.instance_path = (dir / "instance.json").string();
      m.instance_hash = instance_hash(gen.instance);
      m.options = a.flags.json();
      m.options["suite"] = a.suite;
      m.options["vertices"] = t.vertices;
      m.options["setting"] = setting_name(t.setting);
      m.options["cost_mode"] = cost_mode_name(t.mode);
      m.options["outtake_policy"] = a.outtake;
      m.solver = cfg;
      auto r = run_solve(gen.instance, cat, a.flags, cfg);
      write_outputs(dir, gen.instance, cat, r, a.flags.options().semantics, m);
      m.finished_at = utc_timestamp();
      m.result = r;
      write_text_file(dir / "manifest.json", manifest_json(m));

      ExperimentRow row;
      row.vertices = t.vertices;
      row.setting = setting_name(t.setting);
      row.mode = cost_mode_name(t.mode);
      row.status = status_name(r.status);
      row.seconds = r.wall_seconds;
      row.gap = r.gap;
      row.objective = r.objective;
      row.warnings = gen.warnings;
      if (r.schedule) {
        row.intake = intake_volume(gen.instance, cat, *r.schedule);
        row.pumping_cost = pumping_cost(gen.instance, cat, *r.schedule);
      }
      if (r.validation_failed) failures[i] = name + ": " + r.message;
      rows[i] = std::move(row);
      std::lock_guard lock(log_mutex);
      std::cerr << name << ": " << summary_line(r) << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, a.jobs); ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (const auto& f : failures)
    if (!f.empty()) {
      std::cerr << "validator rejected a solver schedule: " << f << '\n';
      return kInvalid;
    }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (tasks[i].mode != CostMode::SD || tasks[i + 1].mode != CostMode::SDC) continue;
    if (rows[i].pumping_cost && rows[i + 1].pumping_cost)
      rows[i + 1].improvement = improvement_percent(*rows[i].pumping_cost, *rows[i + 1].pumping_cost);
  }
  auto summary = experiment_json(a.suite, a.outtake, rows);
  write_text_file(root / "summary.json", summary.dump(2) + "\n");
  const auto table = experiment_table(a.suite, a.outtake, rows);
  write_text_file(root / "summary.txt", table);
  std::cout << table;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pipeline batch scheduling: instance generation, MILP build and solve, validation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PIPESCHED_VERSION);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a path experiment or random oracle instance");
  std::string gen_kind = "path", gen_setting = "A", gen_mode = "SD", gen_policy = "daily", gen_out, gen_dir;
  int gen_vertices = 4, gen_count = 1;
  std::uint64_t gen_seed = 0;
  std::optional<int> gen_horizon;
  std::optional<Volume> gen_cap;
  gen->add_option("--kind", gen_kind, "path or oracle")->check(CLI::IsMember({"path", "oracle"}))->capture_default_str();
  gen->add_option("--vertices,-l", gen_vertices, "Path vertices including the refinery")->capture_default_str();
  gen->add_option("--setting", gen_setting, "Nomination setting A, B or C")->capture_default_str();
  gen->add_option("--cost-mode", gen_mode, "SD or SDC")->capture_default_str();
  gen->add_option("--outtake-policy", gen_policy, "daily, front-loaded or uniform-hourly")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--count", gen_count, "Oracle instances to write, seeds seed..seed+count-1")->capture_default_str();
  gen->add_option("--horizon", gen_horizon, "Override the horizon length");
  gen->add_option("--capacity-max", gen_cap, "Override storage capacity");
  gen->add_option("--out,-o", gen_out, "Output file (single instance)");
  gen->add_option("--out-dir", gen_dir, "Output directory (writes a manifest)");

  // build
  auto* build = app.add_subcommand("build", "Build the MILP and write it in LP format");
  std::string build_instance, build_dir = ".";
  ModelFlags build_flags;
  build->add_option("--instance,-i", build_instance, "Instance JSON")->required();
  build->add_option("--out-dir", build_dir, "Output directory")->capture_default_str();
  add_model_flags(build, build_flags, true);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Build, solve with the external solver and validate");
  std::string solve_instance, solve_dir = "run";
  ModelFlags solve_flags;
  SolverConfig solve_cfg;
  solve_cmd->add_option("--instance,-i", solve_instance, "Instance JSON")->required();
  solve_cmd->add_option("--out-dir", solve_dir, "Run directory")->capture_default_str();
  add_model_flags(solve_cmd, solve_flags, true);
  add_solver_flags(solve_cmd, solve_cfg);

  // validate
  auto* val = app.add_subcommand("validate", "Check a schedule against an instance");
  std::string val_instance, val_schedule, val_dir;
  ModelFlags val_flags;
  val->add_option("--instance,-i", val_instance, "Instance JSON")->required();
  val->add_option("--schedule,-s", val_schedule, "Schedule JSON")->required();
  val->add_option("--out-dir", val_dir, "Write report.json and occupancy.csv here");
  add_model_flags(val, val_flags, false);

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exhaustive optimum of a tiny instance");
  std::string orc_instance, orc_dir;
  std::uint64_t orc_seed = 0;
  OracleLimits orc_limits;
  orc->add_option("--instance,-i", orc_instance, "Instance JSON (default: generated from --seed)");
  orc->add_option("--seed", orc_seed, "Seed for a generated oracle instance")->capture_default_str();
  orc->add_option("--node-budget", orc_limits.node_budget, "Search node budget")->capture_default_str();
  orc->add_option("--out-dir", orc_dir, "Write schedule.json here");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Generate, solve and tabulate a path-graph suite");
  ExperimentArgs ea;
  exp->add_option("suite", ea.suite, "SD, SDC or large")->required();
  exp->add_option("--vertices", ea.vertices, "Comma separated vertex counts (default 4,5; large: 6,7,8)");
  exp->add_option("--settings", ea.settings, "Comma separated settings")->capture_default_str();
  exp->add_option("--outtake-policy", ea.outtake, "daily, front-loaded or uniform-hourly")->capture_default_str();
  exp->add_option("--out-dir", ea.out_dir, "Suite directory")->capture_default_str();
  exp->add_option("--jobs", ea.jobs, "Concurrent solves")->capture_default_str();
  exp->add_option("--seed", ea.seed, "Generator seed")->capture_default_str();
  add_model_flags(exp, ea.flags, true);
  add_solver_flags(exp, ea.solver);

  // gantt
  auto* gantt = app.add_subcommand("gantt", "Export a schedule as Gantt CSV");
  std::string gantt_instance, gantt_schedule, gantt_out;
  gantt->add_option("--instance,-i", gantt_instance, "Instance JSON")->required();
  gantt->add_option("--schedule,-s", gantt_schedule, "Schedule JSON")->required();
  gantt->add_option("--out,-o", gantt_out, "Output CSV (default stdout)");

  // catalog
  auto* cat_cmd = app.add_subcommand("catalog", "List the batch catalog as CSV");
  std::string cat_instance;
  cat_cmd->add_option("--instance,-i", cat_instance, "Instance JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*gen) {
      if (gen_kind == "oracle") {
        std::vector<ManifestEntry> entries;
        for (int k = 0; k < gen_count; ++k) {
          const auto seed = gen_seed + static_cast<std::uint64_t>(k);
          const auto inst = generate_oracle_instance(seed);
          if (!gen_dir.empty()) {
            const auto path = fs::path(gen_dir) / ("oracle_seed" + std::to_string(seed) + ".json");
            save_instance(inst, path);
            entries.push_back({path.string(), {{"kind", "oracle"}, {"seed", seed}}, instance_hash(inst)});
          } else if (!gen_out.empty()) {
            save_instance(inst, gen_out);
          } else {
            std::cout << dump_instance(inst);
          }
        }
        if (!gen_dir.empty()) write_text_file(fs::path(gen_dir) / "manifest.json", manifest_json(entries));
        return kOk;
      }
      auto setting = setting_from_name(gen_setting);
      auto mode = cost_mode_from_name(gen_mode);
      auto policy = outtake_policy_from_name(gen_policy);
      if (!setting || !mode || !policy) throw ConfigError("unknown setting, cost mode or outtake policy");
      PathExperimentParams p{gen_vertices, *setting, *mode, *policy, gen_seed, gen_horizon, gen_cap};
      GeneratedInstance g = [&] {
        try {
          return generate_path_instance(p);
        } catch (const InstanceError& e) {
          throw ConfigError(e.what());
        }
      }();
      for (const auto& w : g.warnings) std::cerr << "warning: " << w << '\n';
      if (!gen_dir.empty()) {
        const std::string name = "l" + std::to_string(gen_vertices) + "_" + gen_setting + "_" + gen_mode + ".json";
        const auto path = fs::path(gen_dir) / name;
        save_instance(g.instance, path);
        nlohmann::ordered_json params = {{"kind", "path"},         {"vertices", gen_vertices}, {"setting", gen_setting},
                                         {"cost_mode", gen_mode},  {"outtake_policy", gen_policy},
                                         {"seed", gen_seed}};
        write_text_file(fs::path(gen_dir) / "manifest.json",
                        manifest_json(std::vector<ManifestEntry>{{path.string(), params, instance_hash(g.instance)}}));
      } else if (!gen_out.empty()) {
        save_instance(g.instance, gen_out);
      } else {
        std::cout << dump_instance(g.instance);
      }
      return kOk;
    }

    if (*build) {
      const auto inst = load(build_instance);
      const BatchCatalog cat(inst);
      const auto model = build_model(inst, cat, build_flags.options());
      const fs::path dir(build_dir);
      write_text_file(dir / "model.lp", write_lp(model));
      write_text_file(dir / "model.json", metadata_json(model));
      write_text_file(dir / "catalog.csv", catalog_csv(inst, cat));
      for (const auto& w : model.metadata.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "variables " << model.vars.size() << ", rows " << model.active_count() << " active of "
                << model.constraints.size() << "\n";
      for (Family f : kAllFamilies)
        if (auto n = model.count(f)) std::cout << "  " << family_name(f) << ' ' << n << '\n';
      return kOk;
    }

    if (*solve_cmd) {
      check_config(solve_cfg);
      resolve_solver_path(solve_cfg);
      const auto inst = load(solve_instance);
      const BatchCatalog cat(inst);
      const fs::path dir(solve_dir);
      solve_cfg.work_dir = dir / "solver";
      RunManifest m;
      m.started_at = utc_timestamp();
      m.instance_path = fs::absolute(solve_instance).string();
      m.instance_hash = instance_hash(inst);
      m.options = solve_flags.json();
      m.solver = solve_cfg;
      const auto r = run_solve(inst, cat, solve_flags, solve_cfg);
      write_outputs(dir, inst, cat, r, solve_flags.options().semantics, m);
      m.finished_at = utc_timestamp();
      m.result = r;
      write_text_file(dir / "manifest.json", manifest_json(m));
      std::cout << summary_line(r) << '\n';
      if (r.breakdown)
        std::cout << "intake " << intake_volume(inst, cat, *r.schedule) << "  pumping cost "
                  << format_number(pumping_cost(inst, cat, *r.schedule)) << "  placements " << r.schedule->size()
                  << '\n';
      return exit_for(r);
    }

    if (*val) {
      const auto inst = load(val_instance);
      const BatchCatalog cat(inst);
      Schedule s;
      try {
        s = schedule_from_json(inst, cat, nlohmann::json::parse(read_text_file(val_schedule)));
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      const auto report = check_schedule(inst, cat, s, val_flags.options().semantics);
      std::cout << report_table(report);
      if (report.clean()) {
        const auto obj = evaluate_objective(inst, cat, s);
        std::cout << "objective " << format_number(to_double(obj.total)) << " (intake "
                  << format_number(to_double(obj.inflow)) << ", distribution "
                  << format_number(to_double(obj.distribution)) << ", replanning "
                  << format_number(to_double(obj.replanning)) << ", pumping " << format_number(to_double(obj.pumping))
                  << ")\n";
      }
      if (!val_dir.empty()) {
        write_text_file(fs::path(val_dir) / "report.json", report_json(report));
        if (report.count(Family::horizon_fit) == 0 && report.count(Family::routes) == 0)
          write_text_file(fs::path(val_dir) / "occupancy.csv", occupancy_csv(inst, simulate_occupancy(inst, cat, s)));
      }
      return report.clean() ? kOk : kInvalid;
    }

    if (*orc) {
      const auto inst = orc_instance.empty() ? generate_oracle_instance(orc_seed) : load(orc_instance);
      OracleResult r;
      try {
        r = brute_force_optimum(inst, orc_limits);
      } catch (const OracleError& e) {
        throw ConfigError(e.what());
      }
      std::cout << "nodes " << r.nodes << '\n';
      if (r.budget_exceeded) {
        std::cout << "node budget exceeded\n";
        return kNoIncumbent;
      }
      if (!r.feasible) {
        std::cout << "infeasible\n";
        return kInfeasible;
      }
      std::cout << "objective " << r.objective.str() << "\nplacements " << r.schedule.size() << '\n';
      if (!orc_dir.empty()) {
        const BatchCatalog cat(inst);
        write_text_file(fs::path(orc_dir) / "schedule.json", schedule_to_json(inst, cat, r.schedule).dump(2) + "\n");
      }
      return kOk;
    }

    if (*exp) {
      ea.gap_given = exp->count("--gap") > 0;
      return run_experiment(ea);
    }

    if (*gantt) {
      const auto inst = load(gantt_instance);
      const BatchCatalog cat(inst);
      Schedule s;
      try {
        s = schedule_from_json(inst, cat, nlohmann::json::parse(read_text_file(gantt_schedule)));
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      const auto report = check_schedule(inst, cat, s);
      if (!report.clean()) {
        std::cerr << report_table(report);
        return kInvalid;
      }
      const auto csv = gantt_csv(inst, cat, s);
      if (gantt_out.empty()) std::cout << csv;
      else write_text_file(gantt_out, csv);
      return kOk;
    }

    if (*cat_cmd) {
      const auto inst = load(cat_instance);
      const BatchCatalog cat(inst);
      for (const auto& w : cat.warnings()) std::cerr << "warning: " << w << '\n';
      std::cout << catalog_csv(inst, cat);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
