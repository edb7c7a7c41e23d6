#include "pipesched/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "pipesched/util.hpp"

namespace pipesched {

namespace {

std::string opt_number(const std::optional<double>& v, int precision = 2) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

std::string gap_text(const std::optional<double>& g) {
  if (!g) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", *g);
  return buf;
}

nlohmann::ordered_json maybe(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
}

}  // namespace

std::string gantt_csv(const Instance& instance, const BatchCatalog& catalog, const Schedule& schedule) {
  auto rows = schedule.placements;
  std::sort(rows.begin(), rows.end(), [](const Placement& a, const Placement& b) {
    return std::tie(a.edge, a.start, a.batch) < std::tie(b.edge, b.start, b.batch);
  });
  std::ostringstream out;
  out << "edge,batch,product,start,end,volume\n";
  for (const auto& p : rows) {
    const auto& spec = catalog.spec(p.batch);
    out << instance.edges()[p.edge].id << ',' << spec.id << ',' << instance.products()[spec.product].id << ','
        << p.start << ',' << p.start + spec.length << ',' << spec.volume << '\n';
  }
  return out.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = {{"name", "pipesched"}, {"version", PIPESCHED_VERSION}};
  j["instance"] = {{"path", m.instance_path}, {"hash", m.instance_hash}};
  j["options"] = m.options;
  j["solver"] = {{"command", m.solver.command},
                 {"solver", m.solver.solver},
                 {"time_limit", m.solver.time_limit},
                 {"gap", m.solver.gap},
                 {"threads", m.solver.threads}};
  if (m.result) j["result"] = nlohmann::ordered_json::parse(result_json(*m.result));
  j["artifacts"] = nlohmann::ordered_json::object();
  for (const auto& [role, path] : m.artifacts) j["artifacts"][role] = path;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  return j.dump(2) + "\n";
}

std::optional<double> improvement_percent(double sd, double sdc) {
  if (sd == 0) return std::nullopt;
  return 100.0 * (sd - sdc) / sd;
}

nlohmann::ordered_json experiment_json(const std::string& suite, const std::string& outtake,
                                       const std::vector<ExperimentRow>& rows) {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["outtake_policy"] = outtake;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"vertices", r.vertices},
                         {"setting", r.setting},
                         {"mode", r.mode},
                         {"status", r.status},
                         {"seconds", r.seconds},
                         {"gap", maybe(r.gap)},
                         {"objective", maybe(r.objective)},
                         {"intake", r.intake ? nlohmann::ordered_json(*r.intake) : nlohmann::ordered_json()},
                         {"pumping_cost", maybe(r.pumping_cost)},
                         {"improvement_percent", maybe(r.improvement)},
                         {"warnings", r.warnings}});
  return j;
}

std::string experiment_table(const std::string& suite, const std::string& outtake,
                             const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "suite " << suite << ", outtake policy " << outtake << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-3s %-3s %-4s %-12s %9s %9s %12s %7s %10s %8s\n", "l", "set", "mode", "status",
                "time[s]", "gap", "objective", "intake", "pumping", "impr[%]");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-3d %-3s %-4s %-12s %9.1f %9s %12s %7s %10s %8s\n", r.vertices,
                  r.setting.c_str(), r.mode.c_str(), r.status.c_str(), r.seconds, gap_text(r.gap).c_str(),
                  opt_number(r.objective).c_str(), r.intake ? std::to_string(*r.intake).c_str() : "-",
                  opt_number(r.pumping_cost, 0).c_str(), opt_number(r.improvement, 1).c_str());
    out << line;
    for (const auto& w : r.warnings) out << "    warning: " << w << '\n';
  }
  return out.str();
}

}  // namespace pipesched
