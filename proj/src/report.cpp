#include "chiplet/report.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace chiplet {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

nlohmann::json evaluate_report(const DesignPoint& dp, const Calibration& cal) {
  const PpacResult r = evaluate(dp, cal);
  const MeshLayout lay = layout(dp);
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : lay.hbm_sites)
    sites.push_back({{"site", to_string(s.site)}, {"row", s.at.row}, {"col", s.at.col}});

  nlohmann::json j;
  j["design_point"] = to_json(dp);
  j["action"] = encode(dp);
  j["layout"] = {{"m", lay.m},
                 {"n", lay.n},
                 {"footprints", lay.footprints},
                 {"tiers", lay.tiers},
                 {"unpaired_dies", lay.unpaired_dies},
                 {"hbm_sites", sites}};
  j["ppac"] = to_json(r);
  if (!r.feasible) {
    j["monolithic"] = nullptr;
    j["comparison"] = nullptr;
    return j;
  }
  const MonolithicResult m = monolithic_baseline(cal, r.E_comm_bit);
  const Comparison c = compare_to_monolithic(r, m, cal.tech);
  j["monolithic"] = {{"area_mm2", m.area},       {"yield", m.yield},
                     {"die_cost", m.die_cost},   {"pe_tot", m.pe_tot},
                     {"ops_per_sec", m.ops_per_sec}, {"E_op_pj", m.e_op},
                     {"pkg_cost", m.pkg_cost}};
  j["comparison"] = {{"throughput_ratio", c.throughput_ratio},
                     {"energy_eff_ratio", c.energy_eff_ratio},
                     {"die_cost_ratio", c.die_cost_ratio},
                     {"pkg_cost_ratio", c.pkg_cost_ratio}};
  return j;
}

std::vector<BenchRow> bench_rows(const DesignPoint& dp, const Calibration& cal,
                                 const std::vector<Workload>& workloads) {
  const PpacResult r = evaluate(dp, cal);
  if (!r.feasible) throw std::invalid_argument("design point is infeasible; nothing to benchmark");
  const MonolithicResult m = monolithic_baseline(cal, r.E_comm_bit);
  std::vector<BenchRow> rows;
  for (const auto& w : workloads) {
    rows.push_back({"chiplet", w.name, "inferences_per_sec", tasks_per_sec(r.ops_per_sec_system, w)});
    rows.push_back({"chiplet", w.name, "inferences_per_joule", tasks_per_joule(r.E_op, w)});
    rows.push_back({"monolithic", w.name, "inferences_per_sec", tasks_per_sec(m.ops_per_sec, w)});
    rows.push_back({"monolithic", w.name, "inferences_per_joule", tasks_per_joule(m.e_op, w)});
  }
  return rows;
}

nlohmann::json bench_report(const DesignPoint& dp, const Calibration& cal,
                            const std::vector<Workload>& workloads) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& b : bench_rows(dp, cal, workloads))
    rows.push_back({{"system", b.system}, {"workload", b.workload}, {"metric", b.metric},
                    {"value", b.value}});
  nlohmann::json wl = nlohmann::json::array();
  for (const auto& w : workloads) wl.push_back(to_json(w));
  return {{"design_point", to_json(dp)}, {"workloads", wl}, {"rows", rows}};
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "system,workload,metric,value\n";
  const auto prec = os.precision(9);
  for (const auto& r : rows) os << r.system << ',' << r.workload << ',' << r.metric << ',' << r.value << '\n';
  os.precision(prec);
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool_version", tool_version}, {"config_hash", config_hash},
          {"calibration", calibration_path}, {"command", command},
          {"outputs", outputs},           {"wall_time_s", wall_time_s},
          {"runs", runs},                 {"selection", selection}};
}

nlohmann::json run_entry(const OptimizerRun& run, const std::string& trace_path) {
  return {{"optimizer", run.optimizer},
          {"seed", run.seed},
          {"trial", run.trial},
          {"best_obj", run.best_obj},
          {"best_action", run.best_action},
          {"best_point", to_json(decode(run.best_action))},
          {"trace_path", trace_path}};
}

}  // namespace chiplet
