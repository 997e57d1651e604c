#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiplet/calibration.hpp"
#include "chiplet/optim_hybrid.hpp"
#include "chiplet/ppac_model.hpp"
#include "chiplet/workloads.hpp"

namespace chiplet {

inline constexpr const char* kToolVersion = "0.3.0";

// Writes to a sibling temp file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Design point, layout, PPAC metrics, monolithic baseline and the four ratios.
nlohmann::json evaluate_report(const DesignPoint& dp, const Calibration& cal);

struct BenchRow {
  std::string system;  // "chiplet" or "monolithic"
  std::string workload;
  std::string metric;  // "inferences_per_sec" or "inferences_per_joule"
  double value = 0.0;
};

std::vector<BenchRow> bench_rows(const DesignPoint& dp, const Calibration& cal,
                                 const std::vector<Workload>& workloads);
nlohmann::json bench_report(const DesignPoint& dp, const Calibration& cal,
                            const std::vector<Workload>& workloads);
// Header: system,workload,metric,value
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::string calibration_path;
  std::string command;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;
  nlohmann::json runs = nlohmann::json::array();  // {optimizer, seed, trial, best_obj, best_point, trace_path}
  nlohmann::json selection;                        // final pick with provenance

  nlohmann::json to_json() const;
};

nlohmann::json run_entry(const OptimizerRun& run, const std::string& trace_path);

}  // namespace chiplet
