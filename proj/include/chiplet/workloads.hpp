#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace chiplet {

struct Workload {
  std::string name;
  std::string domain;
  double ops_g = 0.0;   // GEMM FLOPs per task
  double ops_ng = 0.0;  // non-GEMM FLOPs per task
  double m_eff = 1.0;   // mapping efficiency
  int d_w = 8;          // operand width, bits

  void validate() const;
};

// The five forward-pass inference benchmarks used for the system comparison.
std::vector<Workload> builtin_benchmarks();

double tasks_per_sec(double system_ops, const Workload& w);
double tasks_per_joule(double e_op_pj, const Workload& w);

// {name, domain, ops_g_gflops, ops_ng_gflops, m_eff, d_w_bits}
nlohmann::json to_json(const Workload& w);
Workload workload_from_json(const nlohmann::json& j);
std::vector<Workload> workloads_from_json(const nlohmann::json& rows);

}  // namespace chiplet
