#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiplet/calibration.hpp"
#include "chiplet/design_space.hpp"

namespace chiplet {

class ZeroPEs : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Negative-binomial die yield; area in mm^2, defect density in defects/cm^2.
double die_yield(double area_mm2, const TechNode& tech);
double cost_per_yielded_area(double area_mm2, const TechNode& tech);
// Second-order series of P0 / yield.
double cost_per_yielded_area_taylor(double area_mm2, const TechNode& tech);

int hops_ai_ai(const MeshLayout& lay);
// Hops from the nearest HBM to every AI footprint, row-major over the m x n grid.
std::vector<int> hbm_hops_per_cell(const MeshLayout& lay);
int hops_hbm_ai(const MeshLayout& lay);

double link_latency_ps(int hops, const InterconnectSpec& ic, const TimingParams& tp);

struct ChipletCompute {
  long pe_tot = 0;
  double cycles_per_op = 1.0;
  double ops_per_sec = 0.0;
};

// `comm_cycles` is the communication latency in cycles, amortized over the
// reuse window (the PE array edge when the window is 0).
ChipletCompute chiplet_peak_ops(double area_per_chiplet, const PackageConstraints& pc,
                                const TechNode& tech, double u_chip, int tiers = 1,
                                double comm_cycles = 0.0, double reuse_window = 0.0);

enum class LinkSource { kHbm, kAi };

double bw_req(double peak_ops, LinkSource src, const ModelParams& mp);  // bits/s
double bw_act(double dr_gbps, int links);                              // bits/s
// Reporting unit: Gbps totals divided by 1024.
double to_tbps(double bits_per_sec);
double u_sys(double bw_act, double bw_req);
double system_ops(int n_chiplets, double peak_ops, double u);

double e_comm_bit(const InterconnectSpec& ic, double trace_mm);
double bits_per_op(const ModelParams& mp);
double energy_per_op(double e_comm_bit_pj, double bits, const TechNode& tech);

enum class LinkKind { kAiAi2p5D, kAiAi3D, kHbmAi2p5D, kHbmAi3D };

struct LinkClass {
  LinkKind kind;
  Interconnect ic;
  double dr_gbps;
  int links;
  double trace_mm;  // 0 for 3D
};

// Link classes a design actually uses.
std::vector<LinkClass> active_link_classes(const DesignPoint& dp, const MeshLayout& lay);

double packaging_cost(const DesignPoint& dp, const MeshLayout& lay,
                      const PackagingCostCoeffs& coeffs, double pkg_area);

double reward(double throughput_ops, double pkg_cost, double energy_pj,
              const RewardWeights& w);

struct PpacResult {
  bool feasible = false;
  std::vector<std::string> reasons;
  double area_per_chiplet = 0.0;
  long pe_per_chiplet = 0;
  double cycles_per_op = 0.0;
  double ops_per_sec_chiplet = 0.0;
  double ops_per_sec_system = 0.0;
  double u_sys = 0.0;
  double u_chip = 0.0;
  double L_ai_ai = 0.0;   // ps
  double L_hbm_ai = 0.0;  // ps
  int H_ai_ai = 0;
  int H_hbm_ai = 0;
  double bw_req_hbm = 0.0;  // bits/s
  double bw_req_ai = 0.0;
  double bw_act_hbm = 0.0;
  double bw_act_ai_2p5d = 0.0;
  double bw_act_ai_3d = 0.0;
  double E_op = 0.0;        // pJ/op
  double E_comm_bit = 0.0;  // pJ/bit
  double die_yield = 0.0;
  double die_cost_total = 0.0;
  double pkg_cost = 0.0;
  double reward = 0.0;
};

PpacResult evaluate(const DesignPoint& dp, const Calibration& cal);
nlohmann::json to_json(const PpacResult& r);

struct MonolithicResult {
  double area = 0.0;
  double yield = 0.0;
  double die_cost = 0.0;
  long pe_tot = 0;
  double ops_per_sec = 0.0;
  double e_op = 0.0;  // pJ/op when scaled out off-board to match a chiplet system
  double pkg_cost = 0.0;
};

// `e_bit_on_package` is the per-bit energy of the chiplet system being compared;
// the monolithic system moves the same traffic over off-board links.
MonolithicResult monolithic_baseline(const Calibration& cal, double e_bit_on_package);

struct Comparison {
  double throughput_ratio = 0.0;   // chiplet / monolithic
  double energy_eff_ratio = 0.0;   // chiplet tasks/J over monolithic tasks/J
  double die_cost_ratio = 0.0;     // monolithic per-die / chiplet per-die
  double pkg_cost_ratio = 0.0;     // chiplet / monolithic
};

Comparison compare_to_monolithic(const PpacResult& chip, const MonolithicResult& mono,
                                 const TechNode& tech);

}  // namespace chiplet
