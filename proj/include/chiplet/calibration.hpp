#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "chiplet/design_space.hpp"

namespace chiplet {

struct TechNode {
  std::string name = "7nm";
  double defect_density = 0.0975;  // defects / cm^2
  double cluster_alpha = 4.0;
  double unit_price = 1.0;         // currency / mm^2
  double pe_area = 0.00445;        // mm^2 per PE, vendor-calibration input
  double e_mac = 6.0;              // pJ per MAC, vendor-calibration input
  double cycle_op = 1.0;           // cycles per MAC
  double freq_hz = 1e9;

  void validate() const;
};

enum class CostClass : int { kLow = 0, kMedium = 1, kHigh = 2, kHighest = 3 };

struct InterconnectSpec {
  Interconnect name = Interconnect::kCoWoS;
  double e_bit_min = 0.0;  // pJ/bit
  double e_bit_max = 0.0;
  double t_w_ps = 0.0;     // per-hop wire delay
  double trace_lo = 1.0;   // mm, 2.5D only
  double trace_hi = 10.0;
  CostClass impl_cost_class = CostClass::kLow;

  bool three_d() const { return is_3d(name); }
};

struct TimingParams {
  double t_r_ps = 250.0;  // router delay
  double t_c_ps = 0.0;    // contention
  double t_s_ps = 0.0;    // serialization
};

struct TechTables {
  std::array<InterconnectSpec, 4> interconnects;  // indexed by Interconnect
  TimingParams timing;

  const InterconnectSpec& at(Interconnect ic) const {
    return interconnects[static_cast<int>(ic)];
  }
};

struct PackagingCoeff {
  double mu0 = 0.0;  // currency / mm^2
  double mu1 = 0.0;  // currency / link
  double mu2 = 0.0;  // currency
};

struct PackagingCostCoeffs {
  std::array<PackagingCoeff, 4> by_family;  // indexed by Interconnect
  double bond_yield = 0.99;                 // per bonded footprint

  const PackagingCoeff& at(Interconnect ic) const { return by_family[static_cast<int>(ic)]; }
};

struct RewardWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.1;
  double t_ref_tops = 0.5;
  double c_ref = 10.0;
  double e_ref_pj = 0.05;
};

struct ModelParams {
  double u_chip = 0.85;        // intra-chiplet PE utilization (assumed)
  int n_operands = 2;
  int data_width_bits = 8;
  double reuse_factor = 1.0;   // divides per-op traffic
  double reuse_window = 0.0;   // ops over which a comm latency is amortized; 0 = PE array edge
  int fanout_hbm = 4;
  int fanout_ai = 1;
  double penalty = -1000.0;    // reward of an infeasible point
};

struct MonolithicParams {
  double area = 826.0;                        // mm^2
  Interconnect hbm_ic = Interconnect::kCoWoS;
  int hbm_links = 5000;
  double offboard_energy_factor = 10.0;       // off-board / on-package energy per bit
};

struct Calibration {
  PackageConstraints package;
  TechNode tech;
  TechTables tables;
  PackagingCostCoeffs packaging;
  RewardWeights weights;
  ModelParams model;
  MonolithicParams monolithic;

  void validate() const;
};

Calibration default_calibration();

// Strict loader: every key present overrides the default; unknown keys and
// wrongly typed values throw std::invalid_argument naming the field.
Calibration calibration_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Calibration& c);

}  // namespace chiplet
