#include "chiplet/ppac_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chiplet {

double die_yield(double area_mm2, const TechNode& tech) {
  if (area_mm2 <= 0) throw std::invalid_argument("die area must be positive");
  const double da = tech.defect_density * area_mm2 / 100.0;  // mm^2 -> cm^2
  return std::pow(1.0 + da / tech.cluster_alpha, -tech.cluster_alpha);
}

double cost_per_yielded_area(double area_mm2, const TechNode& tech) {
  return tech.unit_price / die_yield(area_mm2, tech);
}

double cost_per_yielded_area_taylor(double area_mm2, const TechNode& tech) {
  const double da = tech.defect_density * area_mm2 / 100.0;
  const double a = tech.cluster_alpha;
  return tech.unit_price * (1.0 + da + (a - 1.0) / (2.0 * a) * da * da);
}

int hops_ai_ai(const MeshLayout& lay) { return lay.m + lay.n - 2; }

std::vector<int> hbm_hops_per_cell(const MeshLayout& lay) {
  if (lay.hbm_sites.empty()) throw std::invalid_argument("layout has no HBM sites");
  std::vector<int> hops(static_cast<std::size_t>(lay.m) * lay.n);
  for (int r = 0; r < lay.m; ++r) {
    for (int c = 0; c < lay.n; ++c) {
      int best = std::numeric_limits<int>::max();
      for (const auto& s : lay.hbm_sites)
        best = std::min(best, std::abs(s.at.row - r) + std::abs(s.at.col - c));
      hops[static_cast<std::size_t>(r) * lay.n + c] = best;
    }
  }
  return hops;
}

int hops_hbm_ai(const MeshLayout& lay) {
  const auto h = hbm_hops_per_cell(lay);
  return *std::max_element(h.begin(), h.end());
}

double link_latency_ps(int hops, const InterconnectSpec& ic, const TimingParams& tp) {
  if (hops < 0) throw std::invalid_argument("hop count must be >= 0");
  return hops * ic.t_w_ps + hops * tp.t_r_ps + tp.t_c_ps + tp.t_s_ps;
}

ChipletCompute chiplet_peak_ops(double area_per_chiplet, const PackageConstraints& pc,
                                const TechNode& tech, double u_chip, int tiers,
                                double comm_cycles, double reuse_window) {
  const double usable = area_per_chiplet - (tiers == 2 ? pc.tsv_reserve : 0.0);
  const double compute_area = usable * pc.area_compute;
  if (compute_area < tech.pe_area)
    throw ZeroPEs("compute area " + std::to_string(compute_area) +
                  " mm^2 holds no processing element");
  ChipletCompute out;
  // Tiny epsilon keeps exact multiples from flooring down on rounding noise.
  out.pe_tot = static_cast<long>(std::floor(compute_area / tech.pe_area + 1e-9));
  const double window =
      reuse_window > 0 ? reuse_window : std::floor(std::sqrt(static_cast<double>(out.pe_tot)));
  out.cycles_per_op = tech.cycle_op + comm_cycles / window;
  out.ops_per_sec = tech.freq_hz / out.cycles_per_op * static_cast<double>(out.pe_tot) * u_chip;
  return out;
}

double bw_req(double peak_ops, LinkSource src, const ModelParams& mp) {
  const int fanout = src == LinkSource::kHbm ? mp.fanout_hbm : mp.fanout_ai;
  return fanout * mp.n_operands * mp.data_width_bits * peak_ops;
}

double bw_act(double dr_gbps, int links) { return dr_gbps * 1e9 * links; }

double to_tbps(double bits_per_sec) { return bits_per_sec / 1e9 / 1024.0; }

double u_sys(double act, double req) {
  if (req <= 0) throw std::invalid_argument("required bandwidth must be positive");
  return std::min(1.0, act / req);
}

double system_ops(int n_chiplets, double peak_ops, double u) { return peak_ops * n_chiplets * u; }

double e_comm_bit(const InterconnectSpec& ic, double trace_mm) {
  if (ic.three_d()) return 0.5 * (ic.e_bit_min + ic.e_bit_max);
  if (trace_mm < ic.trace_lo || trace_mm > ic.trace_hi)
    throw TraceOutOfRange("trace length " + std::to_string(trace_mm) + " mm outside " +
                          std::string(to_string(ic.name)) + " range");
  const double span = ic.trace_hi - ic.trace_lo;
  const double t = span > 0 ? (trace_mm - ic.trace_lo) / span : 0.0;
  return ic.e_bit_min + t * (ic.e_bit_max - ic.e_bit_min);
}

double bits_per_op(const ModelParams& mp) {
  return mp.n_operands * mp.data_width_bits / mp.reuse_factor;
}

double energy_per_op(double e_comm_bit_pj, double bits, const TechNode& tech) {
  if (bits < 0) throw std::invalid_argument("bits per op must be >= 0");
  return e_comm_bit_pj * bits + tech.e_mac;
}

std::vector<LinkClass> active_link_classes(const DesignPoint& dp, const MeshLayout& lay) {
  std::vector<LinkClass> out;
  if (lay.footprints > 1)
    out.push_back({LinkKind::kAiAi2p5D, dp.ic_2p5d_ai, double(dp.dr_2p5d_ai), dp.links_2p5d_ai,
                   double(dp.trace_2p5d_ai)});
  if (lay.tiers == 2)
    out.push_back({LinkKind::kAiAi3D, dp.ic_3d, double(dp.dr_3d), dp.links_3d, 0.0});
  if (dp.hbm_placement.count_2p5d() > 0)
    out.push_back({LinkKind::kHbmAi2p5D, dp.ic_2p5d_hbm, double(dp.dr_2p5d_hbm),
                   dp.links_2p5d_hbm, double(dp.trace_2p5d_hbm)});
  if (dp.arch_type == ArchType::kMemOnLogic && dp.hbm_placement.has(HbmSite::kStacked))
    out.push_back({LinkKind::kHbmAi3D, dp.ic_3d, double(dp.dr_3d), dp.links_3d, 0.0});
  return out;
}

double packaging_cost(const DesignPoint& dp, const MeshLayout& lay,
                      const PackagingCostCoeffs& coeffs, double pkg_area) {
  if (pkg_area <= 0) throw std::invalid_argument("package area must be positive");
  const auto classes = active_link_classes(dp, lay);
  const double share = pkg_area / static_cast<double>(classes.size());
  double cost = 0.0;
  for (const auto& lc : classes) {
    const auto& k = coeffs.at(lc.ic);
    cost += k.mu0 * share + k.mu1 * lc.links + k.mu2;
  }
  return cost / std::pow(coeffs.bond_yield, lay.footprints);
}

double reward(double throughput_ops, double pkg_cost, double energy_pj, const RewardWeights& w) {
  const double t = throughput_ops / (w.t_ref_tops * 1e12);
  return w.alpha * t - w.beta * (pkg_cost / w.c_ref) - w.gamma * (energy_pj / w.e_ref_pj);
}

namespace {

bool is_hbm(LinkKind k) { return k == LinkKind::kHbmAi2p5D || k == LinkKind::kHbmAi3D; }

PpacResult infeasible(PpacResult r, const Calibration& cal) {
  r.feasible = false;
  r.reward = cal.model.penalty;
  return r;
}

}  // namespace

PpacResult evaluate(const DesignPoint& dp, const Calibration& cal) {
  PpacResult r;
  r.u_chip = cal.model.u_chip;
  const FeasibilityReport fr = feasible(dp, cal.package);
  r.area_per_chiplet = fr.area_per_chiplet;
  r.reasons = fr.reasons;
  if (!fr.feasible) return infeasible(std::move(r), cal);

  const MeshLayout lay = layout(dp);
  const auto& tp = cal.tables.timing;
  const auto& mesh_ic = cal.tables.at(dp.ic_2p5d_ai);
  r.H_ai_ai = hops_ai_ai(lay);
  r.H_hbm_ai = hops_hbm_ai(lay);
  r.L_ai_ai = link_latency_ps(r.H_ai_ai, mesh_ic, tp);
  if (lay.tiers == 2) {
    // down and up through the two stacks at either end of the path
    const auto& v = cal.tables.at(dp.ic_3d);
    r.L_ai_ai += 2 * (v.t_w_ps + tp.t_r_ps);
  }
  r.L_hbm_ai = link_latency_ps(r.H_hbm_ai, mesh_ic, tp);

  const auto& mp = cal.model;
  const double comm_ps = (mp.fanout_hbm * r.L_hbm_ai + mp.fanout_ai * r.L_ai_ai) /
                         static_cast<double>(mp.fanout_hbm + mp.fanout_ai);
  const double comm_cycles = comm_ps * 1e-12 * cal.tech.freq_hz;

  ChipletCompute cc;
  try {
    cc = chiplet_peak_ops(r.area_per_chiplet, cal.package, cal.tech, mp.u_chip, lay.tiers,
                          comm_cycles, mp.reuse_window);
  } catch (const ZeroPEs& e) {
    r.reasons.emplace_back(e.what());
    return infeasible(std::move(r), cal);
  }
  r.pe_per_chiplet = cc.pe_tot;
  r.cycles_per_op = cc.cycles_per_op;
  r.ops_per_sec_chiplet = cc.ops_per_sec;
  r.bw_req_hbm = bw_req(cc.ops_per_sec, LinkSource::kHbm, mp);
  r.bw_req_ai = bw_req(cc.ops_per_sec, LinkSource::kAi, mp);

  double u = 1.0;
  double e_weighted = 0.0, weight = 0.0;
  r.bw_act_hbm = std::numeric_limits<double>::infinity();
  for (const auto& lc : active_link_classes(dp, lay)) {
    const double act = bw_act(lc.dr_gbps, lc.links);
    const bool hbm = is_hbm(lc.kind);
    const double req = hbm ? r.bw_req_hbm : r.bw_req_ai;
    if (req > 0) u = std::min(u, u_sys(act, req));
    if (hbm) r.bw_act_hbm = std::min(r.bw_act_hbm, act);
    if (lc.kind == LinkKind::kAiAi2p5D) r.bw_act_ai_2p5d = act;
    if (lc.kind == LinkKind::kAiAi3D) r.bw_act_ai_3d = act;
    const double w = hbm ? mp.fanout_hbm : mp.fanout_ai;
    e_weighted += w * e_comm_bit(cal.tables.at(lc.ic), lc.trace_mm);
    weight += w;
  }
  r.u_sys = u;
  r.ops_per_sec_system = system_ops(dp.n_chiplets, cc.ops_per_sec, u);
  r.E_comm_bit = e_weighted / weight;
  r.E_op = energy_per_op(r.E_comm_bit, bits_per_op(mp), cal.tech);
  r.die_yield = die_yield(r.area_per_chiplet, cal.tech);
  r.die_cost_total = dp.n_chiplets * cal.tech.unit_price * r.area_per_chiplet / r.die_yield;
  r.pkg_cost = packaging_cost(dp, lay, cal.packaging, cal.package.pkg_area);
  r.reward = reward(r.ops_per_sec_system, r.pkg_cost, r.E_op, cal.weights);
  r.feasible = true;
  return r;
}

nlohmann::json to_json(const PpacResult& r) {
  auto finite = [](double v) { return std::isfinite(v) ? v : 0.0; };
  return {
      {"feasible", r.feasible},
      {"reasons", r.reasons},
      {"area_per_chiplet", r.area_per_chiplet},
      {"pe_per_chiplet", r.pe_per_chiplet},
      {"cycles_per_op", r.cycles_per_op},
      {"ops_per_sec_chiplet", r.ops_per_sec_chiplet},
      {"ops_per_sec_system", r.ops_per_sec_system},
      {"u_sys", r.u_sys},
      {"u_chip", r.u_chip},
      {"L_ai_ai_ps", r.L_ai_ai},
      {"L_hbm_ai_ps", r.L_hbm_ai},
      {"H_ai_ai", r.H_ai_ai},
      {"H_hbm_ai", r.H_hbm_ai},
      {"bw_req_hbm_tbps", to_tbps(r.bw_req_hbm)},
      {"bw_req_ai_tbps", to_tbps(r.bw_req_ai)},
      {"bw_act_hbm_tbps", to_tbps(finite(r.bw_act_hbm))},
      {"bw_act_ai_2p5d_tbps", to_tbps(r.bw_act_ai_2p5d)},
      {"bw_act_ai_3d_tbps", to_tbps(r.bw_act_ai_3d)},
      {"E_op_pj", r.E_op},
      {"E_comm_bit_pj", r.E_comm_bit},
      {"die_yield", r.die_yield},
      {"die_cost_total", r.die_cost_total},
      {"pkg_cost", r.pkg_cost},
      {"reward", r.reward},
  };
}

MonolithicResult monolithic_baseline(const Calibration& cal, double e_bit_on_package) {
  const auto& mono = cal.monolithic;
  MonolithicResult r;
  r.area = mono.area;
  r.yield = die_yield(mono.area, cal.tech);
  r.die_cost = cal.tech.unit_price * mono.area / r.yield;
  // one die, no inter-chiplet terms
  const ChipletCompute cc =
      chiplet_peak_ops(mono.area, cal.package, cal.tech, cal.model.u_chip, 1, 0.0, 0.0);
  r.pe_tot = cc.pe_tot;
  r.ops_per_sec = cc.ops_per_sec;
  r.e_op = energy_per_op(mono.offboard_energy_factor * e_bit_on_package, bits_per_op(cal.model),
                         cal.tech);
  const auto& k = cal.packaging.at(mono.hbm_ic);
  r.pkg_cost = (k.mu0 * cal.package.pkg_area + k.mu1 * mono.hbm_links + k.mu2) /
               cal.packaging.bond_yield;
  return r;
}

Comparison compare_to_monolithic(const PpacResult& chip, const MonolithicResult& mono,
                                 const TechNode& tech) {
  Comparison c;
  if (!chip.feasible) return c;
  c.throughput_ratio = chip.ops_per_sec_system / mono.ops_per_sec;
  c.energy_eff_ratio = mono.e_op / chip.E_op;
  const double chip_die = tech.unit_price * chip.area_per_chiplet / chip.die_yield;
  c.die_cost_ratio = mono.die_cost / chip_die;
  c.pkg_cost_ratio = chip.pkg_cost / mono.pkg_cost;
  return c;
}

}  // namespace chiplet
