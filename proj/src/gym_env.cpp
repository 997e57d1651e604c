#include "chiplet/gym_env.hpp"

#include <algorithm>
#include <cmath>

namespace chiplet {

namespace {

double unit(double v, double hi) {
  if (!(hi > 0) || !std::isfinite(v)) return 0.0;
  return std::clamp(v / hi, 0.0, 1.0);
}

}  // namespace

void EnvConfig::validate() const {
  if (episode_len < 1) throw std::invalid_argument("episode_len must be >= 1");
  if (n_chiplets_max != 64 && n_chiplets_max != 128)
    throw std::invalid_argument("n_chiplets_max must be 64 or 128");
}

ObservationScaler::ObservationScaler(const Calibration& cal) : cal_(cal) {
  const auto& tp = cal.tables.timing;
  double t_w_2p5d = 0, t_w_3d = 0, e_max = 0, mu0 = 0, mu1 = 0, mu2 = 0;
  for (const auto& ic : cal.tables.interconnects) {
    (ic.three_d() ? t_w_3d : t_w_2p5d) = std::max(ic.three_d() ? t_w_3d : t_w_2p5d, ic.t_w_ps);
    e_max = std::max(e_max, ic.e_bit_max);
  }
  for (const auto& k : cal.packaging.by_family) {
    mu0 = std::max(mu0, k.mu0);
    mu1 = std::max(mu1, k.mu1);
    mu2 = std::max(mu2, k.mu2);
  }
  const int max_hops = 128 + 1;  // 1 x 128 line plus an outside HBM site
  latency_max_ = max_hops * (t_w_2p5d + tp.t_r_ps) + 2 * (t_w_3d + tp.t_r_ps) + tp.t_c_ps + tp.t_s_ps;
  e_bit_max_ = e_max;
  const double links_max = 10000;
  cost_max_ = (mu0 * cal.package.pkg_area + 4 * (mu1 * links_max + mu2)) /
              std::pow(cal.packaging.bond_yield, 128);
  ops_max_ = 2.0 * cal.package.pkg_area * cal.package.area_compute / cal.tech.pe_area *
             cal.tech.freq_hz / cal.tech.cycle_op * cal.model.u_chip;
}

Observation ObservationScaler::neutral() const {
  const auto& pc = cal_.package;
  Observation o{};
  o[0] = 1.0;
  o[1] = unit(pc.max_area_per_chiplet, pc.pkg_area);
  o[2] = 1.0;
  return o;
}

Observation ObservationScaler::operator()(const DesignPoint& dp, const PpacResult& r) const {
  const auto& pc = cal_.package;
  Observation o = neutral();
  o[2] = unit(r.area_per_chiplet, pc.max_area_per_chiplet);
  o[3] = unit(r.L_ai_ai, latency_max_);
  o[4] = unit(r.L_hbm_ai, latency_max_);
  o[5] = unit(r.E_comm_bit, e_bit_max_);
  o[6] = unit(r.pkg_cost, cost_max_);
  o[7] = unit(r.ops_per_sec_system, ops_max_);
  o[8] = unit(dp.n_chiplets, 128.0);
  o[9] = static_cast<double>(dp.arch_type) / 2.0;
  return o;
}

ChipletEnv::ChipletEnv(Calibration cal, SearchSpace space, EnvConfig cfg)
    : cal_(std::move(cal)), space_(std::move(space)), cfg_(cfg), scaler_(cal_) {
  cfg_.validate();
  cal_.model.penalty = cfg_.penalty;
  cal_.package.n_chiplets_max = cfg_.n_chiplets_max;
  seed_ = cfg_.seed;
}

Observation ChipletEnv::reset(std::optional<std::uint64_t> seed) {
  if (seed) seed_ = *seed;
  step_ = 0;
  return scaler_.neutral();
}

StepResult ChipletEnv::step(std::span<const int> local) {
  if (step_ >= cfg_.episode_len)
    throw EpisodeExhausted("episode finished after " + std::to_string(cfg_.episode_len) +
                           " steps; call reset()");
  StepResult s;
  s.action = space_.expand(local);
  const DesignPoint dp = decode(s.action);
  s.ppac = evaluate(dp, cal_);
  s.reward = s.ppac.reward;
  s.obs = scaler_(dp, s.ppac);
  ++step_;
  ++total_;
  s.done = step_ == cfg_.episode_len;
  if (trace_) {
    *trace_ << total_ << ',' << s.reward << ',' << (s.ppac.feasible ? 1 : 0);
    for (int a : s.action) *trace_ << ',' << a;
    *trace_ << '\n';
  }
  return s;
}

void ChipletEnv::set_trace(std::ostream* sink) {
  trace_ = sink;
  if (!trace_) return;
  *trace_ << "step,reward,feasible";
  for (const auto& p : param_specs()) *trace_ << ',' << p.name;
  *trace_ << '\n';
}

}  // namespace chiplet
