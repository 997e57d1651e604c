#include "chiplet/calibration.hpp"

#include <set>
#include <stdexcept>

namespace chiplet {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 4> kCostClassNames = {"low", "medium", "high", "highest"};

CostClass cost_class_from_string(const std::string& s) {
  for (int i = 0; i < 4; ++i)
    if (s == kCostClassNames[i]) return static_cast<CostClass>(i);
  throw std::invalid_argument("unknown implementation cost class '" + s + "'");
}

// Reads known keys of one JSON object into fields; anything left over is an error.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(path_ + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw std::invalid_argument(path_ + "." + key + ": unknown field");
  }

  void num(const char* key, double& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw std::invalid_argument(field(key) + ": expected a number");
    out = v.get<double>();
  }
  void integer(const char* key, int& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw std::invalid_argument(field(key) + ": expected an integer");
    out = v.get<int>();
  }
  void str(const char* key, std::string& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw std::invalid_argument(field(key) + ": expected a string");
    out = v.get<std::string>();
  }
  const json* object(const std::string& key) {
    if (!take(key)) return nullptr;
    return &j_.at(key);
  }
  std::string field(const std::string& key) const { return path_ + "." + key; }

 private:
  bool take(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void TechNode::validate() const {
  check(defect_density >= 0, "tech.defect_density must be >= 0");
  check(cluster_alpha > 0, "tech.cluster_alpha must be > 0");
  check(pe_area > 0, "tech.pe_area must be > 0");
  check(freq_hz > 0, "tech.freq_hz must be > 0");
  check(cycle_op > 0, "tech.cycle_op must be > 0");
  check(unit_price >= 0 && e_mac >= 0, "tech.unit_price and tech.e_mac must be >= 0");
}

void Calibration::validate() const {
  package.validate();
  tech.validate();
  for (const auto& ic : tables.interconnects) {
    check(ic.e_bit_min <= ic.e_bit_max, "interconnect e_bit_min exceeds e_bit_max");
    check(ic.e_bit_min >= 0 && ic.t_w_ps >= 0, "interconnect energy/delay must be >= 0");
    check(ic.trace_lo <= ic.trace_hi, "interconnect trace range is empty");
  }
  check(tables.timing.t_r_ps >= 0 && tables.timing.t_c_ps >= 0 && tables.timing.t_s_ps >= 0,
        "timing delays must be >= 0");
  for (const auto& c : packaging.by_family)
    check(c.mu0 >= 0 && c.mu1 >= 0 && c.mu2 >= 0, "packaging coefficients must be >= 0");
  check(packaging.bond_yield > 0 && packaging.bond_yield <= 1,
        "packaging.bond_yield must be in (0, 1]");
  check(weights.alpha > 0 && weights.beta > 0 && weights.gamma > 0, "reward weights must be > 0");
  check(weights.t_ref_tops > 0 && weights.c_ref > 0 && weights.e_ref_pj > 0,
        "reward reference scales must be > 0");
  check(model.u_chip >= 0 && model.u_chip <= 1, "model.u_chip must be in [0, 1]");
  check(model.n_operands > 0 && model.data_width_bits > 0, "operand count/width must be > 0");
  check(model.reuse_factor > 0 && model.reuse_window >= 0, "reuse parameters must be positive");
  check(monolithic.area > 0, "monolithic.area must be > 0");
  check(!is_3d(monolithic.hbm_ic), "monolithic.hbm_ic must be a 2.5D interconnect");
}

Calibration default_calibration() {
  Calibration c;
  auto& ics = c.tables.interconnects;
  // Energy ranges per interconnect, per-hop wire delay per packaging family.
  ics[0] = {Interconnect::kCoWoS, 0.20, 0.50, 17.2, 1.0, 10.0, CostClass::kMedium};
  ics[1] = {Interconnect::kEMIB, 0.17, 0.70, 17.2, 1.0, 10.0, CostClass::kLow};
  ics[2] = {Interconnect::kSoIC, 0.10, 0.20, 1.6, 0.0, 0.0, CostClass::kHigh};
  ics[3] = {Interconnect::kFOVEROS, 0.05, 0.05, 1.6, 0.0, 0.0, CostClass::kHighest};

  // Ordered by implementation cost class; magnitudes are calibration inputs.
  auto& pk = c.packaging.by_family;
  pk[0] = {0.03, 0.003, 15.0};
  pk[1] = {0.01, 0.002, 10.0};
  pk[2] = {0.015, 0.001, 22.0};
  pk[3] = {0.02, 0.0015, 30.0};
  return c;
}

Calibration calibration_from_json(const json& j) {
  Calibration c = default_calibration();
  {
    Section root(j, "calibration");
    if (const json* p = root.object("package")) {
      Section s(*p, "package");
      auto& pc = c.package;
      s.num("pkg_area", pc.pkg_area);
      s.num("chiplet_spacing", pc.chiplet_spacing);
      s.num("max_area_per_chiplet", pc.max_area_per_chiplet);
      s.num("area_compute", pc.area_compute);
      s.num("area_sram", pc.area_sram);
      s.num("area_other", pc.area_other);
      s.num("tsv_reserve", pc.tsv_reserve);
      s.num("hbm_footprint", pc.hbm_footprint);
      s.integer("n_chiplets_max", pc.n_chiplets_max);
    }
    if (const json* p = root.object("tech")) {
      Section s(*p, "tech");
      auto& t = c.tech;
      s.str("name", t.name);
      s.num("defect_density", t.defect_density);
      s.num("cluster_alpha", t.cluster_alpha);
      s.num("unit_price", t.unit_price);
      s.num("pe_area", t.pe_area);
      s.num("e_mac", t.e_mac);
      s.num("cycle_op", t.cycle_op);
      s.num("freq_hz", t.freq_hz);
    }
    if (const json* p = root.object("interconnects")) {
      Section s(*p, "interconnects");
      for (auto& ic : c.tables.interconnects) {
        const std::string name(to_string(ic.name));
        if (const json* q = s.object(name)) {
          Section e(*q, "interconnects." + name);
          e.num("e_bit_min", ic.e_bit_min);
          e.num("e_bit_max", ic.e_bit_max);
          e.num("t_w_ps", ic.t_w_ps);
          e.num("trace_lo", ic.trace_lo);
          e.num("trace_hi", ic.trace_hi);
          std::string cls(kCostClassNames[static_cast<int>(ic.impl_cost_class)]);
          e.str("impl_cost_class", cls);
          ic.impl_cost_class = cost_class_from_string(cls);
        }
      }
    }
    if (const json* p = root.object("timing")) {
      Section s(*p, "timing");
      s.num("t_r_ps", c.tables.timing.t_r_ps);
      s.num("t_c_ps", c.tables.timing.t_c_ps);
      s.num("t_s_ps", c.tables.timing.t_s_ps);
    }
    if (const json* p = root.object("packaging")) {
      Section s(*p, "packaging");
      s.num("bond_yield", c.packaging.bond_yield);
      for (int i = 0; i < 4; ++i) {
        const std::string name(to_string(static_cast<Interconnect>(i)));
        if (const json* q = s.object(name)) {
          Section e(*q, "packaging." + name);
          e.num("mu0", c.packaging.by_family[i].mu0);
          e.num("mu1", c.packaging.by_family[i].mu1);
          e.num("mu2", c.packaging.by_family[i].mu2);
        }
      }
    }
    if (const json* p = root.object("reward")) {
      Section s(*p, "reward");
      auto& w = c.weights;
      s.num("alpha", w.alpha);
      s.num("beta", w.beta);
      s.num("gamma", w.gamma);
      s.num("t_ref_tops", w.t_ref_tops);
      s.num("c_ref", w.c_ref);
      s.num("e_ref_pj", w.e_ref_pj);
    }
    if (const json* p = root.object("model")) {
      Section s(*p, "model");
      auto& m = c.model;
      s.num("u_chip", m.u_chip);
      s.integer("n_operands", m.n_operands);
      s.integer("data_width_bits", m.data_width_bits);
      s.num("reuse_factor", m.reuse_factor);
      s.num("reuse_window", m.reuse_window);
      s.integer("fanout_hbm", m.fanout_hbm);
      s.integer("fanout_ai", m.fanout_ai);
      s.num("penalty", m.penalty);
    }
    if (const json* p = root.object("monolithic")) {
      Section s(*p, "monolithic");
      auto& m = c.monolithic;
      s.num("area", m.area);
      std::string ic(to_string(m.hbm_ic));
      s.str("hbm_ic", ic);
      m.hbm_ic = interconnect_from_string(ic);
      s.integer("hbm_links", m.hbm_links);
      s.num("offboard_energy_factor", m.offboard_energy_factor);
    }
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const Calibration& c) {
  json j;
  const auto& pc = c.package;
  j["package"] = {{"pkg_area", pc.pkg_area},
                  {"chiplet_spacing", pc.chiplet_spacing},
                  {"max_area_per_chiplet", pc.max_area_per_chiplet},
                  {"area_compute", pc.area_compute},
                  {"area_sram", pc.area_sram},
                  {"area_other", pc.area_other},
                  {"tsv_reserve", pc.tsv_reserve},
                  {"hbm_footprint", pc.hbm_footprint},
                  {"n_chiplets_max", pc.n_chiplets_max}};
  const auto& t = c.tech;
  j["tech"] = {{"name", t.name},         {"defect_density", t.defect_density},
               {"cluster_alpha", t.cluster_alpha}, {"unit_price", t.unit_price},
               {"pe_area", t.pe_area},   {"e_mac", t.e_mac},
               {"cycle_op", t.cycle_op}, {"freq_hz", t.freq_hz}};
  for (const auto& ic : c.tables.interconnects) {
    j["interconnects"][std::string(to_string(ic.name))] = {
        {"e_bit_min", ic.e_bit_min},
        {"e_bit_max", ic.e_bit_max},
        {"t_w_ps", ic.t_w_ps},
        {"trace_lo", ic.trace_lo},
        {"trace_hi", ic.trace_hi},
        {"impl_cost_class", kCostClassNames[static_cast<int>(ic.impl_cost_class)]}};
  }
  j["timing"] = {{"t_r_ps", c.tables.timing.t_r_ps},
                 {"t_c_ps", c.tables.timing.t_c_ps},
                 {"t_s_ps", c.tables.timing.t_s_ps}};
  j["packaging"]["bond_yield"] = c.packaging.bond_yield;
  for (int i = 0; i < 4; ++i) {
    const auto& k = c.packaging.by_family[i];
    j["packaging"][std::string(to_string(static_cast<Interconnect>(i)))] = {
        {"mu0", k.mu0}, {"mu1", k.mu1}, {"mu2", k.mu2}};
  }
  const auto& w = c.weights;
  j["reward"] = {{"alpha", w.alpha}, {"beta", w.beta},   {"gamma", w.gamma},
                 {"t_ref_tops", w.t_ref_tops}, {"c_ref", w.c_ref}, {"e_ref_pj", w.e_ref_pj}};
  const auto& m = c.model;
  j["model"] = {{"u_chip", m.u_chip},           {"n_operands", m.n_operands},
                {"data_width_bits", m.data_width_bits}, {"reuse_factor", m.reuse_factor},
                {"reuse_window", m.reuse_window}, {"fanout_hbm", m.fanout_hbm},
                {"fanout_ai", m.fanout_ai},     {"penalty", m.penalty}};
  j["monolithic"] = {{"area", c.monolithic.area},
                     {"hbm_ic", std::string(to_string(c.monolithic.hbm_ic))},
                     {"hbm_links", c.monolithic.hbm_links},
                     {"offboard_energy_factor", c.monolithic.offboard_energy_factor}};
  return j;
}

}  // namespace chiplet
