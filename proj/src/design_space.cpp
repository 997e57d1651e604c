#include "chiplet/design_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace chiplet {

namespace {

constexpr std::array<std::string_view, 3> kArchNames = {
    "2.5D", "5.5D-mem-on-logic", "5.5D-logic-on-logic"};
constexpr std::array<std::string_view, 4> kIcNames = {"CoWoS", "EMIB", "SoIC",
                                                      "FOVEROS"};

enum P : int {
  kArch, kNChiplets, kPlacement, kIcAi, kDrAi, kLinksAi, kTraceAi,
  kIc3d, kDr3d, kLinks3d, kIcHbm, kDrHbm, kLinksHbm, kTraceHbm
};

ParamSpec categorical(std::string name, std::vector<std::string> labels) {
  ParamSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::kCategorical;
  s.labels = std::move(labels);
  return s;
}

ParamSpec range(std::string name, int lo, int hi, int step) {
  ParamSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::kIntegerRange;
  s.lo = lo;
  s.hi = hi;
  s.step = step;
  return s;
}

int ic_2p5d_index(Interconnect ic) { return ic == Interconnect::kEMIB ? 1 : 0; }
int ic_3d_index(Interconnect ic) { return ic == Interconnect::kFOVEROS ? 1 : 0; }

}  // namespace

std::string_view to_string(ArchType a) { return kArchNames[static_cast<int>(a)]; }
std::string_view to_string(Interconnect ic) { return kIcNames[static_cast<int>(ic)]; }

ArchType arch_from_string(std::string_view s) {
  for (int i = 0; i < 3; ++i)
    if (kArchNames[i] == s) return static_cast<ArchType>(i);
  throw std::invalid_argument("unknown arch_type '" + std::string(s) + "'");
}

Interconnect interconnect_from_string(std::string_view s) {
  for (int i = 0; i < 4; ++i)
    if (kIcNames[i] == s) return static_cast<Interconnect>(i);
  throw std::invalid_argument("unknown interconnect '" + std::string(s) + "'");
}

bool is_3d(Interconnect ic) {
  return ic == Interconnect::kSoIC || ic == Interconnect::kFOVEROS;
}

std::string_view to_string(HbmSite s) {
  switch (s) {
    case HbmSite::kLeft: return "left";
    case HbmSite::kRight: return "right";
    case HbmSite::kTop: return "top";
    case HbmSite::kBottom: return "bottom";
    case HbmSite::kMiddle: return "middle";
    case HbmSite::kStacked: return "stacked";
  }
  return "?";
}

HbmPlacement::HbmPlacement(int code) : code_(code) {
  if (code < 1 || code > 63)
    throw std::invalid_argument("hbm_placement code must be in 1..63, got " +
                                std::to_string(code));
}

int HbmPlacement::count() const { return std::popcount(static_cast<unsigned>(code_)); }

std::vector<std::string> HbmPlacement::names() const {
  std::vector<std::string> out;
  for (HbmSite s : kAllHbmSites)
    if (has(s)) out.emplace_back(to_string(s));
  return out;
}

HbmPlacement HbmPlacement::from_names(const std::vector<std::string>& names) {
  int code = 0;
  for (const auto& n : names) {
    bool found = false;
    for (HbmSite s : kAllHbmSites) {
      if (to_string(s) == n) {
        code |= static_cast<int>(s);
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("unknown HBM site '" + n + "'");
  }
  return HbmPlacement(code);
}

int ParamSpec::cardinality() const {
  if (kind == ParamKind::kCategorical) return static_cast<int>(labels.size());
  return (hi - lo) / step + 1;
}

const std::array<ParamSpec, kNumParams>& param_specs() {
  static const std::array<ParamSpec, kNumParams> specs = [] {
    std::vector<std::string> placements;
    for (int code = 1; code <= 63; ++code) placements.push_back(std::to_string(code));
    return std::array<ParamSpec, kNumParams>{
        categorical("arch_type", {std::string(kArchNames[0]), std::string(kArchNames[1]),
                                  std::string(kArchNames[2])}),
        range("n_chiplets", 1, 128, 1),
        categorical("hbm_placement", placements),
        categorical("ic_2p5d_ai", {"CoWoS", "EMIB"}),
        range("dr_2p5d_ai", 1, 20, 1),
        range("links_2p5d_ai", 50, 5000, 50),
        range("trace_2p5d_ai", 1, 10, 1),
        categorical("ic_3d", {"SoIC", "FOVEROS"}),
        range("dr_3d", 20, 50, 1),
        range("links_3d", 100, 10000, 100),
        categorical("ic_2p5d_hbm", {"CoWoS", "EMIB"}),
        range("dr_2p5d_hbm", 1, 20, 1),
        range("links_2p5d_hbm", 50, 5000, 50),
        range("trace_2p5d_hbm", 1, 10, 1),
    };
  }();
  return specs;
}

std::array<int, kNumParams> cardinalities() {
  std::array<int, kNumParams> out{};
  for (int i = 0; i < kNumParams; ++i) out[i] = param_specs()[i].cardinality();
  return out;
}

int param_index(std::string_view name) {
  for (int i = 0; i < kNumParams; ++i)
    if (param_specs()[i].name == name) return i;
  throw std::invalid_argument("unknown design parameter '" + std::string(name) + "'");
}

IndexOutOfRange::IndexOutOfRange(std::string param, int index, int cardinality)
    : std::out_of_range("index " + std::to_string(index) + " out of range for '" + param +
                        "' (cardinality " + std::to_string(cardinality) + ")"),
      param_(std::move(param)) {}

DesignPoint decode(std::span<const int> action) {
  if (action.size() != kNumParams)
    throw IndexOutOfRange("<arity>", static_cast<int>(action.size()), kNumParams);
  const auto& specs = param_specs();
  for (int i = 0; i < kNumParams; ++i) {
    const int card = specs[i].cardinality();
    if (action[i] < 0 || action[i] >= card)
      throw IndexOutOfRange(specs[i].name, action[i], card);
  }
  auto val = [&](int p) { return specs[p].lo + action[p] * specs[p].step; };
  DesignPoint dp;
  dp.arch_type = static_cast<ArchType>(action[kArch]);
  dp.n_chiplets = val(kNChiplets);
  dp.hbm_placement = HbmPlacement(action[kPlacement] + 1);
  dp.ic_2p5d_ai = action[kIcAi] ? Interconnect::kEMIB : Interconnect::kCoWoS;
  dp.dr_2p5d_ai = val(kDrAi);
  dp.links_2p5d_ai = val(kLinksAi);
  dp.trace_2p5d_ai = val(kTraceAi);
  dp.ic_3d = action[kIc3d] ? Interconnect::kFOVEROS : Interconnect::kSoIC;
  dp.dr_3d = val(kDr3d);
  dp.links_3d = val(kLinks3d);
  dp.ic_2p5d_hbm = action[kIcHbm] ? Interconnect::kEMIB : Interconnect::kCoWoS;
  dp.dr_2p5d_hbm = val(kDrHbm);
  dp.links_2p5d_hbm = val(kLinksHbm);
  dp.trace_2p5d_hbm = val(kTraceHbm);
  return dp;
}

ActionVector encode(const DesignPoint& dp) {
  const auto& specs = param_specs();
  auto idx = [&](int p, int value) {
    const auto& s = specs[p];
    if (value < s.lo || value > s.hi || (value - s.lo) % s.step != 0)
      throw std::invalid_argument("value " + std::to_string(value) +
                                  " not admissible for '" + s.name + "'");
    return (value - s.lo) / s.step;
  };
  if (is_3d(dp.ic_2p5d_ai) || is_3d(dp.ic_2p5d_hbm) || !is_3d(dp.ic_3d))
    throw std::invalid_argument("interconnect family mismatch in design point");
  return ActionVector{
      static_cast<int>(dp.arch_type),
      idx(kNChiplets, dp.n_chiplets),
      dp.hbm_placement.code() - 1,
      ic_2p5d_index(dp.ic_2p5d_ai),
      idx(kDrAi, dp.dr_2p5d_ai),
      idx(kLinksAi, dp.links_2p5d_ai),
      idx(kTraceAi, dp.trace_2p5d_ai),
      ic_3d_index(dp.ic_3d),
      idx(kDr3d, dp.dr_3d),
      idx(kLinks3d, dp.links_3d),
      ic_2p5d_index(dp.ic_2p5d_hbm),
      idx(kDrHbm, dp.dr_2p5d_hbm),
      idx(kLinksHbm, dp.links_2p5d_hbm),
      idx(kTraceHbm, dp.trace_2p5d_hbm),
  };
}

nlohmann::json param_value(int p, int idx) {
  const auto& s = param_specs().at(p);
  if (idx < 0 || idx >= s.cardinality()) throw IndexOutOfRange(s.name, idx, s.cardinality());
  if (p == kPlacement) return HbmPlacement(idx + 1).names();
  if (s.kind == ParamKind::kCategorical) return s.labels[idx];
  return s.lo + idx * s.step;
}

int param_index_of(int p, const nlohmann::json& value) {
  const auto& s = param_specs().at(p);
  if (p == kPlacement) {
    if (value.is_number_integer()) return HbmPlacement(value.get<int>()).code() - 1;
    if (value.is_array()) return HbmPlacement::from_names(value.get<std::vector<std::string>>()).code() - 1;
    throw std::invalid_argument("hbm_placement must be a list of site names or a code");
  }
  if (s.kind == ParamKind::kCategorical) {
    if (!value.is_string()) throw std::invalid_argument("'" + s.name + "' must be a string");
    const auto v = value.get<std::string>();
    auto it = std::find(s.labels.begin(), s.labels.end(), v);
    if (it == s.labels.end())
      throw std::invalid_argument("'" + v + "' is not admissible for '" + s.name + "'");
    return static_cast<int>(it - s.labels.begin());
  }
  if (!value.is_number_integer())
    throw std::invalid_argument("'" + s.name + "' must be an integer");
  const int v = value.get<int>();
  if (v < s.lo || v > s.hi || (v - s.lo) % s.step != 0)
    throw std::invalid_argument("value " + std::to_string(v) + " not admissible for '" +
                                s.name + "'");
  return (v - s.lo) / s.step;
}

std::pair<int, int> near_square_factors(int f) {
  if (f < 1) throw std::invalid_argument("footprint count must be positive");
  int m = static_cast<int>(std::sqrt(static_cast<double>(f)));
  while ((m + 1) * (m + 1) <= f) ++m;
  while (m * m > f) --m;
  while (f % m != 0) --m;
  return {m, f / m};
}

MeshLayout layout(const DesignPoint& dp) {
  MeshLayout lay;
  const bool two_tier = dp.arch_type == ArchType::kLogicOnLogic;
  lay.tiers = two_tier ? 2 : 1;
  lay.footprints = two_tier ? (dp.n_chiplets + 1) / 2 : dp.n_chiplets;
  lay.unpaired_dies = two_tier ? dp.n_chiplets % 2 : 0;
  std::tie(lay.m, lay.n) = near_square_factors(lay.footprints);

  const int m = lay.m, n = lay.n;
  for (HbmSite s : kAllHbmSites) {
    if (!dp.hbm_placement.has(s)) continue;
    GridCoord at;
    switch (s) {
      case HbmSite::kLeft: at = {(m - 1) / 2, -1}; break;
      case HbmSite::kRight: at = {m / 2, n}; break;  // ceil((m-1)/2)
      case HbmSite::kTop: at = {-1, (n - 1) / 2}; break;
      case HbmSite::kBottom: at = {m, n / 2}; break;
      case HbmSite::kMiddle: at = {(m - 1) / 2, (n - 1) / 2}; break;
      case HbmSite::kStacked: at = {0, 0}; break;
    }
    lay.hbm_sites.push_back({s, at});
  }
  return lay;
}

void PackageConstraints::validate() const {
  if (std::abs(area_compute + area_sram + area_other - 1.0) > 1e-9)
    throw std::invalid_argument("area split must sum to 1");
  if (max_area_per_chiplet > pkg_area)
    throw std::invalid_argument("max_area_per_chiplet exceeds pkg_area");
  if (pkg_area <= 0 || chiplet_spacing < 0 || tsv_reserve < 0 || hbm_footprint < 0)
    throw std::invalid_argument("package constraints must be non-negative");
  if (n_chiplets_max != 64 && n_chiplets_max != 128)
    throw std::invalid_argument("n_chiplets_max must be 64 or 128");
}

double area_per_chiplet(const DesignPoint& dp, const MeshLayout& lay,
                        const PackageConstraints& pc) {
  const double spacing = pc.chiplet_spacing * (lay.m + lay.n + 2);
  const double hbm = dp.hbm_placement.count_2p5d() * pc.hbm_footprint;
  return (pc.pkg_area - spacing - hbm) / lay.footprints;
}

FeasibilityReport feasible(const DesignPoint& dp, const PackageConstraints& pc) {
  FeasibilityReport r;
  const MeshLayout lay = layout(dp);
  r.area_per_chiplet = area_per_chiplet(dp, lay, pc);
  auto fail = [&](std::string why) {
    r.feasible = false;
    r.reasons.push_back(std::move(why));
  };
  if (r.area_per_chiplet <= 0.0) fail("no area left for AI chiplets");
  if (r.area_per_chiplet > pc.max_area_per_chiplet) fail("area per chiplet exceeds cap");
  if (lay.tiers == 2 && r.area_per_chiplet <= pc.tsv_reserve)
    fail("area per chiplet does not exceed the TSV reserve");
  if (dp.hbm_placement.has(HbmSite::kStacked) && dp.arch_type != ArchType::kMemOnLogic)
    fail("stacked HBM requires the memory-on-logic architecture");
  if (dp.n_chiplets > pc.n_chiplets_max) fail("n_chiplets exceeds the case cap");

  const bool uses_3d = dp.arch_type == ArchType::kLogicOnLogic ||
                       (dp.arch_type == ArchType::kMemOnLogic &&
                        dp.hbm_placement.has(HbmSite::kStacked));
  if (!uses_3d)
    for (const char* p : {"ic_3d", "dr_3d", "links_3d"}) r.ignored.emplace_back(p);
  if (lay.footprints == 1)
    for (const char* p : {"ic_2p5d_ai", "dr_2p5d_ai", "links_2p5d_ai", "trace_2p5d_ai"})
      r.ignored.emplace_back(p);
  if (dp.hbm_placement.count_2p5d() == 0)
    for (const char* p : {"ic_2p5d_hbm", "dr_2p5d_hbm", "links_2p5d_hbm", "trace_2p5d_hbm"})
      r.ignored.emplace_back(p);
  return r;
}

nlohmann::json to_json(const DesignPoint& dp) {
  const ActionVector a = encode(dp);
  nlohmann::json j = nlohmann::json::object();
  for (int p = 0; p < kNumParams; ++p) j[param_specs()[p].name] = param_value(p, a[p]);
  return j;
}

DesignPoint design_point_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("design point must be a JSON object");
  for (const auto& [key, _] : j.items()) param_index(key);  // rejects unknown keys
  ActionVector a{};
  for (int p = 0; p < kNumParams; ++p) {
    const auto& name = param_specs()[p].name;
    if (!j.contains(name)) throw std::invalid_argument("missing design parameter '" + name + "'");
    try {
      a[p] = param_index_of(p, j.at(name));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(name + ": " + e.what());
    }
  }
  return decode(a);
}

DesignPoint reference_case_i() {
  DesignPoint dp;
  dp.arch_type = ArchType::kLogicOnLogic;
  dp.n_chiplets = 60;
  dp.hbm_placement = HbmPlacement::from_names({"top", "right", "bottom", "middle"});
  dp.ic_2p5d_ai = Interconnect::kEMIB;
  dp.dr_2p5d_ai = 20;
  dp.links_2p5d_ai = 3100;
  dp.trace_2p5d_ai = 1;
  dp.ic_3d = Interconnect::kSoIC;
  dp.dr_3d = 42;
  dp.links_3d = 3200;
  dp.ic_2p5d_hbm = Interconnect::kEMIB;
  dp.dr_2p5d_hbm = 20;
  dp.links_2p5d_hbm = 4900;
  dp.trace_2p5d_hbm = 1;
  return dp;
}

DesignPoint reference_case_ii() {
  DesignPoint dp = reference_case_i();
  dp.n_chiplets = 112;
  dp.hbm_placement = HbmPlacement::from_names({"left", "right", "bottom", "middle"});
  dp.links_2p5d_ai = 1450;
  dp.ic_3d = Interconnect::kFOVEROS;
  dp.dr_3d = 34;
  dp.links_3d = 4400;
  dp.links_2p5d_hbm = 3850;
  return dp;
}

}  // namespace chiplet
