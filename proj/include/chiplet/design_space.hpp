#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace chiplet {

inline constexpr int kNumParams = 14;

using ActionVector = std::array<int, kNumParams>;

enum class ArchType : int { k2p5D = 0, kMemOnLogic = 1, kLogicOnLogic = 2 };

enum class Interconnect : int { kCoWoS = 0, kEMIB = 1, kSoIC = 2, kFOVEROS = 3 };

std::string_view to_string(ArchType a);
std::string_view to_string(Interconnect ic);
ArchType arch_from_string(std::string_view s);
Interconnect interconnect_from_string(std::string_view s);
bool is_3d(Interconnect ic);

// Six attachment sites for HBM chiplets, one bit each. Codes 1..63 are valid.
enum class HbmSite : std::uint8_t {
  kLeft = 1, kRight = 2, kTop = 4, kBottom = 8, kMiddle = 16, kStacked = 32
};

inline constexpr std::array<HbmSite, 6> kAllHbmSites = {
    HbmSite::kLeft, HbmSite::kRight,  HbmSite::kTop,
    HbmSite::kBottom, HbmSite::kMiddle, HbmSite::kStacked};

std::string_view to_string(HbmSite s);

class HbmPlacement {
 public:
  constexpr HbmPlacement() = default;
  explicit HbmPlacement(int code);

  int code() const { return code_; }
  bool has(HbmSite s) const { return (code_ & static_cast<int>(s)) != 0; }
  int count() const;
  // HBMs attached through a 2.5D interface (sides and middle).
  int count_2p5d() const { return count() - (has(HbmSite::kStacked) ? 1 : 0); }
  bool stacked_only() const { return code_ == static_cast<int>(HbmSite::kStacked); }
  std::vector<std::string> names() const;

  static HbmPlacement from_names(const std::vector<std::string>& names);

  friend bool operator==(const HbmPlacement&, const HbmPlacement&) = default;

 private:
  int code_ = 1;
};

struct DesignPoint {
  ArchType arch_type = ArchType::k2p5D;
  int n_chiplets = 1;
  HbmPlacement hbm_placement{};
  Interconnect ic_2p5d_ai = Interconnect::kCoWoS;
  int dr_2p5d_ai = 1;        // Gbps
  int links_2p5d_ai = 50;
  int trace_2p5d_ai = 1;     // mm
  Interconnect ic_3d = Interconnect::kSoIC;
  int dr_3d = 20;            // Gbps
  int links_3d = 100;
  Interconnect ic_2p5d_hbm = Interconnect::kCoWoS;
  int dr_2p5d_hbm = 1;       // Gbps
  int links_2p5d_hbm = 50;
  int trace_2p5d_hbm = 1;    // mm

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

enum class ParamKind { kCategorical, kIntegerRange };

struct ParamSpec {
  std::string name;
  ParamKind kind;
  int lo = 0;    // integer ranges only
  int hi = 0;
  int step = 1;
  std::vector<std::string> labels;  // categorical only

  int cardinality() const;
};

// The 14 parameters in canonical order.
const std::array<ParamSpec, kNumParams>& param_specs();
std::array<int, kNumParams> cardinalities();
int param_index(std::string_view name);

class IndexOutOfRange : public std::out_of_range {
 public:
  IndexOutOfRange(std::string param, int index, int cardinality);
  const std::string& param() const { return param_; }

 private:
  std::string param_;
};

DesignPoint decode(std::span<const int> action);
ActionVector encode(const DesignPoint& dp);

// Value of parameter `p` at index `idx`, as it appears in JSON.
nlohmann::json param_value(int p, int idx);
// Inverse of param_value; throws std::invalid_argument for inadmissible values.
int param_index_of(int p, const nlohmann::json& value);

struct GridCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

struct HbmAttachment {
  HbmSite site;
  GridCoord at;  // side sites lie one hop outside the mesh
};

struct MeshLayout {
  int m = 1;  // rows, m <= n
  int n = 1;  // cols
  int footprints = 1;
  int tiers = 1;
  int unpaired_dies = 0;  // odd die count on a 2-tier stack
  std::vector<HbmAttachment> hbm_sites;
};

// Factor pair (m, n) of f with m <= n and minimal n - m.
std::pair<int, int> near_square_factors(int f);
MeshLayout layout(const DesignPoint& dp);

struct PackageConstraints {
  double pkg_area = 900.0;            // mm^2
  double chiplet_spacing = 1.0;       // mm
  double max_area_per_chiplet = 400.0;
  double area_compute = 0.40;
  double area_sram = 0.40;
  double area_other = 0.20;
  double tsv_reserve = 2.0;           // mm^2 per die in 2-tier stacks
  double hbm_footprint = 26.0;        // mm^2 per 2.5D-attached HBM
  int n_chiplets_max = 128;

  void validate() const;
};

struct FeasibilityReport {
  bool feasible = true;
  double area_per_chiplet = 0.0;
  std::vector<std::string> reasons;
  std::vector<std::string> ignored;
};

double area_per_chiplet(const DesignPoint& dp, const MeshLayout& lay,
                        const PackageConstraints& pc);
FeasibilityReport feasible(const DesignPoint& dp, const PackageConstraints& pc);

// Flat JSON keyed by parameter name. hbm_placement is a list of site names;
// an integer code is accepted on input.
nlohmann::json to_json(const DesignPoint& dp);
DesignPoint design_point_from_json(const nlohmann::json& j);

// The two optimized configurations reported for alpha,beta,gamma = 1,1,0.1.
DesignPoint reference_case_i();
DesignPoint reference_case_ii();

}  // namespace chiplet
