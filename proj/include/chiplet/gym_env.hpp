#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>

#include "chiplet/calibration.hpp"
#include "chiplet/ppac_model.hpp"
#include "chiplet/search_space.hpp"

namespace chiplet {

inline constexpr int kObsDim = 10;
using Observation = std::array<double, kObsDim>;

// Order of the observation entries.
inline constexpr std::array<const char*, kObsDim> kObsNames = {
    "max_package_area", "max_area_per_chiplet", "current_area_per_chiplet",
    "L_ai_ai",          "L_hbm_ai",             "E_comm",
    "pkg_cost",         "throughput",           "n_chiplets",
    "arch_type"};

struct EnvConfig {
  int episode_len = 2;
  double penalty = -1000.0;
  std::uint64_t seed = 0;
  int n_chiplets_max = 128;  // 64 or 128

  void validate() const;
};

class EpisodeExhausted : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct StepResult {
  Observation obs{};
  double reward = 0.0;
  bool done = false;
  ActionVector action{};
  PpacResult ppac;
};

// Scales raw metrics into [0, 1] using bounds derived from the calibration.
class ObservationScaler {
 public:
  explicit ObservationScaler(const Calibration& cal);
  Observation neutral() const;
  Observation operator()(const DesignPoint& dp, const PpacResult& r) const;

 private:
  Calibration cal_;
  double latency_max_ = 1.0;
  double e_bit_max_ = 1.0;
  double cost_max_ = 1.0;
  double ops_max_ = 1.0;
};

// Each step is a full design proposal; only the step counter carries over.
class ChipletEnv {
 public:
  ChipletEnv(Calibration cal, SearchSpace space, EnvConfig cfg = {});

  Observation reset(std::optional<std::uint64_t> seed = std::nullopt);
  // `local` indexes the free dimensions of the search space.
  StepResult step(std::span<const int> local);

  const SearchSpace& space() const { return space_; }
  const Calibration& calibration() const { return cal_; }
  const EnvConfig& config() const { return cfg_; }
  int steps_taken() const { return step_; }
  long total_steps() const { return total_; }

  // CSV rows `step,reward,feasible,<14 action indices>`; the header is written
  // on attach. Pass nullptr to detach.
  void set_trace(std::ostream* sink);

 private:
  Calibration cal_;
  SearchSpace space_;
  EnvConfig cfg_;
  ObservationScaler scaler_;
  int step_ = 0;
  long total_ = 0;
  std::uint64_t seed_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace chiplet
