#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "chiplet/design_space.hpp"

namespace chiplet {

// One row of an optimizer trace. For SA `step` is the iteration and `value`
// the current objective; for PPO `step` is the timestep and `value` the mean
// episodic reward of the last rollout.
struct TraceRow {
  long step = 0;
  double value = 0.0;
  double best = 0.0;
};

struct OptimizerRun {
  std::string optimizer;  // "sa", "rl"
  std::uint64_t seed = 0;
  int trial = 0;
  ActionVector best_action{};
  double best_obj = 0.0;
  std::vector<TraceRow> trace;
};

// `header` is the CSV header line without newline.
void write_trace_csv(std::ostream& os, const OptimizerRun& run, const std::string& header);

}  // namespace chiplet
