#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chiplet/optimizer_run.hpp"
#include "chiplet/rng.hpp"
#include "chiplet/search_space.hpp"

namespace chiplet {

struct SAConfig {
  long t_max = 500000;
  double temperature = 200.0;
  int step_size = 10;
  std::uint64_t seed = 0;
  long trace_stride = 1;  // keep every k-th iteration in the trace

  void validate() const;
};

using Objective = std::function<double(const ActionVector&)>;

// x_i + round(u_i * step), u_i ~ U(-1, 1), clamped into [0, dims[i] - 1].
std::vector<int> neighbor(std::span<const int> x, std::span<const int> dims, int step_size,
                          Rng& rng);

// Improvement, or rand() < temperature / iteration. Always consumes one draw.
bool accept(double o_cand, double o_curr, long iteration, double temperature, Rng& rng);

// Draw order per iteration: neighbor (one uniform per dimension), then the
// acceptance draw. The initial point takes one bounded integer per dimension.
OptimizerRun run_sa(const Objective& f, const SearchSpace& space, const SAConfig& cfg);

}  // namespace chiplet
