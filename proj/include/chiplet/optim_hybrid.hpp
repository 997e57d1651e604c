#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chiplet/calibration.hpp"
#include "chiplet/optim_rl.hpp"
#include "chiplet/optim_sa.hpp"

namespace chiplet {

struct HybridConfig {
  int trial_max = 1;
  std::vector<std::uint64_t> seeds;  // one per trial; empty means 0, 1, 2, ...
  SAConfig sa;
  PPOConfig ppo;
  EnvConfig env;
  // When non-empty, the RL step of trial t samples from agents[t % size]
  // instead of training a fresh agent.
  std::vector<Policy> agents;
  long inference_actions = 4096;
  bool parallel = true;

  void validate() const;
  std::uint64_t seed_of(int trial) const;
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TrialFailed : public std::runtime_error {
 public:
  TrialFailed(int trial, std::string optimizer, const std::string& what);
  int trial() const { return trial_; }
  const std::string& optimizer() const { return optimizer_; }

 private:
  int trial_;
  std::string optimizer_;
};

struct HybridResult {
  OptimizerRun best;
  std::vector<OptimizerRun> runs;  // SA then RL for each trial, trial order
};

// Objective shared by SA and the enumerator: reward of the full action.
Objective reward_objective(const Calibration& cal, int n_chiplets_max = 128,
                           double penalty = -1000.0);

// Every trial runs SA then RL; the global best wins. With `parallel` the
// 2 * trial_max runs execute concurrently and reduce to the same result.
HybridResult run_trials(const HybridConfig& cfg, const Calibration& cal, const SearchSpace& space);

// Highest objective; ties go to lower packaging cost, then lower energy per
// op, then the lexicographically smaller action.
OptimizerRun select_best(std::span<const OptimizerRun> runs, const Calibration& cal);

}  // namespace chiplet
