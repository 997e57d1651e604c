#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "chiplet/gym_env.hpp"
#include "chiplet/mlp.hpp"
#include "chiplet/optimizer_run.hpp"

namespace chiplet {

struct PPOConfig {
  long n_steps = 2048;
  int n_epochs = 10;
  int minibatch = 64;
  double lr = 3e-4;
  double clip_eps = 0.2;
  double vf_coef = 0.5;
  double ent_coef = 0.1;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  long total_timesteps = 250000;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64, 64};

  void validate() const;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Actor emits one logit group per action head; critic emits a scalar value.
struct Policy {
  Mlp actor;
  Mlp critic;
  std::vector<int> heads;

  static Policy create(std::vector<int> heads, int obs_dim, const std::vector<int>& hidden,
                       Rng& rng);

  nlohmann::json to_json() const;
  static Policy from_json(const nlohmann::json& j);
};

struct ActionSample {
  std::vector<int> action;
  double log_prob = 0.0;
  double entropy = 0.0;
};

// `logits` holds sum(heads) entries, head by head.
ActionSample sample_action(std::span<const double> logits, std::span<const int> heads, Rng& rng);
double log_prob(std::span<const double> logits, std::span<const int> heads,
                std::span<const int> action);
double entropy(std::span<const double> logits, std::span<const int> heads);
std::vector<int> greedy_action(std::span<const double> logits, std::span<const int> heads);

// `dones[t]` marks the last step of an episode; `last_value` bootstraps a
// rollout that stops mid-episode.
std::vector<double> gae(std::span<const double> rewards, std::span<const double> values,
                        std::span<const std::uint8_t> dones, double last_value, double gamma,
                        double lambda);

struct RolloutBuffer {
  Eigen::MatrixXd obs;  // kObsDim x n
  std::vector<std::vector<int>> actions;
  std::vector<double> log_probs, values, rewards, advantages, returns;
  std::vector<std::uint8_t> dones;

  std::size_t size() const { return rewards.size(); }
};

// Advantage mean 0 / std 1 over the whole buffer.
void normalize_advantages(std::vector<double>& adv);

struct Minibatch {
  Eigen::MatrixXd obs;
  std::vector<std::vector<int>> actions;
  Eigen::VectorXd old_log_probs, advantages, returns;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
};

// Clipped-surrogate loss, mean over the minibatch:
//   -min(rA, clip(r)A) + vf (V - R)^2 - ent H
// Gradients are written when the pointers are non-null.
LossStats ppo_loss(const Policy& pol, const Minibatch& mb, const PPOConfig& cfg,
                   Eigen::VectorXd* g_actor = nullptr, Eigen::VectorXd* g_critic = nullptr);

struct PpoState {
  Policy policy;
  Adam adam_actor;
  Adam adam_critic;
};

LossStats ppo_update(PpoState& st, RolloutBuffer& buf, const PPOConfig& cfg, Rng& rng);

struct PpoResult {
  OptimizerRun run;  // trace rows: timestep, mean episodic reward, best objective
  Policy policy;
  long updates = 0;
};

PpoResult train_ppo(ChipletEnv& env, const PPOConfig& cfg);

// Samples `n_actions` actions from a trained policy; the greedy action is
// evaluated first.
OptimizerRun infer_ppo(const Policy& pol, ChipletEnv& env, long n_actions, std::uint64_t seed);

}  // namespace chiplet
