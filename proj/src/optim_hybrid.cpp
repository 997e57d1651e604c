#include "chiplet/optim_hybrid.hpp"

#include <exception>
#include <optional>
#include <set>
#include <tuple>

namespace chiplet {

void HybridConfig::validate() const {
  if (trial_max < 1) throw std::invalid_argument("trial_max must be >= 1");
  if (!seeds.empty() && static_cast<int>(seeds.size()) != trial_max)
    throw std::invalid_argument("need exactly one seed per trial");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw std::invalid_argument("trial seeds must be pairwise distinct");
  if (inference_actions < 1) throw std::invalid_argument("inference_actions must be >= 1");
  sa.validate();
  ppo.validate();
  env.validate();
}

std::uint64_t HybridConfig::seed_of(int trial) const {
  return seeds.empty() ? static_cast<std::uint64_t>(trial) : seeds[static_cast<std::size_t>(trial)];
}

TrialFailed::TrialFailed(int trial, std::string optimizer, const std::string& what)
    : std::runtime_error("trial " + std::to_string(trial) + " (" + optimizer + ") failed: " + what),
      trial_(trial),
      optimizer_(std::move(optimizer)) {}

Objective reward_objective(const Calibration& cal, int n_chiplets_max, double penalty) {
  Calibration c = cal;
  c.package.n_chiplets_max = n_chiplets_max;
  c.model.penalty = penalty;
  return [c](const ActionVector& a) { return evaluate(decode(a), c).reward; };
}

namespace {

OptimizerRun run_one(const HybridConfig& cfg, const Calibration& cal, const SearchSpace& space,
                     int trial, bool rl) {
  const std::uint64_t seed = cfg.seed_of(trial);
  OptimizerRun run;
  if (!rl) {
    SAConfig sa = cfg.sa;
    sa.seed = seed;
    run = run_sa(reward_objective(cal, cfg.env.n_chiplets_max, cfg.env.penalty), space, sa);
  } else {
    EnvConfig ec = cfg.env;
    ec.seed = seed;
    ChipletEnv env(cal, space, ec);
    if (cfg.agents.empty()) {
      PPOConfig pc = cfg.ppo;
      pc.seed = seed;
      run = train_ppo(env, pc).run;
    } else {
      const auto& agent = cfg.agents[static_cast<std::size_t>(trial) % cfg.agents.size()];
      run = infer_ppo(agent, env, cfg.inference_actions, seed);
    }
  }
  run.trial = trial;
  return run;
}

}  // namespace

HybridResult run_trials(const HybridConfig& cfg, const Calibration& cal, const SearchSpace& space) {
  cfg.validate();
  const int jobs = 2 * cfg.trial_max;
  std::vector<OptimizerRun> runs(static_cast<std::size_t>(jobs));
  std::vector<std::optional<std::string>> errors(static_cast<std::size_t>(jobs));

#pragma omp parallel for schedule(dynamic, 1) if (cfg.parallel)
  for (int j = 0; j < jobs; ++j) {
    try {
      runs[static_cast<std::size_t>(j)] = run_one(cfg, cal, space, j / 2, j % 2 == 1);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(j)] = e.what();
    }
  }
  for (int j = 0; j < jobs; ++j)
    if (errors[static_cast<std::size_t>(j)])
      throw TrialFailed(j / 2, j % 2 ? "rl" : "sa", *errors[static_cast<std::size_t>(j)]);

  HybridResult res;
  res.best = select_best(runs, cal);
  res.runs = std::move(runs);
  return res;
}

OptimizerRun select_best(std::span<const OptimizerRun> runs, const Calibration& cal) {
  if (runs.empty()) throw EmptyInput("select_best needs at least one run");
  auto key = [&](const OptimizerRun& r) {
    const PpacResult p = evaluate(decode(r.best_action), cal);
    return std::make_tuple(-r.best_obj, p.pkg_cost, p.E_op, r.best_action, r.optimizer, r.trial,
                           r.seed);
  };
  std::size_t best = 0;
  auto best_key = key(runs[0]);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    auto k = key(runs[i]);
    if (k < best_key) {
      best_key = std::move(k);
      best = i;
    }
  }
  return runs[best];
}

}  // namespace chiplet
