#include "chiplet/run_config.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace chiplet {

namespace {

void only(const nlohmann::json& j, const std::string& where, const std::set<std::string>& keys) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, _] : j.items())
    if (!keys.count(k)) throw std::invalid_argument("unknown field '" + where + "." + k + "'");
}

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("field '" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace

HybridConfig run_config_from_json(const nlohmann::json& j) {
  HybridConfig c;
  only(j, "config", {"sa", "ppo", "hybrid", "env"});
  if (j.contains("sa")) {
    const auto& s = j.at("sa");
    only(s, "sa", {"t_max", "temperature", "step_size", "trace_stride"});
    take(s, "t_max", c.sa.t_max, "sa");
    take(s, "temperature", c.sa.temperature, "sa");
    take(s, "step_size", c.sa.step_size, "sa");
    take(s, "trace_stride", c.sa.trace_stride, "sa");
  }
  if (j.contains("ppo")) {
    const auto& p = j.at("ppo");
    only(p, "ppo", {"n_steps", "n_epochs", "minibatch", "lr", "clip_eps", "vf_coef", "ent_coef",
                    "gamma", "gae_lambda", "total_timesteps", "hidden"});
    take(p, "n_steps", c.ppo.n_steps, "ppo");
    take(p, "n_epochs", c.ppo.n_epochs, "ppo");
    take(p, "minibatch", c.ppo.minibatch, "ppo");
    take(p, "lr", c.ppo.lr, "ppo");
    take(p, "clip_eps", c.ppo.clip_eps, "ppo");
    take(p, "vf_coef", c.ppo.vf_coef, "ppo");
    take(p, "ent_coef", c.ppo.ent_coef, "ppo");
    take(p, "gamma", c.ppo.gamma, "ppo");
    take(p, "gae_lambda", c.ppo.gae_lambda, "ppo");
    take(p, "total_timesteps", c.ppo.total_timesteps, "ppo");
    take(p, "hidden", c.ppo.hidden, "ppo");
  }
  if (j.contains("hybrid")) {
    const auto& h = j.at("hybrid");
    only(h, "hybrid", {"trial_max", "seeds", "inference_actions", "parallel"});
    take(h, "trial_max", c.trial_max, "hybrid");
    take(h, "seeds", c.seeds, "hybrid");
    take(h, "inference_actions", c.inference_actions, "hybrid");
    take(h, "parallel", c.parallel, "hybrid");
  }
  if (j.contains("env")) {
    const auto& e = j.at("env");
    only(e, "env", {"episode_len", "penalty"});
    take(e, "episode_len", c.env.episode_len, "env");
    take(e, "penalty", c.env.penalty, "env");
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const HybridConfig& c) {
  return {
      {"sa",
       {{"t_max", c.sa.t_max},
        {"temperature", c.sa.temperature},
        {"step_size", c.sa.step_size},
        {"trace_stride", c.sa.trace_stride}}},
      {"ppo",
       {{"n_steps", c.ppo.n_steps},
        {"n_epochs", c.ppo.n_epochs},
        {"minibatch", c.ppo.minibatch},
        {"lr", c.ppo.lr},
        {"clip_eps", c.ppo.clip_eps},
        {"vf_coef", c.ppo.vf_coef},
        {"ent_coef", c.ppo.ent_coef},
        {"gamma", c.ppo.gamma},
        {"gae_lambda", c.ppo.gae_lambda},
        {"total_timesteps", c.ppo.total_timesteps},
        {"hidden", c.ppo.hidden}}},
      {"hybrid",
       {{"trial_max", c.trial_max},
        {"seeds", c.seeds},
        {"inference_actions", c.inference_actions},
        {"parallel", c.parallel}}},
      {"env", {{"episode_len", c.env.episode_len}, {"penalty", c.env.penalty}}},
  };
}

}  // namespace chiplet
