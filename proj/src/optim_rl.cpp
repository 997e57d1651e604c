#include "chiplet/optim_rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chiplet {

namespace {

// Softmax of one head into `p`; returns log of the normalizer (with max shift).
double softmax(const double* z, int k, double* p) {
  const double m = *std::max_element(z, z + k);
  double s = 0.0;
  for (int j = 0; j < k; ++j) s += (p[j] = std::exp(z[j] - m));
  for (int j = 0; j < k; ++j) p[j] /= s;
  return m + std::log(s);
}

int max_head(std::span<const int> heads) { return *std::max_element(heads.begin(), heads.end()); }

void check_width(std::span<const double> logits, std::span<const int> heads) {
  if (logits.size() != static_cast<std::size_t>(std::accumulate(heads.begin(), heads.end(), 0)))
    throw std::invalid_argument("logit count does not match action heads");
}

Eigen::VectorXd to_vec(const Observation& o) {
  return Eigen::Map<const Eigen::VectorXd>(o.data(), kObsDim);
}

}  // namespace

void PPOConfig::validate() const {
  if (n_steps < 1 || n_epochs < 1 || minibatch < 1)
    throw std::invalid_argument("n_steps, n_epochs and minibatch must be >= 1");
  if (!(gamma > 0 && gamma <= 1)) throw std::invalid_argument("gamma must be in (0, 1]");
  if (!(gae_lambda >= 0 && gae_lambda <= 1)) throw std::invalid_argument("gae_lambda must be in [0, 1]");
  if (!(clip_eps > 0)) throw std::invalid_argument("clip_eps must be > 0");
  if (!(lr > 0)) throw std::invalid_argument("lr must be > 0");
  if (vf_coef < 0 || ent_coef < 0) throw std::invalid_argument("loss coefficients must be >= 0");
  if (total_timesteps < 0) throw std::invalid_argument("total_timesteps must be >= 0");
}

Policy Policy::create(std::vector<int> heads, int obs_dim, const std::vector<int>& hidden,
                      Rng& rng) {
  Policy p;
  p.heads = std::move(heads);
  std::vector<int> a{obs_dim}, c{obs_dim};
  a.insert(a.end(), hidden.begin(), hidden.end());
  c.insert(c.end(), hidden.begin(), hidden.end());
  a.push_back(std::accumulate(p.heads.begin(), p.heads.end(), 0));
  c.push_back(1);
  p.actor = Mlp(a);
  p.critic = Mlp(c);
  p.actor.init_orthogonal(rng, std::sqrt(2.0), 0.01);
  p.critic.init_orthogonal(rng, std::sqrt(2.0), 1.0);
  return p;
}

nlohmann::json Policy::to_json() const {
  return {{"format", "chiplet-ppo-policy"},
          {"version", 1},
          {"heads", heads},
          {"actor", actor.to_json()},
          {"critic", critic.to_json()}};
}

Policy Policy::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "chiplet-ppo-policy" || j.value("version", 0) != 1)
    throw std::invalid_argument("not a version-1 policy file");
  Policy p;
  p.heads = j.at("heads").get<std::vector<int>>();
  p.actor = Mlp::from_json(j.at("actor"));
  p.critic = Mlp::from_json(j.at("critic"));
  if (p.actor.output_dim() != std::accumulate(p.heads.begin(), p.heads.end(), 0) ||
      p.critic.output_dim() != 1 || p.actor.input_dim() != p.critic.input_dim())
    throw std::invalid_argument("policy network shapes are inconsistent");
  return p;
}

ActionSample sample_action(std::span<const double> logits, std::span<const int> heads, Rng& rng) {
  check_width(logits, heads);
  ActionSample s;
  std::vector<double> p(max_head(heads));
  std::size_t off = 0;
  for (int k : heads) {
    const double lse = softmax(logits.data() + off, k, p.data());
    const double u = rng.uniform();
    int a = k - 1;
    double c = 0.0;
    for (int j = 0; j < k; ++j) {
      c += p[j];
      if (u < c) {
        a = j;
        break;
      }
    }
    s.action.push_back(a);
    s.log_prob += logits[off + a] - lse;
    for (int j = 0; j < k; ++j)
      if (p[j] > 0) s.entropy -= p[j] * std::log(p[j]);
    off += k;
  }
  return s;
}

double log_prob(std::span<const double> logits, std::span<const int> heads,
                std::span<const int> action) {
  check_width(logits, heads);
  std::vector<double> p(max_head(heads));
  double lp = 0.0;
  std::size_t off = 0;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    lp += logits[off + action[h]] - softmax(logits.data() + off, heads[h], p.data());
    off += heads[h];
  }
  return lp;
}

double entropy(std::span<const double> logits, std::span<const int> heads) {
  check_width(logits, heads);
  std::vector<double> p(max_head(heads));
  double h = 0.0;
  std::size_t off = 0;
  for (int k : heads) {
    softmax(logits.data() + off, k, p.data());
    for (int j = 0; j < k; ++j)
      if (p[j] > 0) h -= p[j] * std::log(p[j]);
    off += k;
  }
  return h;
}

std::vector<int> greedy_action(std::span<const double> logits, std::span<const int> heads) {
  check_width(logits, heads);
  std::vector<int> a;
  std::size_t off = 0;
  for (int k : heads) {
    a.push_back(static_cast<int>(std::max_element(logits.begin() + off, logits.begin() + off + k) -
                                 (logits.begin() + off)));
    off += k;
  }
  return a;
}

std::vector<double> gae(std::span<const double> rewards, std::span<const double> values,
                        std::span<const std::uint8_t> dones, double last_value, double gamma,
                        double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("gae inputs differ in length");
  std::vector<double> adv(n);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double live = dones[t] ? 0.0 : 1.0;
    const double next_v = t + 1 == n ? last_value : values[t + 1];
    const double delta = rewards[t] + gamma * next_v * live - values[t];
    running = delta + gamma * lambda * live * running;
    adv[t] = running;
  }
  return adv;
}

void normalize_advantages(std::vector<double>& adv) {
  if (adv.empty()) return;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : adv) a = sd > 1e-12 ? (a - mean) / sd : a - mean;
}

LossStats ppo_loss(const Policy& pol, const Minibatch& mb, const PPOConfig& cfg,
                   Eigen::VectorXd* g_actor, Eigen::VectorXd* g_critic) {
  const Eigen::Index B = mb.obs.cols();
  if (B == 0) throw std::invalid_argument("empty minibatch");
  Mlp::Cache ca, cc;
  const Eigen::MatrixXd logits = pol.actor.forward(mb.obs, g_actor ? &ca : nullptr);
  const Eigen::MatrixXd values = pol.critic.forward(mb.obs, g_critic ? &cc : nullptr);
  Eigen::MatrixXd d_logits = Eigen::MatrixXd::Zero(logits.rows(), B);
  Eigen::MatrixXd d_values(1, B);

  const double inv_b = 1.0 / static_cast<double>(B);
  std::vector<double> p(max_head(pol.heads));
  LossStats st;
  long clipped = 0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const double* z = logits.col(i).data();
    const auto& act = mb.actions[static_cast<std::size_t>(i)];
    double lp = 0.0;
    std::size_t off = 0;
    for (std::size_t h = 0; h < pol.heads.size(); ++h) {
      lp += z[off + act[h]] - softmax(z + off, pol.heads[h], p.data());
      off += pol.heads[h];
    }
    const double a = mb.advantages[i];
    const double ratio = std::exp(lp - mb.old_log_probs[i]);
    const double s1 = ratio * a;
    const double s2 = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * a;
    st.policy_loss -= std::min(s1, s2);
    if (std::abs(ratio - 1.0) > cfg.clip_eps) ++clipped;
    const double g_lp = s1 <= s2 ? -a * ratio * inv_b : 0.0;

    off = 0;
    double* dz = d_logits.col(i).data();
    for (std::size_t h = 0; h < pol.heads.size(); ++h) {
      const int k = pol.heads[h];
      softmax(z + off, k, p.data());
      double hh = 0.0;
      for (int j = 0; j < k; ++j)
        if (p[j] > 0) hh -= p[j] * std::log(p[j]);
      st.entropy += hh;
      for (int j = 0; j < k; ++j) {
        const double logp = p[j] > 0 ? std::log(p[j]) : 0.0;
        const double d_ent = -p[j] * (logp + hh);
        dz[off + j] = g_lp * ((j == act[h] ? 1.0 : 0.0) - p[j]) - cfg.ent_coef * inv_b * d_ent;
      }
      off += k;
    }
    const double err = values(0, i) - mb.returns[i];
    st.value_loss += err * err;
    d_values(0, i) = 2.0 * cfg.vf_coef * inv_b * err;
  }
  st.policy_loss *= inv_b;
  st.value_loss *= inv_b;
  st.entropy *= inv_b;
  st.total = st.policy_loss + cfg.vf_coef * st.value_loss - cfg.ent_coef * st.entropy;
  st.clip_fraction = static_cast<double>(clipped) * inv_b;
  if (!std::isfinite(st.total))
    throw NonFiniteLoss("non-finite PPO loss (policy " + std::to_string(st.policy_loss) +
                        ", value " + std::to_string(st.value_loss) + ", entropy " +
                        std::to_string(st.entropy) + ")");
  if (g_actor) {
    g_actor->setZero(pol.actor.num_params());
    pol.actor.backward(ca, d_logits, *g_actor);
  }
  if (g_critic) {
    g_critic->setZero(pol.critic.num_params());
    pol.critic.backward(cc, d_values, *g_critic);
  }
  return st;
}

LossStats ppo_update(PpoState& st, RolloutBuffer& buf, const PPOConfig& cfg, Rng& rng) {
  const std::size_t n = buf.size();
  std::vector<double> adv = buf.advantages;
  normalize_advantages(adv);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::VectorXd ga, gc;
  LossStats last;
  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i)
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
    for (std::size_t start = 0; start < n; start += cfg.minibatch) {
      const std::size_t b = std::min<std::size_t>(cfg.minibatch, n - start);
      Minibatch mb;
      mb.obs.resize(kObsDim, static_cast<Eigen::Index>(b));
      mb.old_log_probs.resize(static_cast<Eigen::Index>(b));
      mb.advantages.resize(static_cast<Eigen::Index>(b));
      mb.returns.resize(static_cast<Eigen::Index>(b));
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t s = idx[start + k];
        const auto c = static_cast<Eigen::Index>(k);
        mb.obs.col(c) = buf.obs.col(static_cast<Eigen::Index>(s));
        mb.actions.push_back(buf.actions[s]);
        mb.old_log_probs[c] = buf.log_probs[s];
        mb.advantages[c] = adv[s];
        mb.returns[c] = buf.returns[s];
      }
      last = ppo_loss(st.policy, mb, cfg, &ga, &gc);
      st.adam_actor.step(st.policy.actor.params(), ga);
      st.adam_critic.step(st.policy.critic.params(), gc);
    }
  }
  return last;
}

PpoResult train_ppo(ChipletEnv& env, const PPOConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto heads = env.space().dims();
  PpoState st{Policy::create(heads, kObsDim, cfg.hidden, rng), {}, {}};
  st.adam_actor = Adam(st.policy.actor.num_params(), cfg.lr);
  st.adam_critic = Adam(st.policy.critic.num_params(), cfg.lr);

  PpoResult res;
  res.run.optimizer = "rl";
  res.run.seed = cfg.seed;
  bool have_best = false;

  Observation obs = env.reset(cfg.seed);
  double ep_return = 0.0;
  long t = 0;
  while (t < cfg.total_timesteps) {
    const long len = std::min(cfg.n_steps, cfg.total_timesteps - t);
    RolloutBuffer buf;
    buf.obs.resize(kObsDim, len);
    double finished_sum = 0.0;
    long finished = 0;
    for (long s = 0; s < len; ++s) {
      const Eigen::VectorXd x = to_vec(obs);
      const Eigen::VectorXd logits = st.policy.actor.forward(x);
      const double v = st.policy.critic.forward(x)(0, 0);
      ActionSample a = sample_action({logits.data(), static_cast<std::size_t>(logits.size())},
                                     heads, rng);
      const StepResult r = env.step(a.action);
      if (!have_best || r.reward > res.run.best_obj) {
        res.run.best_obj = r.reward;
        res.run.best_action = r.action;
        have_best = true;
      }
      buf.obs.col(s) = x;
      buf.actions.push_back(std::move(a.action));
      buf.log_probs.push_back(a.log_prob);
      buf.values.push_back(v);
      buf.rewards.push_back(r.reward);
      buf.dones.push_back(r.done ? 1 : 0);
      ep_return += r.reward;
      if (r.done) {
        finished_sum += ep_return;
        ++finished;
        ep_return = 0.0;
        obs = env.reset();
      } else {
        obs = r.obs;
      }
    }
    t += len;
    if (len == cfg.n_steps) {
      const double last_v = buf.dones.back() ? 0.0 : st.policy.critic.forward(to_vec(obs))(0, 0);
      buf.advantages = gae(buf.rewards, buf.values, buf.dones, last_v, cfg.gamma, cfg.gae_lambda);
      buf.returns.resize(buf.size());
      for (std::size_t i = 0; i < buf.size(); ++i) buf.returns[i] = buf.advantages[i] + buf.values[i];
      ppo_update(st, buf, cfg, rng);
      ++res.updates;
    }
    const double mean_ep = finished > 0 ? finished_sum / static_cast<double>(finished) : 0.0;
    res.run.trace.push_back({t, mean_ep, res.run.best_obj});
  }
  res.policy = std::move(st.policy);
  return res;
}

OptimizerRun infer_ppo(const Policy& pol, ChipletEnv& env, long n_actions, std::uint64_t seed) {
  if (pol.heads != env.space().dims())
    throw std::invalid_argument("policy heads do not match the environment's search space");
  Rng rng(seed);
  OptimizerRun run;
  run.optimizer = "rl";
  run.seed = seed;
  bool have_best = false;
  Observation obs = env.reset(seed);
  auto consider = [&](const StepResult& r, long step) {
    if (!have_best || r.reward > run.best_obj) {
      run.best_obj = r.reward;
      run.best_action = r.action;
      have_best = true;
    }
    run.trace.push_back({step, r.reward, run.best_obj});
    obs = r.done ? env.reset() : r.obs;
  };
  for (long s = 0; s < n_actions; ++s) {
    const Eigen::VectorXd logits = pol.actor.forward(to_vec(obs));
    std::span<const double> lg(logits.data(), static_cast<std::size_t>(logits.size()));
    const auto action = s == 0 ? greedy_action(lg, pol.heads) : sample_action(lg, pol.heads, rng).action;
    consider(env.step(action), s + 1);
  }
  return run;
}

}  // namespace chiplet
