#include "chiplet/optim_sa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chiplet {

void write_trace_csv(std::ostream& os, const OptimizerRun& run, const std::string& header) {
  os << header << '\n';
  const auto prec = os.precision(17);
  for (const auto& r : run.trace) os << r.step << ',' << r.value << ',' << r.best << '\n';
  os.precision(prec);
}

void SAConfig::validate() const {
  if (t_max < 0) throw std::invalid_argument("t_max must be >= 0");
  if (temperature < 0) throw std::invalid_argument("temperature must be >= 0");
  if (step_size < 0) throw std::invalid_argument("step_size must be >= 0");
  if (trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");
}

std::vector<int> neighbor(std::span<const int> x, std::span<const int> dims, int step_size,
                          Rng& rng) {
  std::vector<int> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double u = rng.uniform(-1.0, 1.0);
    const int v = out[i] + static_cast<int>(std::lround(u * step_size));
    out[i] = std::clamp(v, 0, dims[i] - 1);
  }
  return out;
}

bool accept(double o_cand, double o_curr, long iteration, double temperature, Rng& rng) {
  if (iteration < 1) throw std::invalid_argument("iteration must be >= 1");
  const double t = temperature / static_cast<double>(iteration);
  const double u = rng.uniform();
  return o_cand > o_curr || u < t;
}

OptimizerRun run_sa(const Objective& f, const SearchSpace& space, const SAConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto dims = space.dims();

  std::vector<int> curr(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) curr[i] = rng.below(dims[i]);
  double o_curr = f(space.expand(curr));

  OptimizerRun run;
  run.optimizer = "sa";
  run.seed = cfg.seed;
  run.best_action = space.expand(curr);
  run.best_obj = o_curr;
  run.trace.reserve(static_cast<std::size_t>(cfg.t_max / cfg.trace_stride + 2));
  run.trace.push_back({0, o_curr, o_curr});

  for (long it = 1; it <= cfg.t_max; ++it) {
    auto cand = neighbor(curr, dims, cfg.step_size, rng);
    const double o_cand = f(space.expand(cand));
    if (o_cand > run.best_obj) {
      run.best_obj = o_cand;
      run.best_action = space.expand(cand);
    }
    if (accept(o_cand, o_curr, it, cfg.temperature, rng)) {
      curr = std::move(cand);
      o_curr = o_cand;
    }
    if (it % cfg.trace_stride == 0 || it == cfg.t_max)
      run.trace.push_back({it, o_curr, run.best_obj});
  }
  return run;
}

}  // namespace chiplet
