// chiplet_gym: evaluate, optimize, enumerate and benchmark chiplet designs.
//
// Exit codes: 0 ok, 2 bad input, 3 optimizer/runtime failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chiplet/canonical_json.hpp"
#include "chiplet/enumerate.hpp"
#include "chiplet/report.hpp"
#include "chiplet/run_config.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace chiplet;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Calibration load_calibration(const std::string& path, const std::string& weights) {
  Calibration cal = path.empty() ? default_calibration() : calibration_from_json(read_json(path));
  if (!weights.empty()) {
    std::vector<double> w;
    std::stringstream ss(weights);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        w.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw InputError("--weights: '" + tok + "' is not a number");
      }
    }
    if (w.size() != 3) throw InputError("--weights expects a,b,g");
    cal.weights.alpha = w[0];
    cal.weights.beta = w[1];
    cal.weights.gamma = w[2];
  }
  cal.validate();
  return cal;
}

// A bare design point, or any document carrying one under "design_point".
DesignPoint read_point(const std::string& path) {
  const json j = read_json(path);
  return design_point_from_json(j.is_object() && j.contains("design_point") ? j["design_point"] : j);
}

void write_text(const fs::path& path, const std::string& s) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  atomic_write(path, s);
}

std::string csv_of(const OptimizerRun& run, const std::string& header) {
  std::ostringstream os;
  write_trace_csv(os, run, header);
  return os.str();
}

struct Common {
  std::string calib;
  std::string weights;
};

int cmd_evaluate(const Common& c, const std::string& point, const std::string& out) {
  const Calibration cal = load_calibration(c.calib, c.weights);
  const DesignPoint dp = read_point(point);
  const std::string text = canonical_pretty(evaluate_report(dp, cal));
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

int cmd_optimize(const Common& c, const std::string& mode, const std::string& opt_path,
                 const std::string& space_path, std::uint64_t seed, int cap,
                 const std::string& out_dir, const std::vector<std::string>& agent_paths,
                 const std::string& argv_line) {
  const auto t0 = std::chrono::steady_clock::now();
  Calibration cal = load_calibration(c.calib, c.weights);
  cal.package.n_chiplets_max = cap;
  HybridConfig cfg = opt_path.empty() ? HybridConfig{} : run_config_from_json(read_json(opt_path));
  cfg.env.n_chiplets_max = cap;
  const json space_json = space_path.empty() ? json() : read_json(space_path);
  SearchSpace space = space_path.empty() ? SearchSpace::full(cap) : SearchSpace::from_json(space_json);
  for (const auto& p : agent_paths) cfg.agents.push_back(Policy::from_json(read_json(p)));
  if (mode != "hybrid") {
    cfg.trial_max = 1;
    cfg.seeds = {seed};
  } else if (cfg.seeds.empty()) {
    for (int t = 0; t < cfg.trial_max; ++t) cfg.seeds.push_back(seed + static_cast<std::uint64_t>(t));
  }
  cfg.validate();

  const fs::path out(out_dir);
  fs::create_directories(out);
  RunManifest man;
  man.command = argv_line;
  man.calibration_path = c.calib.empty() ? "<defaults>" : c.calib;
  man.config_hash = content_hash({{"calibration", to_json(cal)},
                                  {"config", to_json(cfg)},
                                  {"mode", mode},
                                  {"case", cap},
                                  {"space", space_json},
                                  {"agents", agent_paths}});

  std::vector<OptimizerRun> runs;
  auto record = [&](const OptimizerRun& r) {
    const bool sa = r.optimizer == "sa";
    const std::string name = r.optimizer + "_trial" + std::to_string(r.trial) + "_seed" +
                             std::to_string(r.seed) + "_trace.csv";
    write_text(out / name, csv_of(r, sa ? "iteration,current_obj,best_obj"
                                         : "timestep,mean_episodic_reward,best_obj"));
    man.outputs.push_back(name);
    man.runs.push_back(run_entry(r, name));
    runs.push_back(r);
  };

  if (mode == "sa") {
    SAConfig sa = cfg.sa;
    sa.seed = seed;
    record(run_sa(reward_objective(cal, cap, cfg.env.penalty), space, sa));
  } else if (mode == "rl") {
    EnvConfig ec = cfg.env;
    ec.seed = seed;
    ChipletEnv env(cal, space, ec);
    if (cfg.agents.empty()) {
      PPOConfig pc = cfg.ppo;
      pc.seed = seed;
      PpoResult res = train_ppo(env, pc);
      const std::string pname = "policy_seed" + std::to_string(seed) + ".json";
      write_text(out / pname, res.policy.to_json().dump() + "\n");
      man.outputs.push_back(pname);
      record(res.run);
    } else {
      record(infer_ppo(cfg.agents.front(), env, cfg.inference_actions, seed));
    }
  } else {
    const HybridResult res = run_trials(cfg, cal, space);
    for (const auto& r : res.runs) record(r);
  }

  const OptimizerRun best = select_best(runs, cal);
  json best_doc = {{"optimizer", best.optimizer},
                   {"seed", best.seed},
                   {"trial", best.trial},
                   {"best_obj", best.best_obj},
                   {"action", best.best_action},
                   {"design_point", to_json(decode(best.best_action))}};
  write_text(out / "best_point.json", canonical_pretty(best_doc));
  man.outputs.push_back("best_point.json");
  man.selection = best_doc;
  man.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(out / "manifest.json", canonical_pretty(man.to_json()));
  std::cout << "best " << best.best_obj << " (" << best.optimizer << ", seed " << best.seed
            << ") -> " << (out / "best_point.json").string() << "\n";
  return 0;
}

int cmd_enumerate(const Common& c, const std::string& space_path, int cap, const std::string& out) {
  Calibration cal = load_calibration(c.calib, c.weights);
  cal.package.n_chiplets_max = cap;
  const SearchSpace space =
      space_path.empty() ? SearchSpace::full(cap) : SearchSpace::from_json(read_json(space_path));
  auto entries = enumerate_parallel(space, cal);
  rank_entries(entries);
  std::ostringstream os;
  write_ranked_csv(os, entries);
  if (out.empty() || out == "-")
    std::cout << os.str();
  else
    write_text(out, os.str());
  return 0;
}

int cmd_bench(const Common& c, const std::string& point, const std::string& wl_path,
              const std::string& out_dir) {
  const Calibration cal = load_calibration(c.calib, c.weights);
  const DesignPoint dp = read_point(point);
  const auto wl = wl_path.empty() ? builtin_benchmarks() : workloads_from_json(read_json(wl_path));
  const auto rows = bench_rows(dp, cal, wl);
  const json report = bench_report(dp, cal, wl);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  const fs::path out(out_dir);
  fs::create_directories(out);
  write_text(out / "bench_report.json", canonical_pretty(report));
  write_text(out / "bench.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chiplet accelerator PPAC model and design-space optimizers"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--calib", common.calib, "calibration JSON (defaults built in)");
  app.add_option("--weights", common.weights, "reward weights alpha,beta,gamma (default 1,1,0.1)");

  std::string point, out, mode = "hybrid", opt, space, workloads;
  std::uint64_t seed = 0;
  int cap = 128;
  std::vector<std::string> agents;

  auto* ev = app.add_subcommand("evaluate", "evaluate one design point");
  ev->add_option("point", point, "design point JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", out, "report path (stdout if omitted)");

  auto* op = app.add_subcommand("optimize", "run SA, PPO or the hybrid optimizer");
  op->add_option("--mode", mode)->check(CLI::IsMember({"sa", "rl", "hybrid"}));
  op->add_option("--opt", opt, "optimizer config JSON")->check(CLI::ExistingFile);
  op->add_option("--space", space, "search-space restriction JSON")->check(CLI::ExistingFile);
  op->add_option("--seed", seed);
  op->add_option("--case", cap, "n_chiplets upper bound")->check(CLI::IsMember({64, 128}));
  op->add_option("--agents", agents, "trained policy files; RL runs in inference mode")
      ->check(CLI::ExistingFile);
  op->add_option("--out", out, "output directory")->required();

  auto* en = app.add_subcommand("enumerate", "exhaustively rank a restricted space");
  en->add_option("space", space, "search-space restriction JSON")->required()->check(CLI::ExistingFile);
  en->add_option("--case", cap)->check(CLI::IsMember({64, 128}));
  en->add_option("--out", out, "ranked CSV path (stdout if omitted)");

  auto* be = app.add_subcommand("bench", "per-workload comparison against the monolithic chip");
  be->add_option("point", point, "design point JSON")->required()->check(CLI::ExistingFile);
  be->add_option("--workloads", workloads, "workload rows JSON")->check(CLI::ExistingFile);
  be->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string argv_line;
  for (int i = 0; i < argc; ++i) argv_line += (i ? " " : "") + std::string(argv[i]);

  try {
    if (ev->parsed()) return cmd_evaluate(common, point, out);
    if (op->parsed())
      return cmd_optimize(common, mode, opt, space, seed, cap, out, agents, argv_line);
    if (en->parsed()) return cmd_enumerate(common, space, cap, out);
    if (be->parsed()) return cmd_bench(common, point, workloads, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SpaceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
