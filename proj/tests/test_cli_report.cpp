#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chiplet/canonical_json.hpp"
#include "chiplet/enumerate.hpp"
#include "chiplet/report.hpp"
#include "chiplet/run_config.hpp"

using namespace chiplet;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chiplet_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(CHIPLET_GYM_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cfg(const std::string& name) { return std::string(CHIPLET_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("canonical JSON") {
  const json a = json::parse(R"({"b": 1, "a": [1.5, 2], "c": {"z": true, "y": null}})");
  CHECK(canonical_dump(a) == R"({"a":[1.5,2],"b":1,"c":{"y":null,"z":true}})");
  CHECK(canonical_dump(json(0.1)) == "0.1");
  CHECK(canonical_dump(json(1.0 / 3.0)) == "0.333333333");
  CHECK(canonical_dump(json(std::nan(""))) == "null");
  CHECK(canonical_dump(json(12345678901LL)) == "12345678901");
  CHECK(json::parse(canonical_pretty(a)) == a);

  const std::string h = content_hash(a);
  CHECK(h.size() == 16);
  CHECK(content_hash(json::parse(a.dump(4))) == h);
  CHECK(content_hash(json::parse(canonical_dump(a))) == h);
  json b = a;
  b["b"] = 2;
  CHECK(content_hash(b) != h);
}

TEST_CASE("run config round trip") {
  const json j = json::parse(slurp(cfg("opt_quick.json")));
  const HybridConfig c = run_config_from_json(j);
  CHECK(content_hash(to_json(run_config_from_json(to_json(c)))) == content_hash(to_json(c)));
  json bad = j;
  bad["sa"]["temprature"] = 3;
  CHECK_THROWS_AS(run_config_from_json(bad), std::invalid_argument);
}

TEST_CASE("evaluate report") {
  const Calibration cal = default_calibration();
  const json r = evaluate_report(reference_case_i(), cal);
  CHECK(r["design_point"]["arch_type"] == "5.5D-logic-on-logic");
  CHECK(r["layout"]["m"] == 5);
  CHECK(r["layout"]["n"] == 6);
  CHECK(r["comparison"].contains("throughput_ratio"));
  CHECK(canonical_dump(r) == canonical_dump(evaluate_report(reference_case_i(), cal)));

  DesignPoint bad = reference_case_i();
  bad.n_chiplets = 1;
  bad.arch_type = ArchType::k2p5D;
  const json rb = evaluate_report(bad, cal);
  CHECK(rb["comparison"].is_null());
  CHECK(rb["ppac"]["feasible"] == false);
}

TEST_CASE("bench rows") {
  const Calibration cal = default_calibration();
  const auto rows = bench_rows(reference_case_i(), cal, builtin_benchmarks());
  CHECK(rows.size() == 20);
  const PpacResult r = evaluate(reference_case_i(), cal);
  const auto resnet = builtin_benchmarks().front();
  CHECK(rows[0].workload == "ResNet50");
  CHECK(rows[0].value == doctest::Approx(tasks_per_sec(r.ops_per_sec_system, resnet)));
  std::ostringstream os;
  write_bench_csv(os, rows);
  CHECK(os.str().rfind("system,workload,metric,value\n", 0) == 0);
}

TEST_CASE("enumerate guard and ranking") {
  const Calibration cal = default_calibration();
  CHECK_THROWS_AS(enumerate_serial(SearchSpace::full(), cal), SpaceTooLarge);
  const SearchSpace pinned(encode(reference_case_i()), {}, {});
  auto one = enumerate_serial(pinned, cal);
  REQUIRE(one.size() == 1);
  CHECK(one[0].reward == evaluate(reference_case_i(), cal).reward);

  const SearchSpace space = SearchSpace::from_json(json::parse(slurp(cfg("space_rates.json"))));
  auto s = enumerate_serial(space, cal), p = enumerate_parallel(space, cal);
  REQUIRE(s.size() == 1000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    REQUIRE(s[i].index == i);
    REQUIRE(s[i].reward == p[i].reward);
  }
  rank_entries(s);
  for (std::size_t i = 1; i < s.size(); ++i) REQUIRE(s[i - 1].reward >= s[i].reward);
  // brute force over the same points
  double best = -1e300;
  for (std::uint64_t i = 0; i < space.size(); ++i)
    best = std::max(best, evaluate(decode(space.expand(space.unrank(i))), cal).reward);
  CHECK(s.front().reward == best);
}

TEST_CASE("atomic write replaces the whole file") {
  const fs::path dir = scratch("atomic");
  atomic_write(dir / "x.txt", "first");
  atomic_write(dir / "x.txt", "second");
  CHECK(slurp(dir / "x.txt") == "second");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
  CHECK_THROWS(atomic_write(dir / "missing" / "x.txt", "y"));
}

TEST_CASE("cli: evaluate") {
  const fs::path dir = scratch("evaluate");
  CHECK(run("evaluate " + cfg("case_i.json") + " --out " + (dir / "a.json").string()) == 0);
  CHECK(run("evaluate " + cfg("case_i.json") + " --out " + (dir / "b.json").string()) == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const json r = json::parse(slurp(dir / "a.json"));
  CHECK(r["layout"]["m"] == 5);

  std::ofstream(dir / "broken.json") << "{\"arch_type\": ";
  CHECK(run("evaluate " + (dir / "broken.json").string() + " --out " + (dir / "c.json").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "c.json"));
  std::ofstream(dir / "bad_field.json") << json{{"arch_type", "4D"}}.dump();
  CHECK(run("evaluate " + (dir / "bad_field.json").string()) == 2);
  CHECK(run("evaluate " + cfg("case_i.json") + " --weights 1,x,0.1") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("cli: enumerate") {
  const fs::path dir = scratch("enumerate");
  CHECK(run("enumerate " + cfg("space_rates.json") + " --out " + (dir / "r.csv").string()) == 0);
  std::istringstream is(slurp(dir / "r.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 1000);
  std::ofstream(dir / "huge.json") << R"({"free": {"n_chiplets": {"min": 1, "max": 128},
      "links_3d": {"min": 100, "max": 10000}, "links_2p5d_ai": {"min": 50, "max": 2500}, "dr_3d": {"min": 20, "max": 40}}})";
  CHECK(run("enumerate " + (dir / "huge.json").string()) == 2);
}

TEST_CASE("cli: optimize writes traces, best point and manifest") {
  const fs::path dir = scratch("optimize");
  std::ofstream(dir / "opt.json") << R"({"sa": {"t_max": 500, "trace_stride": 10},
      "ppo": {"n_steps": 64, "total_timesteps": 128}, "hybrid": {"trial_max": 1}})";
  const std::string base = "optimize --opt " + (dir / "opt.json").string() + " --space " +
                           cfg("space_rates.json") + " --case 64 --seed 3 ";
  REQUIRE(run(base + "--mode hybrid --out " + (dir / "h").string()) == 0);
  CHECK(fs::exists(dir / "h" / "sa_trial0_seed3_trace.csv"));
  CHECK(fs::exists(dir / "h" / "rl_trial0_seed3_trace.csv"));
  const json man = json::parse(slurp(dir / "h" / "manifest.json"));
  CHECK(man["config_hash"].get<std::string>().size() == 16);
  CHECK(man["runs"].size() == 2);
  const json best = json::parse(slurp(dir / "h" / "best_point.json"));
  for (const auto& r : man["runs"]) CHECK(best["best_obj"].get<double>() >= r["best_obj"].get<double>());

  CHECK(run("evaluate " + (dir / "h" / "best_point.json").string() + " --out " +
            (dir / "best_report.json").string()) == 0);
  const json rep = json::parse(slurp(dir / "best_report.json"));
  CHECK(rep["ppac"]["reward"].get<double>() == doctest::Approx(best["best_obj"].get<double>()).epsilon(1e-8));

  REQUIRE(run(base + "--mode hybrid --out " + (dir / "h2").string()) == 0);
  CHECK(slurp(dir / "h" / "best_point.json") == slurp(dir / "h2" / "best_point.json"));
  CHECK(slurp(dir / "h" / "sa_trial0_seed3_trace.csv") == slurp(dir / "h2" / "sa_trial0_seed3_trace.csv"));
  CHECK(json::parse(slurp(dir / "h2" / "manifest.json"))["config_hash"] == man["config_hash"]);

  REQUIRE(run(base + "--mode rl --out " + (dir / "rl").string()) == 0);
  const std::string policy = (dir / "rl" / "policy_seed3.json").string();
  REQUIRE(fs::exists(policy));
  CHECK(run(base + "--mode rl --agents " + policy + " --out " + (dir / "inf").string()) == 0);
  CHECK(run(base + "--mode magic --out " + (dir / "x").string()) == 2);
  CHECK(run(base + "--mode sa --case 100 --out " + (dir / "x").string()) == 2);
}

TEST_CASE("cli: bench") {
  const fs::path dir = scratch("bench");
  REQUIRE(run("bench " + cfg("case_i.json") + " --out " + dir.string()) == 0);
  std::istringstream is(slurp(dir / "bench.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 20);
  CHECK(json::parse(slurp(dir / "bench_report.json"))["rows"].size() == 20);
}
