#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmrf/cli.hpp"

using namespace gmrf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gmrf_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "gmrf_cftp");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

const char* kTrunc = R"({"model": {"d": 1, "epsilon": 0.2, "truncation": 2.0}, "window": [[0], [1]], "seed": 5})";
const char* kGood = R"({"model": {"d": 1, "epsilon": 0.05}, "schedule": {"a": 0.001, "L1": 20}})";

}  // namespace

TEST_CASE("config parsing and hashing") {
  const ExperimentConfig c = parse_experiment_config(kTrunc);
  CHECK(c.window.size() == 2);
  CHECK(c.seed == 5);
  CHECK(config_hash(c) == config_hash(parse_experiment_config(kTrunc)));
  ExperimentConfig d = c;
  d.seed = 6;
  CHECK(config_hash(c) != config_hash(d));
  CHECK_THROWS(parse_experiment_config(R"({"model": {"d": 1, "epsilon": 0.2}, "window": [[0, 1]]})"));
  CHECK(replica_seed(1, 0) != replica_seed(1, 1));
}

TEST_CASE("gamma command") {
  const auto dir = scratch("gamma");
  std::string out;
  CHECK(run({"--config", write_config(dir, kTrunc), "--cmd", "gamma", "--out", (dir / "o").string()}, &out) == 0);
  CHECK(out.find("\"gate_passes\": true") != std::string::npos);
  CHECK(out.find("config_hash") != std::string::npos);
  const auto d2 = write_config(dir, R"({"model": {"d": 2, "epsilon": 0.3, "truncation": 2.0}})");
  CHECK(run({"--config", d2, "--cmd", "gamma", "--out", (dir / "o").string()}, &out) == 0);
  CHECK(out.find("\"gate_threshold\": 0.75") != std::string::npos);
  const auto unb = write_config(dir, R"({"model": {"d": 1, "epsilon": 0.3}})");
  CHECK(run({"--config", unb, "--cmd", "gamma", "--out", (dir / "o").string()}, &out) == 0);
  CHECK(out.find("\"gamma\": 0.0") != std::string::npos);
  CHECK(out.find("remark") != std::string::npos);
}

TEST_CASE("check command") {
  const auto dir = scratch("check");
  const auto o = (dir / "o").string();
  CHECK(run({"--config", write_config(dir, kGood), "--cmd", "check", "--out", o}) == 0);
  CHECK(run({"--config", write_config(dir, R"({"model": {"d": 1, "epsilon": 0.05}, "schedule": {"a": 1.0, "L1": 20}})"),
             "--cmd", "check", "--out", o}) == 1);
  CHECK(run({"--config", write_config(dir, R"({"model": {"d": 1, "epsilon": 0.0}, "schedule": {"a": 0.1, "L1": 2}})"),
             "--cmd", "check", "--out", o}) == 2);
}

TEST_CASE("usage errors") {
  const auto dir = scratch("usage");
  CHECK(run({"--config", write_config(dir, "{not json"), "--cmd", "gamma"}) == 2);
  CHECK(run({"--cmd", "gamma"}) == 2);
  CHECK(run({"--config", write_config(dir, kTrunc), "--cmd", "bogus"}) == 2);
}

TEST_CASE("sample reruns are byte identical and replica ranges concatenate") {
  const auto dir = scratch("sample");
  const auto cfg = write_config(dir, kTrunc);
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  const auto p1 = (dir / "p1").string(), p2 = (dir / "p2").string();
  REQUIRE(run({"--config", cfg, "--cmd", "sample", "--replicas", "40", "--out", a}) == 0);
  REQUIRE(run({"--config", cfg, "--cmd", "sample", "--replicas", "40", "--out", b}) == 0);
  CHECK(slurp(fs::path(a) / "field.csv") == slurp(fs::path(b) / "field.csv"));
  CHECK(slurp(fs::path(a) / "coding_reports.csv") == slurp(fs::path(b) / "coding_reports.csv"));
  REQUIRE(run({"--config", cfg, "--cmd", "sample", "--replicas", "25", "--out", p1}) == 0);
  REQUIRE(run({"--config", cfg, "--cmd", "sample", "--replicas", "15", "--replica-start", "25", "--out", p2}) == 0);
  const std::string whole = slurp(fs::path(a) / "field.csv");
  const std::string first = slurp(fs::path(p1) / "field.csv");
  std::string second = slurp(fs::path(p2) / "field.csv");
  second = second.substr(second.find('\n') + 1);
  CHECK(first + second == whole);
  CHECK(whole.rfind("replica,x0,value,status\n", 0) == 0);
}

TEST_CASE("gaussian and approx commands") {
  const auto dir = scratch("gauss");
  const auto cfg = write_config(
      dir, R"({"model": {"d": 1, "epsilon": 0.05}, "schedule": {"a": 0.08, "L1": 4.0}, "window": [[0], [1]]})");
  std::string out;
  CHECK(run({"--config", cfg, "--cmd", "sample", "--replicas", "30", "--out", (dir / "s").string()}, &out) == 0);
  CHECK(out.find("\"gaussian\"") != std::string::npos);
  CHECK(run({"--config", cfg, "--cmd", "approx", "--l", "4", "--replicas", "200", "--out", (dir / "a").string()},
            &out) == 0);
  CHECK(out.find("\"coincidence_counterexamples\": 0") != std::string::npos);
  CHECK(run({"--config", cfg, "--cmd", "approx", "--out", (dir / "a").string()}) == 2);
}

TEST_CASE("radius and duality commands") {
  const auto dir = scratch("radius");
  const auto cfg = write_config(dir, kTrunc);
  std::string out;
  CHECK(run({"--config", cfg, "--cmd", "radius", "--replicas", "10000", "--out", (dir / "r").string()}, &out) == 0);
  CHECK(fs::exists(dir / "r" / "tail_curve.csv"));
  CHECK(run({"--config", cfg, "--cmd", "duality", "--replicas", "100", "--out", (dir / "d").string()}) == 2);
  CHECK(run({"--config", cfg, "--cmd", "duality", "--replicas", "10000", "--out", (dir / "d").string()}, &out) == 0);
  CHECK(out.find("\"pathwise_violations\": 0") != std::string::npos);
}

TEST_CASE("validate selects the duality suite and the negative control fails") {
  const auto dir = scratch("validate");
  std::string out;
  CHECK(run({"--cmd", "validate", "--only", "duality", "--scale", "0.1", "--out", (dir / "v").string()}, &out) == 0);
  CHECK(out.find("\"criterion\": 5") != std::string::npos);
  CHECK(out.find("\"criterion\": 1,") == std::string::npos);
  CHECK(run({"--cmd", "validate", "--only", "8", "--negative-control", "--scale", "0.1", "--out",
             (dir / "n").string()}) == 1);
  CHECK(run({"--cmd", "validate", "--only", "8", "--scale", "0.1", "--out", (dir / "n").string()}) == 0);
}
