#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmrf/lattice.hpp"
#include "gmrf/model.hpp"

namespace gmrf {

struct ExperimentConfig {
  ModelConfig model;
  std::int64_t budget = 10'000'000;
  double deltaFail = 1e-9;
  int l = 0;
  bool force = false;  // truncated sampling below the high-noise gate
  std::int64_t replicas = 100;
  std::int64_t replicaStart = 0;
  std::uint64_t seed = 20261015;
  std::string out = "out";
  std::vector<Site> window{Site{}};
  int torusSide = 8;
  double tau = -3.0;
  std::optional<double> dualityGamma;
};

// {"model": {d, epsilon, truncation}, "schedule": {a, L1},
//  "sampler": {budget, delta_fail, l, force}, "window": [[x0, ...], ...],
//  "replicas", "replica_start", "seed", "out", "duality": {side, tau, gamma}}
ExperimentConfig parse_experiment_config(const std::string& text);
nlohmann::ordered_json experiment_json(const ExperimentConfig& c);
// FNV-1a of the canonical JSON dump, hex
std::string config_hash(const ExperimentConfig& c);

// Replica r uses store seed masterSeed ^ splitmix64(r).
std::uint64_t replica_seed(std::uint64_t masterSeed, std::int64_t replica);

struct CliStreams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_gamma(const ExperimentConfig& c, CliStreams io);
int cmd_check(const ExperimentConfig& c, CliStreams io);
int cmd_sample(const ExperimentConfig& c, CliStreams io);
int cmd_radius(const ExperimentConfig& c, CliStreams io);
int cmd_duality(const ExperimentConfig& c, CliStreams io);
int cmd_approx(const ExperimentConfig& c, CliStreams io);

struct ValidateOptions {
  std::vector<int> only;  // empty runs every criterion
  bool negativeControl = false;
  double scale = 1.0;
};
int cmd_validate(const ExperimentConfig& c, const ValidateOptions& v, CliStreams io);

// Exit codes: 0 success, 1 a check or criterion failed, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gmrf
