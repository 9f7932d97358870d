#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmrf/gaussian.hpp"
#include "gmrf/model.hpp"
#include "gmrf/sampler.hpp"

namespace gmrf {

struct AcceptanceOptions {
  std::uint64_t seed = 20261015;
  std::string outDir;            // sample files are written here when set
  bool negativeControl = false;  // run the coupler suite on the quantile-only coupler
  double scale = 1.0;            // sample-size multiplier for quick runs
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passes = false;
  double seconds = 0.0;
  double limitSeconds = 0.0;
  nlohmann::ordered_json details;
};

nlohmann::ordered_json to_json(const CriterionResult& r);

CriterionResult run_criterion(int id, const AcceptanceOptions& options);
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& options);

// Hypothesis matrix printed by the check command.
struct CheckMatrix {
  bool h1 = false;  // informational
  bool h2 = false;
  bool h3 = false;
  bool growth = false;
  bool h4 = false;
  int h2FirstFailure = 0;
  H1Report h1Report;
  H3Report h3Report;
  GrowthReport growthReport;
  H4Report h4Report;
  bool all() const { return h2 && h3 && growth && h4; }
};

CheckMatrix check_all(const LevelSchedule& schedule, const ModelParams& params);
nlohmann::ordered_json to_json(const CheckMatrix& m);

// Sample batches shared by the exactness and determinism checks. The CSV
// text is the byte-level output that reruns must reproduce.
struct SampleBatch {
  std::vector<FieldSample> samples;
  std::string csv;
  std::uint64_t hash = 0;
};

SampleBatch truncated_window_batch(std::uint64_t seed, std::int64_t n, unsigned workers);
SampleBatch gaussian_window_batch(std::uint64_t seed, std::int64_t n, unsigned workers);

}  // namespace gmrf
