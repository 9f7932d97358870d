#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gmrf/coupling.hpp"
#include "gmrf/marks.hpp"

namespace gmrf {

struct CodingReport {
  std::int64_t radius = 0;
  std::int64_t marksRevealed = 0;
  int depth = 0;
};

struct DrynessCertificate {
  int certDepth = 0;
  double residual = 0.0;
  std::size_t marksCertified = 0;
};

enum class SampleStatus { kOk, kBudgetExceeded, kDepthExceeded };
const char* to_string(SampleStatus s);

// Values are intrinsic to marks for the exact samplers, so one cache may be
// shared by every query against the same store.
using MarkValueCache = std::unordered_map<MarkKey, double>;

struct TruncatedOptions {
  std::int64_t budget = 10'000'000;  // marks revealed per query
  bool force = false;                // run below the high-noise gate
};

struct TruncatedDraw {
  std::optional<double> value;
  CodingReport report;
  SampleStatus status = SampleStatus::kOk;
  std::string diagnostic;
};

TruncatedDraw sample_truncated(MarkStore& store, const FlatCoupler& coupler, const Site& site,
                               const TruncatedOptions& options = {}, MarkValueCache* cache = nullptr);

struct GaussianOptions {
  double deltaFail = 1e-9;
  std::int64_t budget = 10'000'000;
  int maxDepth = 64;
};

struct GaussianDraw {
  std::optional<double> value;
  CodingReport report;
  DrynessCertificate certificate;
  SampleStatus status = SampleStatus::kOk;
  std::string diagnostic;
  std::size_t cutsetSize = 0;
  std::size_t wetCount = 0;
  int maxWetDepth = -1;     // largest root distance of a wet mark above the cutset
  int maxCutsetDepth = 0;
  int longestWetPath = 0;   // marks on the longest all-wet path starting at the root
};

// Sum over k >= D of |B|^k (1 - q_k)
double dryness_tail(const LevelSchedule& schedule, int bSize, int D);

GaussianDraw sample_gaussian(MarkStore& store, const StratifiedCoupler& coupler, const Site& site,
                             const GaussianOptions& options = {}, MarkValueCache* cache = nullptr);

double sample_l_dependent(MarkStore& store, const StratifiedCoupler& coupler, const Site& site, int l,
                          std::size_t nodeCap = 10'000'000);

struct FieldSample {
  int d = 1;
  std::vector<Site> window;
  std::vector<double> values;
  std::vector<CodingReport> reports;
  std::uint64_t seed = 0;
  std::int64_t marksRevealed = 0;
  int maxDepth = 0;
  SampleStatus status = SampleStatus::kOk;
};

enum class SampleMode { kTruncated, kGaussian, kLDependent };

struct WindowOptions {
  SampleMode mode = SampleMode::kTruncated;
  TruncatedOptions truncated;
  GaussianOptions gaussian;
  int l = 0;
  bool shareCache = true;
};

FieldSample sample_window(MarkStore& store, const std::vector<Site>& window, const WindowOptions& options,
                          const FlatCoupler* flat, const StratifiedCoupler* stratified);

void write_field_csv(std::ostream& os, const FieldSample& s);
std::string field_json(const FieldSample& s);
void write_coding_reports_csv(std::ostream& os, const std::vector<std::int64_t>& replicas,
                              const std::vector<CodingReport>& reports);

}  // namespace gmrf
