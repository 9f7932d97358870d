// One line per acceptance criterion; exits nonzero if any fails.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "gmrf/acceptance.hpp"

int main(int argc, char** argv) {
  gmrf::AcceptanceOptions opt;
  opt.outDir = argc > 1 ? argv[1] : "acceptance_out";
  if (const char* s = std::getenv("GMRF_ACCEPTANCE_SCALE")) opt.scale = std::atof(s);
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  bool ok = true;
  for (int id = 1; id <= 9; ++id) {
    const auto r = gmrf::run_criterion(id, opt);
    ok = ok && r.passes;
    std::printf("criterion %d: %s  %s  (%.1f s, limit %.0f s)\n", id, r.passes ? "PASS" : "FAIL", r.title.c_str(),
                r.seconds, r.limitSeconds);
    std::fflush(stdout);
    all.push_back(gmrf::to_json(r));
  }
  std::filesystem::create_directories(opt.outDir);
  std::ofstream(std::filesystem::path(opt.outDir) / "acceptance.json") << all.dump(2) << "\n";
  return ok ? 0 : 1;
}
