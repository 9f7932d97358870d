#include "gmrf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "gmrf/acceptance.hpp"
#include "gmrf/gaussian.hpp"
#include "gmrf/hash.hpp"
#include "gmrf/parallel.hpp"
#include "gmrf/particles.hpp"
#include "gmrf/philox.hpp"
#include "gmrf/sampler.hpp"
#include "gmrf/stats.hpp"

namespace gmrf {

using ojson = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string coords(const Site& s, int d) {
  std::string r;
  for (int k = 0; k < d; ++k) r += std::to_string(s.x[k]) + ",";
  return r;
}

std::string coord_header(int d) {
  std::string r;
  for (int k = 0; k < d; ++k) r += "x" + std::to_string(k) + ",";
  return r;
}

std::filesystem::path out_path(const ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return std::filesystem::path(c.out) / name;
}

void write_text(const ExperimentConfig& c, const std::string& name, const std::string& text) {
  std::ofstream f(out_path(c, name), std::ios::binary);
  f << text;
}

void emit_json(const ExperimentConfig& c, const std::string& name, ojson j, CliStreams io) {
  j["config_hash"] = config_hash(c);
  const std::string text = j.dump(2) + "\n";
  write_text(c, name, text);
  io.out << text;
}

LevelSchedule require_schedule(const ExperimentConfig& c) {
  if (!c.model.a || !c.model.L1) throw UsageError("this command needs a schedule (a, L1) in the config");
  return *c.model.schedule();
}

}  // namespace

std::uint64_t replica_seed(std::uint64_t masterSeed, std::int64_t replica) {
  return trial_seed(masterSeed, static_cast<std::uint64_t>(replica));
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ExperimentConfig c;
  nlohmann::json m = j.at("model");
  if (j.contains("schedule") && !j["schedule"].is_null()) {
    const auto& s = j["schedule"];
    if (s.contains("a")) m["a"] = s["a"];
    if (s.contains("L1")) m["L1"] = s["L1"];
  }
  c.model = parse_model_config(m.dump());
  if (j.contains("sampler")) {
    const auto& s = j["sampler"];
    c.budget = s.value("budget", c.budget);
    c.deltaFail = s.value("delta_fail", c.deltaFail);
    c.l = s.value("l", c.l);
    c.force = s.value("force", c.force);
  }
  c.replicas = j.value("replicas", c.replicas);
  c.replicaStart = j.value("replica_start", c.replicaStart);
  c.seed = j.value("seed", c.seed);
  c.out = j.value("out", c.out);
  if (j.contains("window")) {
    c.window.clear();
    for (const auto& w : j["window"]) {
      if (static_cast<int>(w.size()) != c.model.params.d) throw std::invalid_argument("window site has wrong dimension");
      Site s{};
      for (int k = 0; k < c.model.params.d; ++k) s.x[k] = w[k].get<int>();
      c.window.push_back(s);
    }
    if (c.window.empty()) throw std::invalid_argument("window is empty");
  }
  if (j.contains("duality")) {
    const auto& du = j["duality"];
    c.torusSide = du.value("side", c.torusSide);
    c.tau = du.value("tau", c.tau);
    if (du.contains("gamma") && !du["gamma"].is_null()) c.dualityGamma = du["gamma"].get<double>();
  }
  return c;
}

ojson experiment_json(const ExperimentConfig& c) {
  const int d = c.model.params.d;
  ojson window = ojson::array();
  for (const Site& s : c.window) {
    ojson p = ojson::array();
    for (int k = 0; k < d; ++k) p.push_back(s.x[k]);
    window.push_back(p);
  }
  auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(); };
  return {{"model", {{"d", d}, {"epsilon", c.model.params.epsilon}, {"truncation", opt(c.model.params.truncation)}}},
          {"schedule", {{"a", opt(c.model.a)}, {"L1", opt(c.model.L1)}}},
          {"sampler", {{"budget", c.budget}, {"delta_fail", c.deltaFail}, {"l", c.l}, {"force", c.force}}},
          {"window", window},
          {"replicas", c.replicas},
          {"replica_start", c.replicaStart},
          {"seed", c.seed},
          {"out", c.out},
          {"duality", {{"side", c.torusSide}, {"tau", c.tau}, {"gamma", opt(c.dualityGamma)}}}};
}

std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a64(experiment_json(c).dump())); }

int cmd_gamma(const ExperimentConfig& c, CliStreams io) {
  const auto& p = c.model.params;
  const double gate = 1.0 - 1.0 / (2.0 * p.d);
  ojson j;
  j["d"] = p.d;
  j["epsilon"] = p.epsilon;
  j["gate_threshold"] = gate;
  if (p.truncated()) {
    const double g = gamma_truncated(p.epsilon, *p.truncation);
    j["truncation"] = *p.truncation;
    j["gamma"] = g;
    j["gate_passes"] = g > gate;
  } else {
    j["truncation"] = nullptr;
    j["gamma"] = gamma_unbounded(p.epsilon);
    j["gate_passes"] = p.epsilon == 0.0;
    j["remark"] = p.epsilon == 0.0
                      ? "epsilon = 0: the field is i.i.d. and every update coalesces"
                      : "gamma is 0 for the unbounded Gaussian model; use the stratified sampler with a schedule";
  }
  if (c.model.a && c.model.L1 && p.epsilon != 0.0) {
    const LevelSchedule s = *c.model.schedule();
    j["gamma_tilde"] = gamma_tilde(p.epsilon, s.L1());
    j["q0"] = s.level_prob(0);
  }
  emit_json(c, "gamma.json", j, io);
  return 0;
}

int cmd_check(const ExperimentConfig& c, CliStreams io) {
  if (c.model.params.epsilon == 0.0)
    throw UsageError(
        "epsilon = 0 gives an i.i.d. field; no schedule is needed, sample it directly (cmd sample with a truncation, "
        "or independent N(0,1) draws)");
  const LevelSchedule s = require_schedule(c);
  const CheckMatrix m = check_all(s, c.model.params);
  ojson j = to_json(m);
  emit_json(c, "check.json", j, io);
  return m.all() ? 0 : 1;
}

namespace {

struct ReplicaOut {
  FieldSample sample;
  std::string error;
};

}  // namespace

int cmd_sample(const ExperimentConfig& c, CliStreams io) {
  const auto& p = c.model.params;
  const int d = p.d;
  std::optional<FlatCoupler> flat;
  std::optional<StratifiedCoupler> strat;
  WindowOptions wo;
  wo.truncated.budget = c.budget;
  wo.truncated.force = c.force;
  wo.gaussian.budget = c.budget;
  wo.gaussian.deltaFail = c.deltaFail;
  wo.l = c.l;
  std::string mode;
  if (p.truncated()) {
    flat.emplace(p.epsilon, *p.truncation, d);
    if (!c.force && flat->gamma() <= 1.0 - 1.0 / (2.0 * d))
      throw UsageError("high-noise gate fails for this model (gamma = " + fmt(flat->gamma()) +
                       "); set sampler.force to run anyway");
    wo.mode = SampleMode::kTruncated;
    mode = "truncated";
  } else {
    if (p.epsilon == 0.0) {
      strat.emplace(LevelSchedule(d, 0.0, c.model.a.value_or(0.5), c.model.L1.value_or(1.0)));
    } else {
      strat.emplace(require_schedule(c));
    }
    wo.mode = c.l > 0 ? SampleMode::kLDependent : SampleMode::kGaussian;
    mode = c.l > 0 ? "l-dependent" : "gaussian";
  }
  std::vector<ReplicaOut> res(static_cast<std::size_t>(c.replicas));
  parallel_for(0, c.replicas, [&](std::int64_t k) {
    const std::int64_t r = c.replicaStart + k;
    MarkStore store(replica_seed(c.seed, r), d);
    try {
      res[k].sample = sample_window(store, c.window, wo, flat ? &*flat : nullptr, strat ? &*strat : nullptr);
    } catch (const std::exception& e) {
      res[k].error = e.what();
    }
  });
  std::ostringstream field, reports;
  field << "replica," << coord_header(d) << "value,status\n";
  reports << "replica," << coord_header(d) << "radius,depth,marks\n";
  std::map<std::string, std::int64_t> statusCount;
  for (std::int64_t k = 0; k < c.replicas; ++k) {
    const std::int64_t r = c.replicaStart + k;
    const auto& o = res[k];
    const std::string status = o.error.empty() ? to_string(o.sample.status) : "error";
    ++statusCount[status];
    for (std::size_t w = 0; w < c.window.size(); ++w) {
      const double v = o.error.empty() ? o.sample.values[w] : std::nan("");
      field << r << ',' << coords(c.window[w], d) << fmt(v) << ',' << status << '\n';
      if (o.error.empty() && w < o.sample.reports.size()) {
        const auto& rep = o.sample.reports[w];
        reports << r << ',' << coords(c.window[w], d) << rep.radius << ',' << rep.depth << ',' << rep.marksRevealed
                << '\n';
      }
    }
  }
  write_text(c, "field.csv", field.str());
  write_text(c, "coding_reports.csv", reports.str());
  ojson j;
  j["mode"] = mode;
  j["replica_start"] = c.replicaStart;
  j["replicas"] = c.replicas;
  j["status"] = statusCount;
  j["field_hash"] = hex64(fnv1a64(field.str()));
  j["reports_hash"] = hex64(fnv1a64(reports.str()));
  for (const auto& o : res)
    if (!o.error.empty()) {
      j["first_error"] = o.error;
      break;
    }
  emit_json(c, "sample.json", j, io);
  return 0;
}

int cmd_radius(const ExperimentConfig& c, CliStreams io) {
  const auto& p = c.model.params;
  if (!p.truncated()) throw UsageError("radius needs a truncated model");
  const FlatCoupler coupler(p.epsilon, *p.truncation, p.d);
  TruncatedOptions to;
  to.budget = c.budget;
  to.force = c.force;
  std::vector<TruncatedDraw> draws(static_cast<std::size_t>(c.replicas));
  parallel_for(0, c.replicas, [&](std::int64_t k) {
    MarkStore store(replica_seed(c.seed, c.replicaStart + k), p.d);
    draws[k] = sample_truncated(store, coupler, Site{}, to);
  });
  std::ostringstream csv;
  csv << "replica,radius,depth,marks,status\n";
  std::vector<int> depths;
  for (std::int64_t k = 0; k < c.replicas; ++k) {
    const auto& dr = draws[k];
    csv << c.replicaStart + k << ',' << dr.report.radius << ',' << dr.report.depth << ',' << dr.report.marksRevealed
        << ',' << to_string(dr.status) << '\n';
    depths.push_back(dr.report.depth);
  }
  write_text(c, "radius.csv", csv.str());
  ojson j;
  j["gamma"] = coupler.gamma();
  j["replicas"] = c.replicas;
  if (c.replicas >= 10000) {
    const TailCurve curve = tail_curve(depths, coupler.gamma(), static_cast<int>(NeighborhoodSpec(p.d).size()));
    std::ostringstream tc;
    write_tail_csv(tc, curve);
    write_text(c, "tail_curve.csv", tc.str());
    j["tail_curve"] = to_json(curve);
  } else {
    j["tail_curve"] = nullptr;
    j["remark"] = "tail curve needs at least 1e4 replicas";
  }
  emit_json(c, "radius.json", j, io);
  return 0;
}

int cmd_duality(const ExperimentConfig& c, CliStreams io) {
  const auto& p = c.model.params;
  if (c.replicas < 10000) throw UsageError("duality needs --replicas >= 10000");
  const TorusWindow w(p.d, c.torusSide);
  double gamma = 0;
  if (c.dualityGamma)
    gamma = *c.dualityGamma;
  else if (p.truncated())
    gamma = FlatCoupler(p.epsilon, *p.truncation, p.d).gamma();
  else
    throw UsageError("duality needs duality.gamma or a truncated model");
  const DualityReport bin = duality_check_binary(w, c.tau, gamma, c.replicas, c.seed);
  auto js = [](const DualityReport& r) {
    return ojson{{"p_omega", r.pOmega},
                 {"p_sigma", r.pSigma},
                 {"se", r.se},
                 {"trials", r.trials},
                 {"event_mismatches", r.eventMismatches},
                 {"pathwise_violations", r.pathwiseViolations},
                 {"passes", r.passes}};
  };
  ojson j;
  j["side"] = c.torusSide;
  j["tau"] = c.tau;
  j["gamma"] = gamma;
  j["binary"] = js(bin);
  bool ok = bin.passes;
  if (c.model.a && c.model.L1 && p.epsilon != 0.0) {
    const DualityReport lev = duality_check_level(w, c.tau, std::vector<int>(w.size(), 1), *c.model.schedule(),
                                                  c.replicas, c.seed ^ 0x6c6576ull);
    j["level"] = js(lev);
    ok = ok && lev.passes;
  }
  emit_json(c, "duality.json", j, io);
  return ok ? 0 : 1;
}

int cmd_approx(const ExperimentConfig& c, CliStreams io) {
  if (c.l <= 0) throw UsageError("approx needs --l > 0");
  const StratifiedCoupler coupler(require_schedule(c));
  const int d = c.model.params.d;
  GaussianOptions go;
  go.budget = c.budget;
  go.deltaFail = c.deltaFail;
  struct Row {
    GaussianDraw x;
    double y = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(c.replicas));
  parallel_for(0, c.replicas, [&](std::int64_t k) {
    MarkStore store(replica_seed(c.seed, c.replicaStart + k), d);
    MarkValueCache cache;
    rows[k].x = sample_gaussian(store, coupler, Site{}, go, &cache);
    rows[k].y = sample_l_dependent(store, coupler, Site{}, c.l);
  });
  std::ostringstream csv;
  csv << "replica,x,y,max_wet_depth,equal\n";
  std::int64_t differ = 0, events = 0, counter = 0, failures = 0;
  for (std::int64_t k = 0; k < c.replicas; ++k) {
    const auto& r = rows[k];
    if (!r.x.value) {
      ++failures;
      continue;
    }
    const bool eq = *r.x.value == r.y;
    differ += !eq;
    if (r.x.maxWetDepth < c.l / 2) {
      ++events;
      counter += !eq;
    }
    csv << c.replicaStart + k << ',' << fmt(*r.x.value) << ',' << fmt(r.y) << ',' << r.x.maxWetDepth << ','
        << (eq ? 1 : 0) << '\n';
  }
  write_text(c, "approx.csv", csv.str());
  const std::int64_t ok = c.replicas - failures;
  ojson j;
  j["l"] = c.l;
  j["replicas"] = c.replicas;
  j["failures"] = failures;
  j["p_differ"] = ok > 0 ? static_cast<double>(differ) / ok : 0.0;
  j["coincidence_events"] = events;
  j["coincidence_counterexamples"] = counter;
  emit_json(c, "approx.json", j, io);
  return counter == 0 ? 0 : 1;
}

int cmd_validate(const ExperimentConfig& c, const ValidateOptions& v, CliStreams io) {
  AcceptanceOptions opt;
  opt.seed = c.seed;
  opt.outDir = c.out;
  opt.negativeControl = v.negativeControl;
  opt.scale = v.scale;
  std::vector<int> ids = v.only;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  ojson verdicts = ojson::array();
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, opt);
    all = all && r.passes;
    io.err << "criterion " << id << ": " << (r.passes ? "PASS" : "FAIL") << " (" << r.title << ", "
           << fmt(r.seconds) << " s)\n";
    verdicts.push_back(to_json(r));
  }
  ojson j;
  j["negative_control"] = v.negativeControl;
  j["all_pass"] = all;
  j["criteria"] = verdicts;
  emit_json(c, "validate.json", j, io);
  return all ? 0 : 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perfect sampling of Gaussian Markov random fields by coupling from the past"};
  std::string configPath, cmd, only;
  std::optional<std::int64_t> replicas, replicaStart, budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> outDir;
  std::optional<double> deltaFail;
  std::optional<int> l;
  bool negative = false;
  double scale = 1.0;
  app.add_option("--config", configPath, "experiment config (JSON)");
  app.add_option("--cmd", cmd, "subcommand")
      ->required()
      ->check(CLI::IsMember({"gamma", "check", "sample", "radius", "duality", "approx", "validate"}));
  app.add_option("--replicas", replicas, "number of replicas");
  app.add_option("--replica-start", replicaStart, "first replica index");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", outDir, "output directory");
  app.add_option("--budget", budget, "mark budget per query");
  app.add_option("--delta-fail", deltaFail, "failure probability bound of the unbounded sampler");
  app.add_option("--l", l, "dependence range of the approximation");
  app.add_option("--only", only, "validate: comma-separated criteria, or 'duality'");
  app.add_flag("--negative-control", negative, "validate: run the coupler suite on the quantile-only coupler");
  app.add_option("--scale", scale, "validate: sample-size multiplier");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig c;
    if (!configPath.empty()) {
      std::ifstream f(configPath);
      if (!f) throw UsageError("cannot read config " + configPath);
      std::stringstream ss;
      ss << f.rdbuf();
      c = parse_experiment_config(ss.str());
    } else if (cmd != "validate") {
      throw UsageError("--config is required for " + cmd);
    } else {
      c.model.params = ModelParams{1, 0.05, std::nullopt};
    }
    if (replicas) c.replicas = *replicas;
    if (replicaStart) c.replicaStart = *replicaStart;
    if (seed) c.seed = *seed;
    if (outDir) c.out = *outDir;
    if (budget) c.budget = *budget;
    if (deltaFail) c.deltaFail = *deltaFail;
    if (l) c.l = *l;
    if (c.replicas < 1 || c.replicaStart < 0) throw UsageError("replica range must be non-empty");
    const CliStreams io{out, err};
    if (cmd == "gamma") return cmd_gamma(c, io);
    if (cmd == "check") return cmd_check(c, io);
    if (cmd == "sample") return cmd_sample(c, io);
    if (cmd == "radius") return cmd_radius(c, io);
    if (cmd == "duality") return cmd_duality(c, io);
    if (cmd == "approx") return cmd_approx(c, io);
    ValidateOptions v;
    v.negativeControl = negative;
    v.scale = scale;
    if (only == "duality") {
      v.only = {5};
    } else if (!only.empty()) {
      std::stringstream ss(only);
      for (std::string tok; std::getline(ss, tok, ',');) v.only.push_back(std::stoi(tok));
    }
    return cmd_validate(c, v, io);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: malformed config: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gmrf
