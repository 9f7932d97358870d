#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gmrf/acceptance.hpp"
#include "gmrf/cli.hpp"
#include "gmrf/gaussian.hpp"
#include "gmrf/particles.hpp"
#include "gmrf/sampler.hpp"

namespace py = pybind11;
using namespace gmrf;

namespace {

Site to_site(const std::vector<int>& v) {
  if (v.empty() || v.size() > kMaxDim) throw std::invalid_argument("site must have 1 to 3 coordinates");
  Site s{};
  for (std::size_t k = 0; k < v.size(); ++k) s.x[k] = v[k];
  return s;
}

py::dict report_dict(const CodingReport& r) {
  py::dict d;
  d["radius"] = r.radius;
  d["marks"] = r.marksRevealed;
  d["depth"] = r.depth;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perfect sampling of Gaussian Markov random fields";

  m.def("gamma_truncated", [](double eps, double L) { return gamma_truncated(eps, L); }, py::arg("epsilon"),
        py::arg("L"));
  m.def("gamma_tilde", [](double eps, double L1) { return gamma_tilde(eps, L1); }, py::arg("epsilon"), py::arg("L1"));
  m.def(
      "covariance",
      [](double eps, int d, const std::vector<int>& i, const std::vector<int>& j) {
        return covariance(CovarianceQuery{eps, d, to_site(i), to_site(j)});
      },
      py::arg("epsilon"), py::arg("d"), py::arg("i"), py::arg("j"));

  py::class_<LevelSchedule>(m, "LevelSchedule")
      .def(py::init<int, double, double, double>(), py::arg("d"), py::arg("epsilon"), py::arg("a"), py::arg("L1"))
      .def("level_bound", &LevelSchedule::level_bound)
      .def("level_prob", &LevelSchedule::level_prob)
      .def("tail_prob", &LevelSchedule::tail_prob);

  py::class_<FlatCoupler>(m, "FlatCoupler")
      .def(py::init<double, double, int>(), py::arg("epsilon"), py::arg("L"), py::arg("d") = 1)
      .def_property_readonly("gamma", &FlatCoupler::gamma)
      .def("common_value", &FlatCoupler::common_value)
      .def("update", [](const FlatCoupler& c, const std::vector<double>& eta, double u) { return c.update(eta, u); });

  py::class_<StratifiedCoupler>(m, "StratifiedCoupler")
      .def(py::init<const LevelSchedule&>(), py::arg("schedule"))
      .def_property_readonly("gamma_tilde", &StratifiedCoupler::gamma_tilde)
      .def("update",
           [](const StratifiedCoupler& c, const std::vector<double>& eta, double u) { return c.update(eta, u); })
      .def("update_zero", &StratifiedCoupler::update_zero);

  m.def(
      "sample_truncated",
      [](std::uint64_t seed, double eps, double L, const std::vector<int>& site) {
        const Site s = to_site(site);
        const FlatCoupler c(eps, L, static_cast<int>(site.size()));
        MarkStore store(seed, static_cast<int>(site.size()));
        const auto d = sample_truncated(store, c, s);
        py::dict out;
        out["value"] = d.value ? py::cast(*d.value) : py::none();
        out["status"] = to_string(d.status);
        out["report"] = report_dict(d.report);
        return out;
      },
      py::arg("seed"), py::arg("epsilon"), py::arg("L"), py::arg("site") = std::vector<int>{0});

  m.def(
      "sample_gaussian",
      [](std::uint64_t seed, double eps, double a, double L1, const std::vector<int>& site, double deltaFail) {
        const int d = static_cast<int>(site.size());
        const StratifiedCoupler c(LevelSchedule(d, eps, a, L1));
        MarkStore store(seed, d);
        GaussianOptions o;
        o.deltaFail = deltaFail;
        const auto g = sample_gaussian(store, c, to_site(site), o);
        py::dict out;
        out["value"] = g.value ? py::cast(*g.value) : py::none();
        out["status"] = to_string(g.status);
        out["report"] = report_dict(g.report);
        out["cutset_size"] = g.cutsetSize;
        out["max_wet_depth"] = g.maxWetDepth;
        return out;
      },
      py::arg("seed"), py::arg("epsilon"), py::arg("a"), py::arg("L1"), py::arg("site") = std::vector<int>{0},
      py::arg("delta_fail") = 1e-9);

  m.def(
      "sample_l_dependent",
      [](std::uint64_t seed, double eps, double a, double L1, int l, const std::vector<int>& site) {
        const int d = static_cast<int>(site.size());
        const StratifiedCoupler c(LevelSchedule(d, eps, a, L1));
        MarkStore store(seed, d);
        return sample_l_dependent(store, c, to_site(site), l);
      },
      py::arg("seed"), py::arg("epsilon"), py::arg("a"), py::arg("L1"), py::arg("l"),
      py::arg("site") = std::vector<int>{0});

  m.def(
      "duality_check_binary",
      [](int side, double tau, double gamma, std::int64_t trials, std::uint64_t seed) {
        const auto r = duality_check_binary(TorusWindow(1, side), tau, gamma, trials, seed);
        py::dict out;
        out["p_omega"] = r.pOmega;
        out["p_sigma"] = r.pSigma;
        out["se"] = r.se;
        out["passes"] = r.passes;
        out["pathwise_violations"] = r.pathwiseViolations;
        return out;
      },
      py::arg("side"), py::arg("tau"), py::arg("gamma"), py::arg("trials"), py::arg("seed"));

  m.def(
      "check",
      [](int d, double eps, double a, double L1) {
        return check_all(LevelSchedule(d, eps, a, L1), ModelParams{d, eps, std::nullopt}).all();
      },
      py::arg("d"), py::arg("epsilon"), py::arg("a"), py::arg("L1"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"gmrf_cftp"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& s : full) argv.push_back(s.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
