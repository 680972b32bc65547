#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "steinlil/covariance.hpp"
#include "steinlil/distances.hpp"
#include "steinlil/error.hpp"
#include "steinlil/experiments.hpp"
#include "steinlil/hermite.hpp"
#include "steinlil/sampler.hpp"
#include "steinlil/stein.hpp"

namespace py = pybind11;
using namespace steinlil;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> flat(const Array& a) { return {a.data(), a.data() + a.size()}; }

// (m, d) array, or a 1-D array read as d = 1
PointCloud cloud(const Array& a) {
    if (a.ndim() == 1) return PointCloud(1, flat(a));
    if (a.ndim() != 2) throw DomainError("expected a 1-D or 2-D array of points");
    return PointCloud(static_cast<int>(a.shape(1)), flat(a));
}

std::string run_command(const std::string& command, const std::string& text) {
    const auto config = ExperimentConfig::from(KeyValueConfig::parse_string(text));
    py::gil_scoped_release release;
    if (command == "variance-table") return to_json(run_variance_table(config));
    if (command == "cross-cov") return to_json(run_cross_covariance_audit(config));
    if (command == "distance-decay") return to_json(run_distance_decay(config));
    if (command == "comparison") return to_json(run_comparison_check(config));
    if (command == "audit") return to_json(run_assumption_audit(config));
    if (command == "lil-trajectory") return to_json(run_lil_trajectory(config));
    throw DomainError("unknown experiment '" + command + "'");
}

}  // namespace

PYBIND11_MODULE(_steinlil, m) {
    m.doc() = "Native core of steinlil";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
    py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());
    py::register_exception<EmbeddingError>(m, "EmbeddingError", base.ptr());
    py::register_exception<CostCapError>(m, "CostCapError", base.ptr());
    py::register_exception<OverflowError>(m, "OverflowError", base.ptr());
    py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());

    py::class_<CovarianceModel>(m, "CovarianceModel")
        .def_static("fgn", &CovarianceModel::fgn, py::arg("hurst"))
        .def_static("white_noise", &CovarianceModel::white_noise)
        .def_static("explicit", &CovarianceModel::explicit_values, py::arg("values"),
                    py::arg("tail_exponent") = std::nullopt, py::arg("zero_beyond") = false)
        .def("rho", &CovarianceModel::rho, py::arg("k"))
        .def_property_readonly("id", &CovarianceModel::id)
        .def("__repr__", [](const CovarianceModel& c) { return "<CovarianceModel " + c.id() + ">"; });

    m.def("partial_sum_variance",
          [](const CovarianceModel& model, int q, std::uint64_t n) { return partial_sum_variance(model, ChaosOrder(q), n); },
          py::arg("model"), py::arg("q"), py::arg("n"));
    m.def(
        "breuer_major_sigma2",
        [](const CovarianceModel& model, int q, double tol) {
            const auto s = breuer_major_sigma2(model, ChaosOrder(q), tol);
            return py::dict(py::arg("value") = s.value, py::arg("coarse_value") = s.coarse_value,
                            py::arg("truncation") = s.truncation, py::arg("tail_bound") = s.tail_bound);
        },
        py::arg("model"), py::arg("q"), py::arg("tol") = 1e-10);
    m.def("critical_variance_constant", [](int q) { return critical_variance_constant(ChaosOrder(q)); }, py::arg("q"));
    m.def("critical_hurst", [](int q) { return critical_hurst(ChaosOrder(q)); }, py::arg("q"));
    m.def("hermite", py::vectorize(&hermite_eval), py::arg("q"), py::arg("x"));

    m.def(
        "sample_paths",
        [](const CovarianceModel& model, std::size_t n, std::uint64_t seed, std::size_t replicates, unsigned threads) {
            Array out({replicates, n});
            {
                py::gil_scoped_release release;
                const auto plan = build_plan(model, n);
                const auto ens = sample_ensemble(plan, seed, replicates, threads);
                double* dst = out.mutable_data();
                for (const auto& p : ens.paths) dst = std::copy(p.values.begin(), p.values.end(), dst);
            }
            return out;
        },
        py::arg("model"), py::arg("n"), py::arg("seed") = 1, py::arg("replicates") = 1, py::arg("threads") = 1);

    m.def(
        "carre_du_champ",
        [](const Array& path, int q, std::size_t n1, std::size_t n2, const CovarianceModel& model, double g) {
            const auto v = flat(path);
            return carre_du_champ(v, ChaosOrder(q), n1, n2, model, g).value;
        },
        py::arg("path"), py::arg("q"), py::arg("n1"), py::arg("n2"), py::arg("model"), py::arg("g"));
    m.def(
        "stein_factor",
        [](const std::string& law, double x) {
            if (law == "normal") return stein_factor_density(standard_normal_density(), x);
            if (law == "uniform") return stein_factor_density(uniform_density(), x);
            if (law == "laplace") return stein_factor_density(laplace_density(), x);
            throw DomainError("unknown law '" + law + "'");
        },
        py::arg("law"), py::arg("x"));

    py::class_<DistanceReport>(m, "DistanceReport")
        .def_property_readonly("kind", [](const DistanceReport& r) { return to_string(r.kind); })
        .def_readonly("value", &DistanceReport::value)
        .def_readonly("d", &DistanceReport::d)
        .def_readonly("m", &DistanceReport::m)
        .def_readonly("std_error", &DistanceReport::std_error)
        .def_readonly("exact", &DistanceReport::exact)
        .def("__float__", [](const DistanceReport& r) { return r.value; })
        .def("__repr__", [](const DistanceReport& r) { return "<DistanceReport " + to_json(r) + ">"; });

    m.def("kolmogorov_vs_gaussian", [](const Array& x) {
        if (x.ndim() == 1) return kolmogorov_1d_vs_gaussian(flat(x));
        return kolmogorov_multid_vs_gaussian(cloud(x));
    }, py::arg("x"));
    m.def("kolmogorov_two_sample", [](const Array& x, const Array& y) { return kolmogorov_multid(cloud(x), cloud(y)); },
          py::arg("x"), py::arg("y"));
    m.def("wasserstein_sorted", [](const Array& a, const Array& b, double theta) {
        return wasserstein_sorted(flat(a), flat(b), theta);
    }, py::arg("a"), py::arg("b"), py::arg("theta") = 1.0);
    m.def("wasserstein_assignment", [](const Array& a, const Array& b) { return wasserstein_assignment(cloud(a), cloud(b)); },
          py::arg("a"), py::arg("b"));

    m.def("comparison_rhs", &comparison_rhs, py::arg("d"), py::arg("w1"));
    m.def("theta_bound_sequence", &theta_bound_sequence, py::arg("dmax"));
    m.def("stein_w1_bound", &stein_w1_bound, py::arg("second_moment_sum"));

    m.def("_run", &run_command, py::arg("command"), py::arg("config"));
}
