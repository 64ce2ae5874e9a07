#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hwdse/cli.hpp"
#include "hwdse/error.hpp"
#include "hwdse/gp.hpp"
#include "hwdse/kernel.hpp"
#include "hwdse/pareto.hpp"
#include "hwdse/regression.hpp"
#include "hwdse/transfer.hpp"

namespace py = pybind11;
using namespace hwdse;

namespace {

RegressionDataset to_regression(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    RegressionDataset d;
    const auto p = X.empty() ? 0 : X.front().size();
    d.features.resize(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(p));
    d.targets.resize(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != p) raise(ErrorCategory::Argument, "ragged feature rows");
        for (std::size_t j = 0; j < p; ++j) d.features(i, j) = X[i][j];
    }
    for (std::size_t i = 0; i < y.size(); ++i) d.targets(i) = y[i];
    for (std::size_t j = 0; j < p; ++j) d.feature_names.push_back("x" + std::to_string(j + 1));
    return d;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gaussian-process design-space exploration toolkit";

    // Messages read "<category>: <text>".
    static PyObject* error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto text = std::string(category_name(e.category())) + ": " + e.what();
            PyErr_SetString(error_type, text.c_str());
        }
    });

    m.def("exit_code_for", [](const std::string& category) {
        for (int c = 0; c <= static_cast<int>(ErrorCategory::UndefinedNormalization); ++c)
            if (category_name(static_cast<ErrorCategory>(c)) == category) return exit_code(static_cast<ErrorCategory>(c));
        raise(ErrorCategory::Argument, "unknown error category '" + category + "'");
    });

    m.def(
        "kernel_eval",
        [](const std::string& name, const std::vector<double>& a, const std::vector<double>& b, double length_scale) {
            return kernel_eval(parse_kernel_name(name, length_scale), a, b);
        },
        py::arg("kernel"), py::arg("a"), py::arg("b"), py::arg("length_scale") = 1.0);

    py::class_<GPModel>(m, "GPModel")
        .def_property_readonly("kernel", [](const GPModel& g) { return kernel_name(g.kernel()); })
        .def_property_readonly("length_scale", [](const GPModel& g) { return g.kernel().length_scale; })
        .def_property_readonly("noise_variance", &GPModel::noise_variance)
        .def_property_readonly("jitter", &GPModel::jitter)
        .def_property_readonly("name", &GPModel::name)
        .def_property_readonly("direction", [](const GPModel& g) { return to_string(g.direction()); })
        .def_property_readonly("inputs", &GPModel::inputs)
        .def_property_readonly("targets", &GPModel::targets)
        .def("__len__", &GPModel::size)
        .def("posterior",
             [](const GPModel& g, const std::vector<ParameterVector>& q) {
                 auto p = g.posterior(q);
                 return py::make_tuple(p.means, p.variances);
             })
        .def("save", [](const GPModel& g, const std::filesystem::path& path) { save_gp(g, path); });

    m.def(
        "fit_gp",
        [](const std::vector<ParameterVector>& X, const std::vector<double>& y, const std::string& kernel,
           double length_scale, double noise_variance, const std::string& direction,
           std::optional<std::pair<std::vector<double>, std::vector<double>>> bounds, const std::string& name) {
            const auto k = parse_kernel_name(kernel, length_scale);
            const InputBounds box = bounds ? InputBounds{bounds->first, bounds->second} : InputBounds::from_points(X);
            return fit_gp(X, y, k, noise_variance, parse_direction(direction), box, name);
        },
        py::arg("X"), py::arg("y"), py::arg("kernel") = "se", py::arg("length_scale") = 1.0,
        py::arg("noise_variance") = kDefaultNoiseVariance, py::arg("direction") = "maximize",
        py::arg("bounds") = py::none(), py::arg("name") = "");
    m.def("load_gp", &load_gp, py::arg("path"));

    m.def(
        "pareto_frontier",
        [](const std::vector<std::vector<double>>& values, const std::vector<std::string>& directions) {
            std::vector<Direction> dirs;
            for (const auto& d : directions) dirs.push_back(parse_direction(d));
            std::vector<ObjectivePoint> pts;
            for (std::size_t i = 0; i < values.size(); ++i)
                pts.push_back({{static_cast<double>(i)}, values[i], Provenance::Evaluated});
            std::vector<std::size_t> idx;
            for (const auto& p : pareto_frontier(pts, dirs)) idx.push_back(static_cast<std::size_t>(p.params[0]));
            return idx;
        },
        py::arg("values"), py::arg("directions"), "Row indices of the frontier, sorted by objective values.");

    m.def(
        "task_correlation",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto c = task_correlation(a, b);
            return py::make_tuple(c.rho, c.pvalue);
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "fit_linear",
        [](const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
            const auto lm = fit_linear(to_regression(X, y));
            return py::make_tuple(lm.intercept, to_vector(lm.coefficients));
        },
        py::arg("X"), py::arg("y"));

    m.def(
        "fit_lasso_path",
        [](const std::vector<std::vector<double>>& X, const std::vector<double>& y, int n_lambdas) {
            const auto path = fit_lasso_path(to_regression(X, y), n_lambdas);
            std::vector<std::vector<double>> coefs;
            for (Eigen::Index g = 0; g < path.coefficients.rows(); ++g)
                coefs.push_back(to_vector(path.coefficients.row(g).transpose()));
            py::dict out;
            out["lambdas"] = path.lambdas;
            out["coefficients"] = coefs;
            out["intercepts"] = path.intercepts;
            out["collapse_order"] = path.collapse_order;
            out["lambda_max"] = path.lambda_max;
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("n_lambdas") = kDefaultLassoLambdas);

    m.def(
        "normalized_rmse",
        [](const std::vector<double>& pred, const std::vector<double>& actual) { return normalized_rmse(pred, actual); },
        py::arg("predictions"), py::arg("actuals"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}
