#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dtcm/errors.hpp"
#include "dtcm/expansion.hpp"
#include "dtcm/oracle.hpp"
#include "dtcm/study.hpp"

namespace py = pybind11;
using namespace dtcm;

namespace {

// Models are immutable; a small handle keeps the const pointer semantics.
struct PyModel {
    ModelPtr ptr;
    const CoefficientModel& ref() const { return *ptr; }
};

GridFn grid_from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> values,
                       double origin, double h) {
    if (values.ndim() != 1) throw StructuralError("values must be a 1D array");
    GridFn g = GridFn::make({origin}, h, {static_cast<int>(values.shape(0))});
    std::copy(values.data(), values.data() + values.shape(0), g.values.begin());
    return g;
}

py::array_t<double> grid_to_numpy(const GridFn& g) {
    py::array_t<double> out(static_cast<py::ssize_t>(g.values.size()));
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_dtcm, mod) {
    mod.doc() = "Dyson-Taylor commutator approximations of parabolic Green functions";

    py::register_exception<StructuralError>(mod, "StructuralError", PyExc_ValueError);
    py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
    py::register_exception<OrderError>(mod, "OrderError", PyExc_ValueError);
    py::register_exception<NilpotencyError>(mod, "NilpotencyError", PyExc_ArithmeticError);
    py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);

    py::class_<PyModel>(mod, "Model")
        .def_property_readonly("dim", [](const PyModel& m) { return m.ref().dim(); })
        .def_property_readonly("gamma", [](const PyModel& m) { return m.ref().gamma(); })
        .def_property_readonly("id", [](const PyModel& m) { return m.ref().id(); })
        .def_property_readonly("time_dependent",
                               [](const PyModel& m) { return m.ref().time_dependent(); })
        .def("a",
             [](const PyModel& m, int i, int j, int k, DerivIndex beta, double t,
                std::vector<double> x) { return m.ref().a(i, j, k, beta, t, x); })
        .def("b",
             [](const PyModel& m, int i, int k, DerivIndex beta, double t,
                std::vector<double> x) { return m.ref().b(i, k, beta, t, x); })
        .def("c", [](const PyModel& m, int k, DerivIndex beta, double t,
                     std::vector<double> x) { return m.ref().c(k, beta, t, x); });

    mod.def(
        "builtin",
        [](const std::string& id, const std::map<std::string, double>& params) {
            return PyModel{builtin(id, params)};
        },
        py::arg("id"), py::arg("params") = std::map<std::string, double>{});
    mod.def("from_spec", [](const std::string& text) { return PyModel{from_spec(text)}; },
            py::arg("json_text"));
    mod.def("from_spec_file",
            [](const std::string& path) { return PyModel{from_spec_file(path)}; },
            py::arg("path"));

    mod.def(
        "eval_kernel",
        [](const PyModel& model, int m, const std::string& zp, double t0, double t,
           std::vector<double> x, std::vector<double> y) {
            ExpansionCache cache;
            return eval_kernel(model.ref(), m, ZPolicy::parse(zp), t0, t, x, y, cache);
        },
        py::arg("model"), py::arg("m"), py::arg("z_policy"), py::arg("t0"), py::arg("t"),
        py::arg("x"), py::arg("y"));

    mod.def(
        "exact_kernel",
        [](const std::string& id, const std::map<std::string, double>& params, double t0,
           double t, std::vector<double> x, std::vector<double> y) {
            return exact_kernel(id, params, t0, t, x, y);
        },
        py::arg("id"), py::arg("params"), py::arg("t0"), py::arg("t"), py::arg("x"),
        py::arg("y"));

    mod.def(
        "lambda_ell_repr",
        [](const PyModel& model, std::vector<double> z, double t_base, int ell, int cap_k) {
            TaylorFamily fam = taylor_terms(model.ref(), z, t_base, std::max(ell, 1));
            return lambda_ell(fam, ell, cap_k).to_string();
        },
        py::arg("model"), py::arg("z"), py::arg("t_base"), py::arg("ell"), py::arg("cap_k"),
        "deterministic text form of the Lambda^ell operator");

    mod.def(
        "bootstrap",
        [](const PyModel& model, int m, const std::string& zp,
           py::array_t<double, py::array::c_style | py::array::forcecast> u0, double origin,
           double h, double horizon, int steps, double trunc_c, int threads) {
            GridFn g = grid_from_numpy(u0, origin, h);
            GridFn out = bootstrap(model.ref(), m, ZPolicy::parse(zp), g, horizon, steps,
                                   trunc_c, threads);
            return grid_to_numpy(out);
        },
        py::arg("model"), py::arg("m"), py::arg("z_policy"), py::arg("u0"), py::arg("origin"),
        py::arg("h"), py::arg("horizon"), py::arg("steps"), py::arg("trunc_c") = 8.0,
        py::arg("threads") = 1);

    mod.def(
        "cn_solve",
        [](const PyModel& model,
           py::array_t<double, py::array::c_style | py::array::forcecast> u0, double origin,
           double h, double t0, double horizon, int steps) {
            GridFn g = grid_from_numpy(u0, origin, h);
            return grid_to_numpy(cn_solve(model.ref(), g, t0, horizon, steps));
        },
        py::arg("model"), py::arg("u0"), py::arg("origin"), py::arg("h"), py::arg("t0"),
        py::arg("horizon"), py::arg("steps"));

    mod.def(
        "grid_norm",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> values,
           double origin, double h, const std::string& spec) {
            return grid_norm(grid_from_numpy(values, origin, h), NormSpec::parse(spec));
        },
        py::arg("values"), py::arg("origin"), py::arg("h"), py::arg("spec"));

    mod.attr("__version__") = "0.1.0";
}
