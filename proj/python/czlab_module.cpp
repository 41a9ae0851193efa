#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "czlab/accretive.hpp"
#include "czlab/curve.hpp"
#include "czlab/error.hpp"
#include "czlab/spaces.hpp"
#include "czlab/suites.hpp"
#include "czlab/threads.hpp"

namespace py = pybind11;
using namespace czlab;

PYBIND11_MODULE(_czlab, m) {
    m.doc() = "Bindings for the czlab operator library and experiment suites.";

    py::register_exception<Error>(m, "CzlabError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, int>(), py::arg("half_length"), py::arg("n_points"))
        .def_property_readonly("half_length", &Grid::half_length)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("step", &Grid::step)
        .def("points", &Grid::points)
        .def("__repr__", [](const Grid& g) {
            return "Grid(half_length=" + std::to_string(g.half_length()) + ", n_points=" + std::to_string(g.size()) + ")";
        });

    py::class_<GridFunction>(m, "GridFunction")
        .def(py::init<Grid, Vec>(), py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", &GridFunction::grid)
        .def_property_readonly("values", [](const GridFunction& f) { return Vec(f.values()); })
        .def("__len__", &GridFunction::size);

    m.def("lp_norm", py::overload_cast<const GridFunction&, double>(&lp_norm), py::arg("f"), py::arg("p"));
    m.def("pairing", &pairing);
    m.def("hilbert_transform", &hilbert_transform);
    m.def("maximal_function", &maximal_function);
    m.def("bmo_norm", &bmo_norm);
    m.def("h1_norm", [](const GridFunction& f) {
        const H1Norm r = h1_norm(f);
        return py::make_tuple(r.value, r.mean, r.mean_nonzero);
    }, "(value, mean, mean_nonzero)");
    m.def("para_accretivity_constant", &para_accretivity_constant, py::arg("b"), py::arg("min_subinterval_cells") = 1);

    m.def("curve_kernel", [](const std::string& kind, double lambda, double plateau, int j, double x, double y1,
                             double y2) {
        const CurveKernels K(std::make_shared<const LipschitzCurve>(LipschitzCurve::make(kind, lambda, plateau)));
        return K.kernel(j, x, y1, y2);
    }, py::arg("kind"), py::arg("lam"), py::arg("plateau"), py::arg("j"), py::arg("x"), py::arg("y1"), py::arg("y2"));

    m.def("suite_names", &suite_names);
    m.def("_default_config", [](const std::string& s) { return default_config(s).dump(); });
    m.def("_resolve_config", [](const std::string& s, const std::string& user) {
        return resolve_config(s, json::parse(user)).dump();
    });
    m.def("_run_suite", [](const std::string& s, const std::string& config, const std::string& out_dir) {
        const json cfg = json::parse(config);
        SuiteOutput out;
        {
            py::gil_scoped_release release;
            configure_threads();
            out = run_suite(s, cfg);
        }
        if (!out_dir.empty()) write_artifacts(out, cfg, out_dir);
        py::dict tables;
        for (const auto& t : out.tables) tables[py::str(t.file())] = t.csv();
        return py::make_tuple(summary_json(out, cfg).dump(), tables);
    }, py::arg("suite"), py::arg("config"), py::arg("out_dir") = "");
}
