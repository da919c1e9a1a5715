#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xxmis/analysis.hpp"
#include "xxmis/bounds.hpp"
#include "xxmis/cli.hpp"
#include "xxmis/errors.hpp"
#include "xxmis/hamiltonians.hpp"

#include <sstream>

namespace py = pybind11;
using namespace xxmis;

namespace {

StageConfig make_config(int m, double gamma1_factor, std::optional<double> jxx, std::optional<double> gamma2) {
    auto cfg = default_config(m, gamma1_factor);
    if (gamma2) {
        cfg.gamma2 = *gamma2;
        cfg.gamma1 = gamma1_factor * *gamma2;
        cfg.gamma0 = 2 * cfg.gamma1;
    }
    if (jxx) cfg = with_jxx(cfg, *jxx);
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "XX-driver analysis for MIS annealing";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::enum_<Structure>(m, "Structure")
        .value("disjoint", Structure::disjoint)
        .value("shared", Structure::shared);

    py::class_<GicInstance>(m, "Instance")
        .def_property_readonly("m_l", &GicInstance::m_l)
        .def_property_readonly("m_g", &GicInstance::m_g)
        .def_property_readonly("vertex_count", &GicInstance::vertex_count)
        .def_property_readonly("degeneracy", &GicInstance::degeneracy)
        .def_readonly("r_count", &GicInstance::r_count)
        .def_readonly("jzz", &GicInstance::jzz)
        .def_readonly("structure", &GicInstance::structure)
        .def("__str__", [](const GicInstance& g) { return write_instance(g); });

    m.def("make_gdis", &make_gdis, py::arg("m_l"), py::arg("sizes"), py::arg("m_r"), py::arg("w") = 1.0,
          py::arg("jzz") = py::none(), py::arg("jzz_clique") = py::none());
    m.def("make_gshare", &make_gshare, py::arg("m_l"), py::arg("sizes"), py::arg("m_r"), py::arg("w") = 1.0,
          py::arg("jzz") = py::none(), py::arg("jzz_clique") = py::none());
    m.def("parse_instance", &parse_instance);
    m.def("write_instance", &write_instance);
    m.def("default_jzz", &default_jzz);

    m.def("b_eigen", [](double w, double x) {
        auto e = b_eigen(w, x);
        return py::make_tuple(e.beta0, e.beta1, e.gamma);
    });
    m.def("closed_tridiag_eigs", &closed_tridiag_eigs);
    m.def("m_matrix", &m_matrix);

    m.def("build_low_energy",
          [](const GicInstance& g, double x, double jxx) { return build_low_energy(g, x, jxx).mat; },
          py::arg("instance"), py::arg("x"), py::arg("jxx"));
    m.def("build_full",
          [](const GicInstance& g, double x, double jxx) { return build_full(expand(g), x, jxx, 1.0).mat; },
          py::arg("instance"), py::arg("x"), py::arg("jxx"));

    m.def(
        "jxx_bounds",
        [](int mm, int m_r, int m_g, int n_c, double gamma2, double jzz, Structure st) {
            auto r = jxx_bounds(mm, m_r, m_g, n_c, gamma2, jzz, st);
            py::dict d;
            d["lift"] = r.jxx_lift;
            d["steer"] = r.jxx_steer;
            d["sep"] = r.jxx_sep;
            d["sink"] = r.jxx_sink;
            d["jzz_steer"] = r.jzz_steer;
            d["witness"] = r.witness;
            d["window"] = r.window ? py::object(py::make_tuple(r.window->first, r.window->second)) : py::none();
            return d;
        },
        py::arg("m"), py::arg("m_r"), py::arg("m_g"), py::arg("n_c"), py::arg("gamma2"), py::arg("jzz"),
        py::arg("structure") = Structure::shared);
    m.def("jzz_steer_bound", &jzz_steer_bound);

    m.def(
        "spectrum",
        [](const GicInstance& g, double jxx, double gamma1_factor, int grid, int k) {
            auto cfg = make_config(g.m_l(), gamma1_factor, jxx, std::nullopt);
            auto run = run_spectrum(g, cfg, uniform_grid(grid), k);
            py::dict d;
            d["t"] = run.trace.grid;
            d["levels"] = run.trace.levels;
            d["t_star"] = run.stage2.t_star;
            d["min_gap"] = run.stage2.min_gap;
            d["t_min_gap"] = run.stage2.t_min_gap;
            d["classification"] = std::string(crossing_class_name(run.stage2.classification));
            return d;
        },
        py::arg("instance"), py::arg("jxx"), py::arg("gamma1_factor") = 2.0, py::arg("grid") = 401,
        py::arg("k") = 4);

    m.def(
        "negativity",
        [](const GicInstance& g, double jxx, double gamma1_factor, int grid) {
            return negativity(g, make_config(g.m_l(), gamma1_factor, jxx, std::nullopt), uniform_grid(grid));
        },
        py::arg("instance"), py::arg("jxx"), py::arg("gamma1_factor") = 2.0, py::arg("grid") = 401);

    m.def(
        "localization",
        [](const GicInstance& g, double jxx, double gamma1_factor, const std::vector<double>& t, int depth) {
            auto tr = localization(g, make_config(g.m_l(), gamma1_factor, jxx, std::nullopt), t, depth);
            return py::make_tuple(tr.w_l0, tr.w_r_cum);
        },
        py::arg("instance"), py::arg("jxx"), py::arg("gamma1_factor"), py::arg("t"), py::arg("depth"));

    m.def(
        "v3_alpha_beta",
        [](int n_c, double jxx, double jzz, int grid) {
            StageConfig cfg;
            cfg.gamma2 = 1;
            cfg.gamma1 = 2;
            cfg.gamma0 = 4;
            cfg.alpha = jxx;
            auto r = v3_model(n_c, 1.0, jzz, cfg, uniform_grid(grid));
            std::vector<double> t, a, b;
            for (const auto& p : r.points) {
                t.push_back(p.t);
                a.push_back(p.alpha);
                b.push_back(p.beta);
            }
            return py::make_tuple(t, a, b);
        },
        py::arg("n_c"), py::arg("jxx"), py::arg("jzz"), py::arg("grid") = 201);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"xxmis"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(rc, out.str(), err.str());
    });
}
