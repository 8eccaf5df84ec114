#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neumann_holes/bessel.hpp"
#include "neumann_holes/harness.hpp"
#include "neumann_holes/smalleig.hpp"

#include <sstream>

namespace py = pybind11;
using namespace nh;

namespace {

DomainSpec make_domain(py::dict spec) {
    DomainSpec d;
    std::string kind = spec["kind"].cast<std::string>();
    if (kind == "rectangle") {
        d.outer = Rectangle{spec["x_min"].cast<double>(), spec["x_max"].cast<double>(),
                            spec["y_min"].cast<double>(), spec["y_max"].cast<double>()};
    } else if (kind == "disk") {
        auto c = spec.contains("center") ? spec["center"].cast<std::pair<double, double>>()
                                         : std::make_pair(0.0, 0.0);
        d.outer = Disk{{c.first, c.second}, spec["radius"].cast<double>()};
    } else {
        throw DomainError("domain kind must be 'rectangle' or 'disk'");
    }
    if (spec.contains("hole_center")) {
        auto c = spec["hole_center"].cast<std::pair<double, double>>();
        double eps = spec["hole_eps"].cast<double>();
        HoleShape shape = CircleHole{};
        if (spec.contains("hole_vertices")) {
            PolygonHole p;
            for (auto v : spec["hole_vertices"].cast<std::vector<std::pair<double, double>>>())
                p.vertices.push_back({v.first, v.second});
            shape = std::move(p);
        }
        d.hole = HoleSpec{shape, {c.first, c.second}, eps};
    }
    return d;
}

py::dict quality_dict(const QualityReport& q) {
    py::dict out;
    out["min_angle_deg"] = q.min_angle_deg;
    out["max_aspect"] = q.max_aspect;
    out["h_min"] = q.h_min;
    out["h_max"] = q.h_max;
    out["vertices"] = q.vertex_count;
    out["triangles"] = q.triangle_count;
    out["boundary_edges"] = q.boundary_edge_count;
    return out;
}

py::dict csr_dict(const SparseSym& a) {
    py::dict out;
    out["dim"] = a.dim;
    out["indptr"] = a.row_offsets;
    out["indices"] = a.col_indices;
    out["data"] = a.values;
    return out;
}

AnalyticEigenfunction mode_from_args(py::object kind, py::object arg1, py::object arg2) {
    std::string k = kind.cast<std::string>();
    if (k == "box")
        return make_box_mode(arg1.cast<std::vector<double>>(), arg2.cast<std::vector<int>>());
    if (k == "disk") return make_disk_mode(arg1.cast<double>(), arg2.cast<int>());
    throw DomainError("mode kind must be 'box' or 'disk'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Neumann eigenvalue perturbation toolkit: FEM, closed forms and sweeps";

    py::register_exception<Error>(m, "NeumannHolesError");

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("num_vertices", [](const Mesh& x) { return x.vertices.size(); })
        .def_property_readonly("num_triangles", [](const Mesh& x) { return x.triangles.size(); })
        .def_property_readonly("h_target", [](const Mesh& x) { return x.h_target; })
        .def("vertices",
             [](const Mesh& x) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& v : x.vertices) out.push_back({v.x, v.y});
                 return out;
             })
        .def("triangles", [](const Mesh& x) { return x.triangles; })
        .def("total_area", &Mesh::total_area)
        .def("hole_perimeter", [](const Mesh& x) { return x.boundary_length(BoundaryTag::Hole); })
        .def("outer_perimeter", [](const Mesh& x) { return x.boundary_length(BoundaryTag::Outer); })
        .def("validate", &Mesh::validate)
        .def("save", [](const Mesh& x, const std::string& path) { save_mesh(path, x); })
        .def("__repr__", [](const Mesh& x) {
            std::ostringstream os;
            os << "<Mesh " << x.vertices.size() << " vertices, " << x.triangles.size()
               << " triangles>";
            return os.str();
        });

    m.def(
        "generate_mesh",
        [](py::dict spec, double h) { return generate_mesh(make_domain(spec), h); },
        py::arg("spec"), py::arg("h"));
    m.def("refine_uniform", &refine_uniform);
    m.def("load_mesh", &load_mesh);
    m.def("mesh_quality", [](const Mesh& x) { return quality_dict(mesh_quality(x)); });

    m.def(
        "assemble",
        [](const Mesh& mesh, int order) {
            FemSpace sp = FemSpace::build(mesh, order);
            py::dict out;
            out["dof_count"] = sp.dof_count;
            out["stiffness"] = csr_dict(assemble_stiffness(sp));
            out["mass"] = csr_dict(assemble_mass(sp));
            return out;
        },
        py::arg("mesh"), py::arg("order") = 1);

    m.def(
        "solve_modes",
        [](const Mesh& mesh, int order, int count, double tol, bool vectors) {
            FemSpace sp = FemSpace::build(mesh, order);
            SparseSym K = assemble_stiffness(sp);
            SparseSym M = assemble_mass(sp);
            EigOptions opts;
            opts.tol = tol;
            SpectrumSlice s = solve_lowest(K, M, count, opts);
            py::list out;
            for (int i = 0; i < s.size(); ++i) {
                py::dict mode;
                mode["lambda"] = s[i].lambda;
                mode["mu"] = s[i].mu;
                mode["residual"] = s[i].residual;
                mode["gap"] = s.gap_to_neighbors[i];
                if (vectors) mode["u"] = s[i].u;
                out.append(mode);
            }
            return out;
        },
        py::arg("mesh"), py::arg("order") = 1, py::arg("count") = 6, py::arg("tol") = 1e-9,
        py::arg("vectors") = false);

    m.def(
        "box_spectrum",
        [](std::vector<double> sides, int count) {
            py::list out;
            for (const auto& e : box_spectrum(sides, count)) {
                py::dict d;
                d["lambda"] = e.lambda;
                d["index"] = e.index;
                d["simple"] = e.simple;
                out.append(d);
            }
            return out;
        },
        py::arg("sides"), py::arg("count"));
    m.def(
        "disk_spectrum",
        [](double radius, int count) {
            py::list out;
            for (const auto& e : disk_spectrum(radius, count)) {
                py::dict d;
                d["lambda"] = e.lambda;
                d["root_index"] = e.index[1];
                d["simple"] = e.simple;
                out.append(d);
            }
            return out;
        },
        py::arg("radius"), py::arg("count"));

    m.def("bessel_j0", &bessel::j0);
    m.def("bessel_j1", &bessel::j1);
    m.def("bessel_j0_prime_zero", &bessel::j0_prime_zero);
    m.def("bessel_j0_zero", &bessel::j0_zero);

    m.def(
        "annulus_series_torsion",
        [](double eps, double R, int degree, std::vector<double> a, std::vector<double> b) {
            return annulus_fourier_torsion(eps, R, FourierHoleData{degree, a, b});
        },
        py::arg("eps"), py::arg("R"), py::arg("degree"), py::arg("a"), py::arg("b"));
    m.def(
        "exterior_ball_torsion",
        [](int N, int k, double y_norm_sq) { return exterior_ball_torsion(N, k, y_norm_sq).tau; },
        py::arg("N"), py::arg("k"), py::arg("y_norm_sq"));
    m.def(
        "radial_ode_check",
        [](int N, int k, double r_max) {
            RadialOdeReport r = radial_exterior_ode_check(N, k, r_max);
            py::dict out;
            out["max_rel_deviation"] = r.max_rel_deviation;
            out["u_at_1"] = r.u_at_1;
            out["decay_exponent"] = r.decay_exponent;
            return out;
        },
        py::arg("N"), py::arg("k"), py::arg("r_max") = 12.0);

    m.def(
        "fem_torsion",
        [](const Mesh& mesh, int order, int degree, std::vector<double> a,
           std::vector<double> b, bool zero_average) {
            if (!mesh.domain || !mesh.domain->hole)
                throw NoHoleError("mesh carries no hole");
            const HoleSpec& h = *mesh.domain->hole;
            FemSpace sp = FemSpace::build(mesh, order);
            SparseSym K = assemble_stiffness(sp);
            SparseSym M = assemble_mass(sp);
            BoundaryTrace f = fourier_trace(FourierHoleData{degree, a, b}, h.center, h.eps);
            TorsionSolution s = zero_average ? solve_zero_average_torsion(sp, K, M, f)
                                             : solve_interior_torsion(sp, K, M, f);
            py::dict out;
            out["T"] = s.T;
            out["identity_residual"] = s.identity_energy_residual;
            out["solve_residual"] = s.solve_residual;
            return out;
        },
        py::arg("mesh"), py::arg("order"), py::arg("degree"), py::arg("a"), py::arg("b"),
        py::arg("zero_average") = false);

    m.def(
        "predict_shift_2d",
        [](py::object kind, py::object arg1, py::object arg2, std::pair<double, double> x0) {
            AnalyticEigenfunction phi = mode_from_args(kind, arg1, arg2);
            ShiftPrediction p = predict_shift_2d(phi, {x0.first, x0.second});
            py::dict out;
            out["exponent"] = p.exponent;
            out["coeff"] = p.coeff;
            out["torsion_term"] = p.torsion_term;
            out["volume_term"] = p.volume_term;
            out["log_correction"] = p.log_correction;
            if (p.has_log_diagnostic) out["log_diagnostic_coeff"] = p.log_diagnostic_coeff;
            return out;
        },
        py::arg("kind"), py::arg("arg1"), py::arg("arg2"), py::arg("x0"));
    m.def("predict_shift_nd_regular",
          [](int N, double lam, double grad_sq, double value) {
              return predict_shift_nd_regular(N, lam, grad_sq, value).coeff;
          });
    m.def("predict_shift_nd_singular", [](int N, double lam, int k, double y2) {
        return predict_shift_nd_singular(N, lam, k, y2).coeff;
    });

    m.def(
        "gamma_indicator",
        [](py::object kind, py::object arg1, py::object arg2, std::vector<double> x) {
            return gamma_indicator(mode_from_args(kind, arg1, arg2), x);
        },
        py::arg("kind"), py::arg("arg1"), py::arg("arg2"), py::arg("x"));

    m.def(
        "classify_sign",
        [](py::object kind, py::object arg1, py::object arg2, std::vector<double> x0,
           double margin) {
            switch (classify_sign(mode_from_args(kind, arg1, arg2), x0, margin)) {
                case SignClass::OmegaPlus: return "omega_plus";
                case SignClass::OmegaMinus: return "omega_minus";
                default: return "indeterminate_near_gamma";
            }
        },
        py::arg("kind"), py::arg("arg1"), py::arg("arg2"), py::arg("x0"),
        py::arg("margin") = 1e-3);

    m.def(
        "run_sweep_toml",
        [](const std::string& toml_text) {
            ExperimentConfig cfg = parse_config_toml(toml_text);
            SweepTable t = run_sweep(cfg);
            FitResult fit = fit_leading_order(t, cfg.fit_model);
            py::dict out;
            out["lambda_reference"] = t.lambda_reference;
            py::list rows;
            for (const auto& r : t.rows) {
                py::dict row;
                row["eps"] = r.eps;
                row["lambda_eps"] = r.lambda_eps;
                row["delta_lambda"] = r.delta_lambda;
                row["error_bar"] = r.error_bar;
                rows.append(row);
            }
            out["rows"] = rows;
            out["p_hat"] = fit.p_hat;
            out["c_hat"] = fit.c_hat;
            out["r_squared"] = fit.r_squared;
            return out;
        },
        py::arg("toml_text"));

    m.def("verify_all", [](std::uint64_t seed) {
        SuiteReport rep = verify_all(seed);
        py::dict out;
        out["all_pass"] = rep.all_pass;
        py::list checks;
        for (const auto& c : rep.checks) {
            py::dict d;
            d["name"] = c.name;
            d["pass"] = c.pass;
            d["details"] = c.details;
            d["count"] = c.count;
            checks.append(d);
        }
        out["checks"] = checks;
        return out;
    });

    m.def("smalleig_check", [](std::uint64_t seed) {
        SmallEigInstance inst = make_random_small_eig_instance(seed);
        SmallEigReport rep = verify_small_eig(inst);
        py::dict out;
        out["delta"] = rep.delta;
        out["gamma"] = rep.gamma;
        out["xi"] = rep.xi;
        out["projection_ok"] = rep.projection_ok;
        out["eigenvalue_ok"] = rep.eigenvalue_ok;
        return out;
    });
}
