#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "neumann_holes/bessel.hpp"
#include "neumann_holes/harness.hpp"
#include "neumann_holes/smalleig.hpp"

using namespace nh;

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    fs::path p = fs::path(dir) / name;
    std::ofstream f(p);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    return f;
}

AnalyticEigenfunction target_mode(const ExperimentConfig& cfg) {
    const auto& r = std::get<Rectangle>(cfg.domain.outer);
    std::vector<double> sides = {r.x_max - r.x_min, r.y_max - r.y_min};
    auto spec = box_spectrum(sides, cfg.target_n + 2);
    return make_box_mode(sides, spec[cfg.target_n].index);
}

int cmd_mesh(const std::string& config_path, double eps, double h_override,
             const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path);
    DomainSpec dom = cfg.domain;
    if (eps > 0.0) dom.hole = HoleSpec{cfg.hole_shape, cfg.hole_center, eps};
    double h = h_override > 0.0 ? h_override : cfg.h0;
    Mesh mesh = generate_mesh(dom, h);
    auto f = open_out(out_dir, "mesh.txt");
    write_mesh(f, mesh);
    QualityReport q = mesh_quality(mesh);
    nlohmann::json j;
    j["schema"] = 1;
    j["vertices"] = q.vertex_count;
    j["triangles"] = q.triangle_count;
    j["boundary_edges"] = q.boundary_edge_count;
    j["min_angle_deg"] = q.min_angle_deg;
    j["max_aspect"] = q.max_aspect;
    j["h_min"] = q.h_min;
    j["h_max"] = q.h_max;
    auto qf = open_out(out_dir, "quality.json");
    qf << j.dump(2) << "\n";
    std::cout << "mesh: " << q.triangle_count << " triangles, min angle " << q.min_angle_deg
              << " deg -> " << out_dir << "/mesh.txt\n";
    return 0;
}

int cmd_eig(const std::string& config_path, double eps, int modes,
            const std::string& out_dir, const std::string& format, bool seed_given,
            std::uint64_t seed) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_given) cfg.seed = seed;
    DomainSpec dom = cfg.domain;
    if (eps > 0.0) dom.hole = HoleSpec{cfg.hole_shape, cfg.hole_center, eps};
    Mesh mesh = generate_mesh(dom, cfg.h0);
    FemSpace sp = FemSpace::build(std::move(mesh), cfg.order);
    SparseSym K = assemble_stiffness(sp);
    SparseSym M = assemble_mass(sp);
    EigOptions opts;
    opts.tol = cfg.eig_tol;
    opts.seed = cfg.seed;
    SpectrumSlice s = solve_lowest(K, M, modes, opts);
    if (format == "json") {
        nlohmann::json j;
        j["schema"] = 1;
        j["modes"] = nlohmann::json::array();
        for (int i = 0; i < s.size(); ++i)
            j["modes"].push_back({{"index", i},
                                  {"lambda", s[i].lambda},
                                  {"mu", s[i].mu},
                                  {"residual", s[i].residual},
                                  {"gap", s.gap_to_neighbors[i]}});
        auto f = open_out(out_dir, "spectrum.json");
        f << j.dump(2) << "\n";
    } else {
        auto f = open_out(out_dir, "spectrum.csv");
        f << "index,lambda,mu,residual,gap\n";
        char buf[200];
        for (int i = 0; i < s.size(); ++i) {
            int n = std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3g,%.17g\n", i,
                                  s[i].lambda, s[i].mu, s[i].residual, s.gap_to_neighbors[i]);
            f.write(buf, n);
        }
    }
    std::cout << "eig: lowest " << modes << " modes on " << sp.dof_count << " dofs -> "
              << out_dir << "\n";
    return 0;
}

int cmd_torsion(const std::string& config_path, double eps, double annulus_R,
                const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path);
    AnalyticEigenfunction phi = target_mode(cfg);
    const auto& r = std::get<Rectangle>(cfg.domain.outer);
    Point x0 = {cfg.hole_center.x - r.x_min, cfg.hole_center.y - r.y_min};

    DomainSpec dom = cfg.domain;
    dom.hole = HoleSpec{cfg.hole_shape, cfg.hole_center, eps};
    Mesh mesh = generate_mesh(dom, cfg.h0);
    FemSpace sp = FemSpace::build(std::move(mesh), cfg.order);
    SparseSym K = assemble_stiffness(sp);
    SparseSym M = assemble_mass(sp);
    // trace in domain coordinates: shift into the box frame
    BoundaryTrace f{[phi, r, c = cfg.hole_center](const Vec2& p) {
        Vec2 d{p.x - c.x, p.y - c.y};
        double n = d.norm();
        auto g = phi.gradient({p.x - r.x_min, p.y - r.y_min});
        return -(g[0] * d.x + g[1] * d.y) / n;
    }};
    TorsionSolution sob = solve_interior_torsion(sp, K, M, f);

    // leading Taylor data of the mode at the hole center
    auto [k, table] = vanishing_order(phi, x0);
    FourierHoleData data;
    data.degree = k;
    data.a.assign(k + 1, 0.0);
    data.b.assign(k + 1, 0.0);
    // Fourier coefficients of the degree-k angular profile
    const int nt = 1024;
    for (int iord = 0; iord <= k; ++iord) {
        double ca = 0.0, cb = 0.0;
        for (int t = 0; t < nt; ++t) {
            double th = 2.0 * 3.14159265358979323846 * t / nt;
            Point dvec = {std::cos(th), std::sin(th)};
            double fv = table.evaluate(dvec);
            ca += fv * std::cos(iord * th);
            cb += fv * std::sin(iord * th);
        }
        data.a[iord] = ca * 2.0 / nt;
        if (iord >= 1) data.b[iord] = cb * 2.0 / nt;
    }
    double R_used = annulus_R > 0.0 ? annulus_R : 0.5 * cfg.domain.min_feature_size();
    double t_series = annulus_fourier_torsion(eps, R_used, data);
    double vol = hole_energy_integral(phi, x0, eps);
    ShiftPrediction split = predict_shift_general(sob.T, vol);

    nlohmann::json j;
    j["schema"] = 1;
    j["eps"] = eps;
    j["fem_sobolev_T"] = sob.T;
    j["fem_identity_residual"] = sob.identity_energy_residual;
    j["annulus_series_T"] = t_series;
    j["annulus_R"] = R_used;
    j["vanishing_order"] = k;
    j["volume_term"] = vol;
    j["predicted_delta_lambda"] = split.coeff;
    auto f2 = open_out(out_dir, "torsion.json");
    f2 << j.dump(2) << "\n";
    std::cout << "torsion: T_fem " << sob.T << ", series " << t_series << " -> " << out_dir
              << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              const std::string& format) {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    SweepTable table = run_sweep(cfg);
    FitResult fit = fit_leading_order(table, cfg.fit_model);
    if (format == "csv" || format == "both") {
        auto f = open_out(cfg.output_dir, "sweep.csv");
        write_sweep_csv(f, table);
    }
    if (format == "json" || format == "both") {
        auto f = open_out(cfg.output_dir, "sweep.json");
        write_sweep_json(f, table, &fit);
    }
    std::cout << "sweep: p_hat " << fit.p_hat << ", c_hat " << fit.c_hat << ", R^2 "
              << fit.r_squared << " -> " << cfg.output_dir << "\n";
    return 0;
}

int cmd_gamma(double disk_R, int mode_k, int grid, const std::string& out_dir,
              const std::string& format) {
    DiskGammaFigure fig = compute_disk_gamma(disk_R, mode_k, grid);
    if (format == "svg" || format == "both") {
        auto f = open_out(out_dir, "gamma_disk.svg");
        write_disk_gamma_svg(f, fig);
    }
    if (format == "csv" || format == "both") {
        auto f = open_out(out_dir, "gamma_disk.csv");
        write_disk_gamma_csv(f, fig);
    }
    std::cout << "gamma: " << fig.gamma_radii.size() << " interface radii, "
              << fig.nodal_radii.size() << " nodal radii -> " << out_dir << "\n";
    return 0;
}

int cmd_smalleig(int draws, std::uint64_t seed, const std::string& out_dir) {
    int violations = 0;
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        SmallEigInstance inst = make_random_small_eig_instance(seed + i);
        SmallEigReport rep = verify_small_eig(inst);
        if (!rep.projection_ok || !rep.eigenvalue_ok) ++violations;
        if (rep.projection_bound > 0.0)
            worst1 = std::max(worst1, rep.projection_error / rep.projection_bound);
        if (rep.eigenvalue_bound > 0.0)
            worst2 = std::max(worst2, rep.eigenvalue_error / rep.eigenvalue_bound);
    }
    nlohmann::json j;
    j["schema"] = 1;
    j["seed"] = seed;
    j["draws"] = draws;
    j["violations"] = violations;
    j["worst_projection_ratio"] = worst1;
    j["worst_eigenvalue_ratio"] = worst2;
    auto f = open_out(out_dir, "smalleig.json");
    f << j.dump(2) << "\n";
    std::cout << "smalleig: " << draws << " draws, " << violations << " violations\n";
    return violations == 0 ? 0 : 1;
}

int cmd_verify(std::uint64_t seed, const std::string& out_dir) {
    SuiteReport rep = verify_all(seed);
    auto f = open_out(out_dir, "verify.json");
    write_suite_json(f, rep);
    for (const auto& c : rep.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  (" << c.details << ")\n";
    std::cout << (rep.all_pass ? "all checks passed" : "FAILURES present") << "\n";
    return rep.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neumann eigenvalue perturbation toolkit: meshes, spectra, torsional "
                 "rigidity and eigenvalue-shift experiments on perforated domains"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format = "both";
    double eps = 0.0, h_override = 0.0, annulus_R = 0.0, disk_R = 2.0;
    int modes = 6, mode_k = 1, grid = 401, draws = 500;
    std::uint64_t seed = 0x5EED;

    auto* mesh = app.add_subcommand("mesh", "generate a mesh and its quality report");
    mesh->add_option("--config", config_path)->required();
    mesh->add_option("--eps", eps, "hole scale; 0 = unperforated");
    mesh->add_option("--size", h_override, "target edge length override");
    mesh->add_option("--out", out_dir);

    auto* eig = app.add_subcommand("eig", "lowest Neumann modes of the (perforated) domain");
    eig->add_option("--config", config_path)->required();
    eig->add_option("--eps", eps);
    eig->add_option("--modes", modes);
    eig->add_option("--out", out_dir);
    auto* eig_seed = eig->add_option("--seed", seed, "overrides the config seed");
    eig->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    auto* torsion = app.add_subcommand("torsion", "torsional rigidity three ways at one eps");
    torsion->add_option("--config", config_path)->required();
    torsion->add_option("--eps", eps)->required();
    torsion->add_option("--annulus-R", annulus_R, "comparison annulus radius");
    torsion->add_option("--out", out_dir);

    auto* sweep = app.add_subcommand("sweep", "eps sweep with Richardson extrapolation and fit");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--out", out_dir);
    sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json", "both"}));
    sweep->add_option("--seed", seed);

    auto* gamma = app.add_subcommand("gamma", "interface and nodal circles of a disk mode");
    gamma->add_option("--disk-R", disk_R);
    gamma->add_option("--mode-k", mode_k);
    gamma->add_option("--grid", grid);
    gamma->add_option("--out", out_dir);
    gamma->add_option("--format", format)->check(CLI::IsMember({"svg", "csv", "both"}));

    auto* smalleig = app.add_subcommand("smalleig", "randomized small-eigenvalue lemma suite");
    smalleig->add_option("--draws", draws);
    smalleig->add_option("--seed", seed);
    smalleig->add_option("--out", out_dir);

    auto* verify = app.add_subcommand("verify", "run the full property suite");
    verify->add_option("--seed", seed);
    verify->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (mesh->parsed()) return cmd_mesh(config_path, eps, h_override, out_dir);
        if (eig->parsed()) return cmd_eig(config_path, eps, modes, out_dir, format == "both" ? "csv" : format, eig_seed->count() > 0, seed);
        if (torsion->parsed()) return cmd_torsion(config_path, eps, annulus_R, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, format);
        if (gamma->parsed()) return cmd_gamma(disk_R, mode_k, grid, out_dir, format);
        if (smalleig->parsed()) return cmd_smalleig(draws, seed, out_dir);
        if (verify->parsed()) return cmd_verify(seed, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
