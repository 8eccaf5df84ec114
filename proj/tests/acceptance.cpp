// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "neumann_holes/bessel.hpp"
#include "neumann_holes/harness.hpp"
#include "neumann_holes/smalleig.hpp"

using namespace nh;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kB = std::pow(2.0, 0.25);

struct Criterion {
    int id;
    std::string title;
    std::function<std::string()> run; // empty string = pass, else failure reason
};

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = (double)xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- 1 -----------------------------------------------------------------

std::string c1_box_spectrum() {
    auto spec = box_spectrum({1.0, kB, std::pow(3.0, 0.25)}, 2);
    double lam_exact = kPi * kPi / std::sqrt(3.0) + 1.0;
    if (std::abs(spec[1].lambda - lam_exact) > 1e-12)
        return "lambda_{0,0,1} off by " + fmt(spec[1].lambda - lam_exact);
    if (spec[1].index != std::vector<int>{0, 0, 1}) return "wrong lowest nontrivial index";

    // interface planes of mode (0,0,1): roots of h along z, via the module
    AnalyticEigenfunction mode = make_box_mode({1.0, kB, std::pow(3.0, 0.25)}, {0, 0, 1});
    auto h_z = [&](double z) { return gamma_indicator(mode, {0.31, 0.77, z}); };
    auto bisect = [&](double lo, double hi) {
        double flo = h_z(lo);
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = h_z(mid);
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    const double s3 = std::pow(3.0, 0.25);
    double z1_exact = s3 / kPi * std::atan(std::sqrt(2.0 / 3.0));
    double z2_exact = s3 / kPi * (kPi - std::atan(std::sqrt(2.0 / 3.0)));
    double z1 = bisect(1e-6, 0.5 * s3);
    double z2 = bisect(0.5 * s3, s3 - 1e-6);
    if (std::abs(z1 - z1_exact) > 1e-12) return "first Gamma plane off by " + fmt(z1 - z1_exact);
    if (std::abs(z2 - z2_exact) > 1e-12) return "second Gamma plane off by " + fmt(z2 - z2_exact);
    return "";
}

// --- 2 -----------------------------------------------------------------

std::string c2_bessel_roots() {
    double a1 = bessel::j0_prime_zero(1);
    double a2 = bessel::j0_prime_zero(2);
    if (std::abs(a1 - 3.831705970207512) > 5e-13) return "alpha_01 = " + fmt(a1);
    if (std::abs(a2 - 7.015586669815619) > 5e-13) return "alpha_02 = " + fmt(a2);
    // printed digits of the reference: 3.831 and 7.016
    // the reference truncates: 3.8317 prints as "3.831"
    if (std::abs(a1 - 3.831) > 1e-3 || std::abs(a2 - 7.016) > 1e-3)
        return "printed digits not reproduced";
    if (std::abs(bessel::j1(a1)) > 1e-12) return "residual J1(alpha_01) = " + fmt(bessel::j1(a1));
    if (std::abs(bessel::j1(a2)) > 1e-12) return "residual J1(alpha_02) = " + fmt(bessel::j1(a2));
    return "";
}

// --- 3 -----------------------------------------------------------------

std::string c3_exterior_torsion() {
    for (int N : {3, 4, 5})
        for (int k : {1, 2, 3}) {
            RadialOdeReport rep = radial_exterior_ode_check(N, k, 12.0);
            if (rep.max_rel_deviation > 1e-8)
                return "ODE deviation " + fmt(rep.max_rel_deviation) + " at N=" +
                       std::to_string(N) + ", k=" + std::to_string(k);
            // tau from the ODE trace values vs the closed form (Y norm = 1)
            double tau_ode = -double(k) * rep.u_at_1;
            double tau_exact = exterior_ball_torsion(N, k, 1.0).tau;
            if (std::abs(tau_ode - tau_exact) > 1e-8 * tau_exact)
                return "tau mismatch " + fmt(tau_ode - tau_exact);
        }
    return "";
}

// --- 4 + 8 (identities on these solves) ---------------------------------

std::string g_c4_details;

std::string c4_fourier_vs_fem() {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> U(0.3, 1.0);
    const double R = 1.0;
    double worst_gap = 0.0, worst_order = 1e9;
    for (int j : {1, 2, 3}) {
        for (double ratio : {0.05, 0.1, 0.2}) {
            double eps = ratio * R;
            FourierHoleData d;
            d.degree = j;
            d.a.assign(j + 1, 0.0);
            d.b.assign(j + 1, 0.0);
            for (int i = 1; i <= j; ++i) {
                d.a[i] = U(rng);
                d.b[i] = U(rng);
            }
            d.a[0] = 0.0; // zero-mean data; the log mode is covered by criterion 11
            double exact = annulus_fourier_torsion(eps, R, d);
            DomainSpec dom{Disk{{0, 0}, R}, std::nullopt};
            dom.hole = HoleSpec{CircleHole{}, {0, 0}, eps};
            Mesh mesh = generate_mesh(dom, 0.06);
            std::vector<double> errs;
            for (int lvl = 0; lvl < 3; ++lvl) {
                FemSpace sp = FemSpace::build(mesh, 1);
                SparseSym K = assemble_stiffness(sp);
                SparseSym M = assemble_mass(sp);
                TorsionSolution s =
                    solve_zero_average_torsion(sp, K, M, fourier_trace(d, {0, 0}, eps));
                if (!torsion_identities_hold(s, K, M, 1e-10, /*sobolev=*/false))
                    return "torsion energy identity failed during criterion 4";
                errs.push_back(std::abs(s.T - exact) / exact);
                if (lvl < 2) mesh = refine_uniform(mesh);
            }
            double order = std::log2(errs[1] / errs[2]);
            worst_gap = std::max(worst_gap, errs.back());
            worst_order = std::min(worst_order, order);
            if (errs.back() > 0.01)
                return "gap " + fmt(errs.back()) + " at j=" + std::to_string(j) +
                       ", eps/R=" + fmt(ratio);
            if (order < 1.8)
                return "order " + fmt(order) + " at j=" + std::to_string(j) +
                       ", eps/R=" + fmt(ratio);
        }
    }
    g_c4_details = "worst gap " + fmt(worst_gap) + ", worst order " + fmt(worst_order);
    return "";
}

// --- 5 -----------------------------------------------------------------

ExperimentConfig sweep_config(int n, Vec2 center) {
    ExperimentConfig cfg;
    cfg.domain = DomainSpec{Rectangle{0.0, 1.0, 0.0, kB}, std::nullopt};
    cfg.hole_center = center;
    cfg.eps_list = {0.08, 0.06, 0.045, 0.03};
    cfg.target_n = n;
    cfg.h0 = 0.04;
    cfg.levels = 3;
    cfg.order = 1;
    return cfg;
}

std::string c5_nodal_sweep() {
    ExperimentConfig cfg = sweep_config(1, {0.5, kB / 2.0});
    SweepTable t = run_sweep(cfg);
    FitResult f = fit_leading_order(t, FitModel::Power);
    AnalyticEigenfunction phi = make_box_mode({1.0, kB}, {0, 1});
    auto g = phi.gradient({0.5, kB / 2.0});
    double expect = -2.0 * kPi * (g[0] * g[0] + g[1] * g[1]);
    if (std::abs(f.p_hat - 2.0) > 0.1) return "fitted exponent " + fmt(f.p_hat);
    if (std::abs(f.c_hat - expect) > 0.1 * std::abs(expect))
        return "coefficient " + fmt(f.c_hat) + " vs -2pi|grad|^2 = " + fmt(expect);
    for (const auto& r : t.rows)
        if (!(r.delta_lambda < 0.0)) return "nonnegative shift at eps = " + fmt(r.eps);
    return "";
}

// --- 6 -----------------------------------------------------------------

std::string c6_antinode_sweep() {
    // lowest mode with an interior critical point of nonzero value: (0,2),
    // spectrum index 4; the anti-node sits at the rectangle midline. This
    // criterion pins no eps window; the next-order term carries the large
    // factor (lambda-1)^2 eps^4 |log eps|, so the window sits below 0.035,
    // and the higher eigenvalue needs a finer mesh family for usable bars.
    ExperimentConfig cfg = sweep_config(4, {0.5, kB / 2.0});
    cfg.eps_list = {0.035, 0.026, 0.018, 0.012};
    cfg.h0 = 0.028;
    cfg.levels = 4;
    // the residual metric |(K+M)u - lambda M u| / |M u| has a roundoff floor
    // of ~1e-9 on the ~1e5-dof finest meshes; 1e-8 still gives eigenvalues
    // orders of magnitude tighter than the criterion needs
    cfg.eig_tol = 1e-8;
    SweepTable t = run_sweep(cfg);
    if (t.mode_index != std::vector<int>{0, 2}) return "unexpected target mode";
    for (const auto& r : t.rows)
        if (!(r.delta_lambda > 0.0)) return "nonpositive shift at eps = " + fmt(r.eps);
    FitResult f = fit_leading_order(t, FitModel::Power);
    AnalyticEigenfunction phi = make_box_mode({1.0, kB}, {0, 2});
    double A = phi.value({0.5, kB / 2.0});
    double expect = kPi * (phi.lambda - 1.0) * A * A;
    if (std::abs(f.p_hat - 2.0) > 0.1) return "fitted exponent " + fmt(f.p_hat);
    if (std::abs(f.c_hat - expect) > 0.1 * std::abs(expect))
        return "coefficient " + fmt(f.c_hat) + " vs pi(lambda-1)phi^2 = " + fmt(expect);
    return "";
}

// --- 7 -----------------------------------------------------------------

std::string c7_term_split() {
    const Vec2 x0{0.3, 0.25}; // generic: neither nodal nor critical
    const double eps = 0.05;
    AnalyticEigenfunction phi = make_box_mode({1.0, kB}, {0, 1});

    // measured shift from the eigensolve pipeline
    ExperimentConfig cfg = sweep_config(1, x0);
    cfg.eps_list = {0.08, 0.065, 0.057, 0.05};
    SweepTable t = run_sweep(cfg);
    double measured = t.rows.back().delta_lambda;

    // torsion and volume terms, computed without any eigensolve
    DomainSpec dom = cfg.domain;
    dom.hole = HoleSpec{CircleHole{}, x0, eps};
    Mesh mesh = generate_mesh(dom, 0.03);
    mesh = refine_uniform(mesh);
    FemSpace sp = FemSpace::build(std::move(mesh), 1);
    SparseSym K = assemble_stiffness(sp);
    SparseSym M = assemble_mass(sp);
    BoundaryTrace f{[&phi, x0](const Vec2& p) {
        Vec2 d{p.x - x0.x, p.y - x0.y};
        double n = d.norm();
        auto g = phi.gradient({p.x, p.y});
        return -(g[0] * d.x + g[1] * d.y) / n;
    }};
    TorsionSolution torsion = solve_interior_torsion(sp, K, M, f);
    if (!torsion_identities_hold(torsion, K, M)) return "torsion identities failed";
    double volume = hole_energy_integral(phi, {x0.x, x0.y}, eps);
    double predicted = predict_shift_general(torsion.T, volume).coeff;
    double rel = std::abs(predicted - measured) / std::abs(measured);
    if (rel > 0.10)
        return "split prediction " + fmt(predicted) + " vs measured " + fmt(measured) +
               " (rel " + fmt(rel) + ")";
    return "";
}

// --- 8 -----------------------------------------------------------------

std::string c8_identities_and_monotonicity() {
    // closed-form annuli, zero-mean data: exact ordering in R
    FourierHoleData d;
    d.degree = 2;
    d.a = {0.0, 0.5, -0.7};
    d.b = {0.0, 0.4, 0.2};
    double prev = 1e300;
    for (double R : {0.6, 0.9, 1.3, 2.0, 3.1}) {
        double t = annulus_fourier_torsion(0.1, R, d);
        if (!(t <= prev + 1e-15)) return "closed form not decreasing in R";
        prev = t;
    }
    // FEM Sobolev torsion ordering within combined tolerance, plus the
    // the load/energy identities on every solve
    FourierHoleData d1;
    d1.degree = 1;
    d1.a = {0.0, 1.0};
    d1.b = {0.0, 0.4};
    double prev_fem = 1e300;
    for (double R : {0.7, 1.1, 1.8}) {
        DomainSpec dom{Disk{{0, 0}, R}, std::nullopt};
        dom.hole = HoleSpec{CircleHole{}, {0, 0}, 0.1};
        Mesh mesh = refine_uniform(generate_mesh(dom, 0.05));
        FemSpace sp = FemSpace::build(std::move(mesh), 1);
        SparseSym K = assemble_stiffness(sp);
        SparseSym M = assemble_mass(sp);
        TorsionSolution s = solve_interior_torsion(sp, K, M, fourier_trace(d1, {0, 0}, 0.1));
        if (!torsion_identities_hold(s, K, M))
            return "torsion energy identity failed at R = " + fmt(R);
        if (!(s.T <= prev_fem * (1.0 + 1e-3)))
            return "FEM ordering violated at R = " + fmt(R);
        prev_fem = s.T;
    }
    return "";
}

// --- 9 -----------------------------------------------------------------

std::string c9_sup_characterization() {
    DomainSpec dom{Rectangle{0.0, 1.0, 0.0, kB}, std::nullopt};
    dom.hole = HoleSpec{CircleHole{}, {0.5, kB / 2.0}, 0.06};
    Mesh mesh = generate_mesh(dom, 0.05);
    FemSpace sp = FemSpace::build(std::move(mesh), 1);
    SparseSym K = assemble_stiffness(sp);
    SparseSym M = assemble_mass(sp);
    AnalyticEigenfunction phi = make_box_mode({1.0, kB}, {0, 1});
    BoundaryTrace f{[&phi](const Vec2& p) {
        Vec2 d{p.x - 0.5, p.y - kB / 2.0};
        double n = d.norm();
        auto g = phi.gradient({p.x, p.y});
        return -(g[0] * d.x + g[1] * d.y) / n;
    }};
    TorsionSolution s = solve_interior_torsion(sp, K, M, f);
    double attained = sup_characterization_bound(K, M, s.load, s.U);
    if (std::abs(attained - s.T) > 1e-10 * s.T)
        return "maximizer does not attain T: gap " + fmt(attained - s.T);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        Vector u(sp.dof_count);
        for (auto& v : u) v = U(rng);
        double bound = sup_characterization_bound(K, M, s.load, u);
        if (bound > s.T * (1.0 + 1e-12))
            return "random test vector exceeded T at draw " + std::to_string(it);
    }
    return "";
}

// --- 10 ----------------------------------------------------------------

std::string c10_small_eigenvalue_lemma() {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        SmallEigInstance inst = make_random_small_eig_instance(seed);
        SmallEigReport rep = verify_small_eig(inst);
        if (!rep.projection_ok || !rep.eigenvalue_ok)
            return "bound violated at seed " + std::to_string(seed);
    }
    // tightness slopes as f -> phi
    SmallEigInstance base = make_random_small_eig_instance(2024);
    Vector w = base.basis_h1.front();
    std::vector<double> xs, y1, y2;
    for (double t = 1e-4; t <= 1e-2 + 1e-15; t *= std::sqrt(10.0)) {
        SmallEigInstance probe = base;
        probe.f = probe.phi;
        blas::axpy(t, w, probe.f);
        double nf = blas::nrm2(probe.f);
        for (auto& v : probe.f) v /= nf;
        SmallEigReport rep = verify_small_eig(probe);
        Vector diff = probe.f;
        blas::axpy(-1.0, probe.phi, diff);
        xs.push_back(std::log(blas::nrm2(diff)));
        y1.push_back(std::log(rep.projection_error));
        y2.push_back(std::log(rep.eigenvalue_error));
    }
    double s1 = fit_slope(xs, y1), s2 = fit_slope(xs, y2);
    if (std::abs(s1 - 1.0) > 0.1) return "projection tightness slope " + fmt(s1);
    if (std::abs(s2 - 2.0) > 0.1) return "eigenvalue tightness slope " + fmt(s2);
    return "";
}

// --- 11 ----------------------------------------------------------------

std::string c11_scaling_exponents() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.3, 1.0);
    const double R = 2.0;
    for (int j : {1, 2, 3}) {
        std::vector<double> a(j + 1, 0.0), b(j + 1, 0.0);
        for (int i = 1; i <= j; ++i) {
            a[i] = U(rng);
            b[i] = U(rng);
        }
        FourierHoleData pow_d{j, a, b};
        std::vector<double> a0(j + 1, 0.0), b0(j + 1, 0.0);
        a0[0] = 0.7;
        FourierHoleData log_d{j, a0, b0};
        std::vector<double> xs, yp, yl;
        for (int i = 0; i < 9; ++i) {
            double eps = 1e-3 * std::pow(100.0, i / 8.0);
            xs.push_back(std::log(eps));
            yp.push_back(std::log(annulus_fourier_torsion(eps, R, pow_d)));
            yl.push_back(
                std::log(annulus_fourier_torsion(eps, R, log_d) / std::abs(std::log(eps))));
        }
        double sp = fit_slope(xs, yp), sl = fit_slope(xs, yl);
        if (std::abs(sp - 2.0 * j) > 0.02)
            return "power slope " + fmt(sp) + " at j = " + std::to_string(j);
        if (std::abs(sl - 2.0 * j) > 0.02)
            return "log-corrected slope " + fmt(sl) + " at j = " + std::to_string(j);
    }
    return "";
}

// --- 12 ----------------------------------------------------------------

std::string c12_disk_figure_data() {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "nh_acceptance_gamma";
    fs::create_directories(dir);
    for (int k : {1, 2}) {
        DiskGammaFigure fig = compute_disk_gamma(2.0, k, 301);
        AnalyticEigenfunction mode = make_disk_mode(2.0, k);
        if (fig.gamma_radii.empty()) return "no interface radii found";
        for (double r : fig.gamma_radii)
            if (std::abs(gamma_indicator(mode, {r, 0.0})) > 1e-12)
                return "h(r*) = " + fmt(gamma_indicator(mode, {r, 0.0}));
        double alpha = bessel::j0_prime_zero(k);
        double nodal_exact = 2.0 * bessel::j0_zero(1) / alpha;
        if (std::abs(fig.nodal_radii[0] - nodal_exact) > 1e-10)
            return "nodal radius off by " + fmt(fig.nodal_radii[0] - nodal_exact);
        std::ofstream svg(dir / ("gamma_k" + std::to_string(k) + ".svg"));
        write_disk_gamma_svg(svg, fig);
        std::ofstream csv(dir / ("gamma_k" + std::to_string(k) + ".csv"));
        write_disk_gamma_csv(csv, fig);
        if (!svg || !csv) return "figure emission failed";
    }
    for (int k : {1, 2}) {
        if (!fs::exists(dir / ("gamma_k" + std::to_string(k) + ".svg")) ||
            fs::file_size(dir / ("gamma_k" + std::to_string(k) + ".svg")) == 0)
            return "missing SVG output";
    }
    return "";
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "box spectrum and Gamma planes to 1e-12", c1_box_spectrum},
        {2, "Bessel derivative roots and residuals", c2_bessel_roots},
        {3, "exterior-ball torsion via the radial ODE", c3_exterior_torsion},
        {4, "annulus Fourier vs FEM torsion within 1%, order >= 1.8", c4_fourier_vs_fem},
        {5, "nodal-line shift: exponent 2 +/- 0.1, coefficient -2pi|grad|^2 +/- 10%",
         c5_nodal_sweep},
        {6, "anti-node shift: exponent 2 +/- 0.1, +pi(lambda-1)phi^2 +/- 10%, all positive",
         c6_antinode_sweep},
        {7, "two-term split predicts the measured shift within 10% at eps = 0.05",
         c7_term_split},
        {8, "torsion identities to 1e-10 and domain-inclusion ordering",
         c8_identities_and_monotonicity},
        {9, "sup characterization: 100 draws below T, maximizer attains to 1e-10",
         c9_sup_characterization},
        {10, "small-eigenvalue lemma bounds on 500 instances, tightness slopes",
         c10_small_eigenvalue_lemma},
        {11, "closed-form scaling exponents 2j +/- 0.02 over eps in [1e-3, 1e-1]",
         c11_scaling_exponents},
        {12, "disk Gamma figure data: h(r*) <= 1e-12, nodal radii, SVG/CSV emitted",
         c12_disk_figure_data},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string err;
        try {
            err = c.run();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        if (err.empty()) {
            std::printf("PASS  criterion %2d  %s  [%ld ms]%s\n", c.id, c.title.c_str(), ms,
                        c.id == 4 && !g_c4_details.empty()
                            ? ("  (" + g_c4_details + ")").c_str()
                            : "");
        } else {
            std::printf("FAIL  criterion %2d  %s  [%ld ms]\n      %s\n", c.id, c.title.c_str(),
                        ms, err.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
