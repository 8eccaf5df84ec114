#include "doctest.h"

#include <cmath>
#include <random>

#include "neumann_holes/analytic.hpp"
#include "neumann_holes/torsion.hpp"

using namespace nh;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Problem {
    FemSpace space;
    SparseSym K, M;
};

Problem annulus_problem(double R, double eps, double h, int refine = 0) {
    DomainSpec d{Disk{{0, 0}, R}, std::nullopt};
    d.hole = HoleSpec{CircleHole{}, {0, 0}, eps};
    Mesh m = generate_mesh(d, h);
    for (int i = 0; i < refine; ++i) m = refine_uniform(m);
    Problem p{FemSpace::build(std::move(m), 1), {}, {}};
    p.K = assemble_stiffness(p.space);
    p.M = assemble_mass(p.space);
    return p;
}

FourierHoleData simple_data(int j, std::vector<double> a, std::vector<double> b) {
    FourierHoleData d;
    d.degree = j;
    d.a = std::move(a);
    d.b = std::move(b);
    return d;
}

} // namespace

TEST_CASE("closed form matches the j=1 hand formula") {
    for (double R : {1.0, 2.0})
        for (double eps : {0.05, 0.1, 0.2}) {
            FourierHoleData d = simple_data(1, {0.0, 1.0}, {0.0, 0.0});
            double expect = kPi * eps * eps * (R * R + eps * eps) / (R * R - eps * eps);
            CHECK(annulus_fourier_torsion(eps, R, d) == doctest::Approx(expect).epsilon(1e-13));
        }
    // eps=0.1, R=1: pi * 0.01 * 1.01/0.99
    FourierHoleData d = simple_data(1, {0.0, 1.0}, {0.0, 0.0});
    CHECK(annulus_fourier_torsion(0.1, 1.0, d) ==
          doctest::Approx(kPi * 0.01 * 1.01 / 0.99).epsilon(1e-14));
}

TEST_CASE("closed form edge cases") {
    FourierHoleData zero = simple_data(2, {0, 0, 0}, {0, 0, 0});
    CHECK(annulus_fourier_torsion(0.1, 1.0, zero) == 0.0);
    FourierHoleData d = simple_data(1, {0.0, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(annulus_fourier_torsion(1.0, 1.0, d), DomainError);
    CHECK_THROWS_AS(annulus_fourier_torsion(2.0, 1.0, d), DomainError);
    // nonnegativity on random data
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        int j = 1 + it % 3;
        std::vector<double> a(j + 1), b(j + 1, 0.0);
        for (auto& v : a) v = U(rng);
        for (int i = 1; i <= j; ++i) b[i] = U(rng);
        CHECK(annulus_fourier_torsion(0.05 + 0.1 * std::abs(U(rng)), 2.0,
                                      simple_data(j, a, b)) >= 0.0);
    }
}

TEST_CASE("log-law: T/(eps^{2j}|log eps|) approaches pi j^2 a0^2 / 2") {
    // j=2, only a0 nonzero: the limit constant is pi j^2 a0^2 / 2 = 2 pi a0^2
    FourierHoleData d = simple_data(2, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    double prev_gap = 1e300;
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        double ratio = annulus_fourier_torsion(eps, 2.0, d) /
                       (std::pow(eps, 4) * std::abs(std::log(eps)));
        double gap = std::abs(ratio - 2.0 * kPi);
        CHECK(gap < prev_gap);
        prev_gap = gap;
        CHECK(ratio == doctest::Approx(2.0 * kPi).epsilon(0.1));
    }
}

TEST_CASE("interior torsion: zero load and the load/energy identities") {
    Problem p = annulus_problem(1.0, 0.1, 0.1);
    TorsionSolution zero =
        solve_interior_torsion(p.space, p.K, p.M, BoundaryTrace{[](const Vec2&) { return 0.0; }});
    CHECK(zero.T == 0.0);
    for (double v : zero.U) CHECK(std::abs(v) <= 1e-14);

    FourierHoleData d = simple_data(1, {0.0, 1.0}, {0.0, 0.3});
    TorsionSolution s =
        solve_interior_torsion(p.space, p.K, p.M, fourier_trace(d, {0, 0}, 0.1));
    CHECK(s.T > 0.0);
    CHECK(s.solve_residual <= 1e-10);
    CHECK(s.identity_energy_residual <= 1e-10);
    CHECK(std::abs(s.T - blas::dot(s.load, s.U)) <= 1e-10 * s.T);
}

TEST_CASE("annulus FEM (zero-average) converges to the Fourier closed form") {
    // j=1 cos data on B_1 \ B_0.1
    const double R = 1.0, eps = 0.1;
    FourierHoleData d = simple_data(1, {0.0, 1.0}, {0.0, 0.0});
    double exact = annulus_fourier_torsion(eps, R, d);
    CHECK(exact == doctest::Approx(kPi * 0.01 * 1.01 / 0.99).epsilon(1e-13));

    std::vector<double> errs;
    for (int lvl = 0; lvl < 3; ++lvl) {
        Problem p = annulus_problem(R, eps, 0.06, lvl);
        TorsionSolution s =
            solve_zero_average_torsion(p.space, p.K, p.M, fourier_trace(d, {0, 0}, eps));
        errs.push_back(std::abs(s.T - exact) / exact);
        CHECK(s.identity_energy_residual <= 1e-10);
    }
    CHECK(errs.back() < 0.01);
    double order = std::log2(errs[1] / errs[2]);
    CHECK(order >= 1.8);
}

TEST_CASE("Sobolev torsion approaches the zero-average value as eps shrinks") {
    const double R = 1.0;
    FourierHoleData d = simple_data(1, {0.0, 0.7}, {0.0, 0.7});
    double prev_ratio_gap = 1e300;
    for (double eps : {0.2, 0.05}) {
        Problem p = annulus_problem(R, eps, 0.05, 1);
        TorsionSolution sob =
            solve_interior_torsion(p.space, p.K, p.M, fourier_trace(d, {0, 0}, eps));
        double exact = annulus_fourier_torsion(eps, R, d);
        double gap = std::abs(sob.T / exact - 1.0);
        CHECK(gap < prev_ratio_gap);
        prev_ratio_gap = gap;
    }
    CHECK(prev_ratio_gap < 0.05);
}

TEST_CASE("monotonicity with respect to domain inclusion") {
    // zero-mean hole data: the closed form is decreasing in R (for a0 != 0 the
    // zero-average functional instead grows logarithmically with R and the
    // domain-inclusion ordering only applies to the Sobolev torsion)
    FourierHoleData d = simple_data(2, {0.0, -0.4, 0.8}, {0.0, 0.5, -0.2});
    const double eps = 0.1;
    double prev = 1e300;
    for (double R : {0.8, 1.0, 1.5, 2.0, 3.0}) {
        double t = annulus_fourier_torsion(eps, R, d);
        CHECK(t <= prev + 1e-15);
        prev = t;
    }
    // FEM Sobolev ordering within combined tolerance
    FourierHoleData d1 = simple_data(1, {0.0, 1.0}, {0.0, 0.0});
    Problem small = annulus_problem(0.8, eps, 0.04, 1);
    Problem big = annulus_problem(1.6, eps, 0.04, 1);
    TorsionSolution ts =
        solve_interior_torsion(small.space, small.K, small.M, fourier_trace(d1, {0, 0}, eps));
    TorsionSolution tb =
        solve_interior_torsion(big.space, big.K, big.M, fourier_trace(d1, {0, 0}, eps));
    CHECK(tb.T <= ts.T * (1.0 + 1e-3));
}

TEST_CASE("sup characterization bound") {
    Problem p = annulus_problem(1.0, 0.1, 0.07);
    FourierHoleData d = simple_data(1, {0.0, 1.0}, {0.0, 0.5});
    BoundaryTrace f = fourier_trace(d, {0, 0}, 0.1);
    TorsionSolution s = solve_interior_torsion(p.space, p.K, p.M, f);

    // the optimizer attains T
    CHECK(sup_characterization_bound(p.space, p.K, p.M, f, s.U) ==
          doctest::Approx(s.T).epsilon(1e-10));

    // constant test vector: (int f ds)^2 / |Omega_eps| <= T
    Vector ones(p.space.dof_count, 1.0);
    double cb = sup_characterization_bound(p.space, p.K, p.M, f, ones);
    double total_load = 0.0;
    for (double v : s.load) total_load += v;
    CHECK(cb == doctest::Approx(total_load * total_load / p.space.mesh.total_area()).epsilon(1e-10));
    CHECK(cb <= s.T * (1.0 + 1e-12));

    // 100 random draws never exceed T
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        Vector u(p.space.dof_count);
        for (auto& v : u) v = U(rng);
        CHECK(sup_characterization_bound(p.K, p.M, s.load, u) <= s.T * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(sup_characterization_bound(p.K, p.M, s.load, Vector(p.space.dof_count, 0.0)),
                    ZeroVectorError);
}

TEST_CASE("exterior ball torsion closed form") {
    // N=3, k=1, int Y^2 = 4pi/3 -> tau = 2pi/3 = omega_3/(N-1) for unit gradient
    ExteriorTorsion t = exterior_ball_torsion(3, 1, 4.0 * kPi / 3.0);
    CHECK(t.tau == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(t.tau == doctest::Approx(unit_ball_volume(3) / 2.0).epsilon(1e-14));

    CHECK(exterior_ball_torsion(4, 2, 0.0).tau == 0.0);
    CHECK_THROWS_AS(exterior_ball_torsion(2, 1, 1.0), DomainError);
    CHECK_THROWS_AS(exterior_ball_torsion(3, 0, 1.0), Error);
}

TEST_CASE("radial exterior ODE reproduces the closed-form decay mode") {
    for (int N : {3, 4, 5})
        for (int k : {1, 2, 3}) {
            RadialOdeReport rep = radial_exterior_ode_check(N, k, 12.0);
            CHECK(rep.max_rel_deviation <= 1e-8);
            CHECK(rep.u_at_1 == doctest::Approx(-double(k) / (N + k - 2.0)).epsilon(1e-9));
            CHECK(rep.decay_exponent == doctest::Approx(N + k - 2.0).epsilon(1e-3));
        }
    // N=3,k=1 and N=4,k=2 both give u(1) = -1/2
    CHECK(radial_exterior_ode_check(3, 1, 12.0).u_at_1 == doctest::Approx(-0.5).epsilon(1e-9));
    RadialOdeReport r42 = radial_exterior_ode_check(4, 2, 12.0);
    CHECK(r42.u_at_1 == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(r42.decay_exponent == doctest::Approx(4.0).epsilon(1e-3));

    // tau consistency: tau = -k u(1) int Y^2 matches the closed form
    double y2 = 4.0 * kPi / 3.0;
    RadialOdeReport r31 = radial_exterior_ode_check(3, 1, 12.0);
    double tau_ode = -1.0 * r31.u_at_1 * y2;
    CHECK(tau_ode == doctest::Approx(exterior_ball_torsion(3, 1, y2).tau).epsilon(1e-8));

    CHECK_THROWS_AS(radial_exterior_ode_check(2, 1, 12.0), DomainError);
    CHECK_THROWS_AS(radial_exterior_ode_check(3, 1, 5.0), DomainError);
}

TEST_CASE("scaling exponents of the closed form over the acceptance window") {
    // a0 = 0: slope 2j; a0 != 0: slope of T/|log eps| equal to 2j (R = 2)
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> U(0.3, 1.0);
    for (int j : {1, 2, 3}) {
        std::vector<double> a(j + 1, 0.0), b(j + 1, 0.0);
        for (int i = 1; i <= j; ++i) {
            a[i] = U(rng);
            b[i] = U(rng);
        }
        std::vector<double> xs, ys, yl;
        FourierHoleData pow_data = simple_data(j, a, b);
        std::vector<double> a0(j + 1, 0.0);
        a0[0] = 1.0;
        FourierHoleData log_data = simple_data(j, a0, std::vector<double>(j + 1, 0.0));
        for (int i = 0; i < 9; ++i) {
            double eps = 1e-3 * std::pow(100.0, i / 8.0);
            xs.push_back(std::log(eps));
            ys.push_back(std::log(annulus_fourier_torsion(eps, 2.0, pow_data)));
            yl.push_back(std::log(annulus_fourier_torsion(eps, 2.0, log_data) /
                                  std::abs(std::log(eps))));
        }
        auto slope = [&](const std::vector<double>& y) {
            double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i]; sy += y[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * y[i];
            }
            return (n * sxy - sx * sy) / (n * sxx - sx * sx);
        };
        CHECK(std::abs(slope(ys) - 2.0 * j) <= 0.02);
        CHECK(std::abs(slope(yl) - 2.0 * j) <= 0.02);
    }
}

TEST_CASE("two-term split matches the pointwise 2D coefficient in the limit") {
    AnalyticEigenfunction f = make_box_mode({1.0, std::pow(2.0, 0.25)}, {0, 1});
    Point nodal = {0.5, std::pow(2.0, 0.25) / 2.0};
    auto g = f.gradient(nodal);
    ShiftPrediction direct = predict_shift_2d(f, nodal);

    const double eps = 1e-5, R = 0.25; // any fixed annulus radius
    FourierHoleData d = simple_data(1, {0.0, g[0]}, {0.0, g[1]});
    double torsion = annulus_fourier_torsion(eps, R, d);
    double volume = hole_energy_integral(f, nodal, eps);
    ShiftPrediction split = predict_shift_general(torsion, volume);
    CHECK(split.coeff / (eps * eps) == doctest::Approx(direct.coeff).epsilon(1e-6));
}
