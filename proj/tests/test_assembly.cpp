#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "neumann_holes/assembly.hpp"

using namespace nh;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mesh single_triangle(Vec2 a, Vec2 b, Vec2 c) {
    Mesh m;
    m.vertices = {a, b, c};
    m.triangles = {{0, 1, 2}};
    m.boundary_edges = {{0, 1, BoundaryTag::Outer}, {1, 2, BoundaryTag::Outer}, {2, 0, BoundaryTag::Outer}};
    m.h_target = 1.0;
    return m;
}

Mesh two_triangle_square() {
    Mesh m;
    m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.boundary_edges = {{0, 1, BoundaryTag::Outer}, {1, 2, BoundaryTag::Outer},
                        {2, 3, BoundaryTag::Outer}, {3, 0, BoundaryTag::Outer}};
    m.h_target = 1.0;
    return m;
}

// High-order quadrature oracle on a triangle via the collapsed square
// (Duffy) map with a 16x16 Gauss-Legendre grid.
struct DuffyOracle {
    std::vector<double> nodes, weights;
    DuffyOracle() {
        const int n = 16;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            double b = i / std::sqrt(4.0 * i * i - 1.0);
            J(i, i - 1) = J(i - 1, i) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        for (int i = 0; i < n; ++i) {
            nodes.push_back(0.5 * (es.eigenvalues()(i) + 1.0));
            weights.push_back(es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
        }
    }
    template <class F>
    double integrate(Vec2 p0, Vec2 p1, Vec2 p2, F&& f) const {
        double det = (p1 - p0).cross(p2 - p0);
        double s = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = 0; j < nodes.size(); ++j) {
                double u = nodes[i], v = nodes[j];
                double l1 = u, l2 = v * (1.0 - u); // Duffy collapse, jacobian (1-u)
                Vec2 x = p0 + (p1 - p0) * l1 + (p2 - p0) * l2;
                s += weights[i] * weights[j] * (1.0 - u) * f(x, l1, l2);
            }
        return s * det;
    }
};

} // namespace

TEST_CASE("P1 element stiffness matches the analytic cotangent weights") {
    Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
    FemSpace sp = FemSpace::build(m, 1);
    SparseSym K = assemble_stiffness(sp);
    // unit right triangle: K = 1/2 [[2,-1,-1],[-1,1,0],[-1,0,1]]
    double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int k = K.row_offsets[i]; k < K.row_offsets[i + 1]; ++k)
            CHECK(K.values[k] == doctest::Approx(expect[i][K.col_indices[k]]).epsilon(1e-14));
}

TEST_CASE("stiffness annihilates constants") {
    DomainSpec d{Rectangle{0, 1, 0, 1}, std::nullopt};
    Mesh m = generate_mesh(d, 0.1);
    FemSpace sp = FemSpace::build(m, 1);
    SparseSym K = assemble_stiffness(sp);
    Vector ones(sp.dof_count, 1.0);
    Vector k1 = K.multiply(ones);
    double scale = K.norm_inf();
    for (double v : k1) CHECK(std::abs(v) <= 1e-12 * scale);
}

TEST_CASE("two-element square agrees with a high-order quadrature oracle") {
    Mesh m = two_triangle_square();
    DuffyOracle oracle;
    for (int order : {1, 2}) {
        FemSpace sp = FemSpace::build(m, order);
        SparseSym K = assemble_stiffness(sp);
        SparseSym M = assemble_mass(sp);

        // dense reference via independent quadrature of shape function products
        Eigen::MatrixXd Kref = Eigen::MatrixXd::Zero(sp.dof_count, sp.dof_count);
        Eigen::MatrixXd Mref = Eigen::MatrixXd::Zero(sp.dof_count, sp.dof_count);
        for (size_t e = 0; e < sp.element_dofs.size(); ++e) {
            const auto& tri = m.triangles[e];
            Vec2 p0 = m.vertices[tri[0]], p1 = m.vertices[tri[1]], p2 = m.vertices[tri[2]];
            double det = (p1 - p0).cross(p2 - p0);
            Vec2 g1{(p2.y - p0.y) / det, (p0.x - p2.x) / det};
            Vec2 g2{(p0.y - p1.y) / det, (p1.x - p0.x) / det};
            Vec2 g0{-g1.x - g2.x, -g1.y - g2.y};
            const auto& ed = sp.element_dofs[e];
            int nd = (int)ed.size();
            auto shape = [&](int i, double l0, double l1, double l2) {
                if (order == 1) return i == 0 ? l0 : (i == 1 ? l1 : l2);
                switch (i) {
                    case 0: return l0 * (2 * l0 - 1);
                    case 1: return l1 * (2 * l1 - 1);
                    case 2: return l2 * (2 * l2 - 1);
                    case 3: return 4 * l0 * l1;
                    case 4: return 4 * l1 * l2;
                    default: return 4 * l2 * l0;
                }
            };
            auto grad = [&](int i, double l0, double l1, double l2) {
                if (order == 1) return i == 0 ? g0 : (i == 1 ? g1 : g2);
                switch (i) {
                    case 0: return Vec2{g0.x * (4 * l0 - 1), g0.y * (4 * l0 - 1)};
                    case 1: return Vec2{g1.x * (4 * l1 - 1), g1.y * (4 * l1 - 1)};
                    case 2: return Vec2{g2.x * (4 * l2 - 1), g2.y * (4 * l2 - 1)};
                    case 3: return Vec2{4 * (l0 * g1.x + l1 * g0.x), 4 * (l0 * g1.y + l1 * g0.y)};
                    case 4: return Vec2{4 * (l1 * g2.x + l2 * g1.x), 4 * (l1 * g2.y + l2 * g1.y)};
                    default: return Vec2{4 * (l2 * g0.x + l0 * g2.x), 4 * (l2 * g0.y + l0 * g2.y)};
                }
            };
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j < nd; ++j) {
                    Kref(ed[i], ed[j]) += oracle.integrate(p0, p1, p2, [&](Vec2, double l1v, double l2v) {
                        double l0v = 1.0 - l1v - l2v;
                        return grad(i, l0v, l1v, l2v).dot(grad(j, l0v, l1v, l2v));
                    });
                    Mref(ed[i], ed[j]) += oracle.integrate(p0, p1, p2, [&](Vec2, double l1v, double l2v) {
                        double l0v = 1.0 - l1v - l2v;
                        return shape(i, l0v, l1v, l2v) * shape(j, l0v, l1v, l2v);
                    });
                }
        }
        for (int i = 0; i < sp.dof_count; ++i) {
            for (int k = K.row_offsets[i]; k < K.row_offsets[i + 1]; ++k)
                CHECK(std::abs(K.values[k] - Kref(i, K.col_indices[k])) <= 1e-13 * std::max(1.0, K.norm_inf()));
            for (int k = M.row_offsets[i]; k < M.row_offsets[i + 1]; ++k)
                CHECK(std::abs(M.values[k] - Mref(i, M.col_indices[k])) <= 1e-13);
        }
    }
}

TEST_CASE("P1 element mass matrix is (A/12)[[2,1,1],[1,2,1],[1,1,2]]") {
    Mesh m = single_triangle({0.2, 0.1}, {1.3, 0.4}, {0.5, 1.7});
    double A = geom::triangle_area(m.vertices[0], m.vertices[1], m.vertices[2]);
    FemSpace sp = FemSpace::build(m, 1);
    SparseSym M = assemble_mass(sp);
    for (int i = 0; i < 3; ++i)
        for (int k = M.row_offsets[i]; k < M.row_offsets[i + 1]; ++k) {
            double expect = (M.col_indices[k] == i ? 2.0 : 1.0) * A / 12.0;
            CHECK(M.values[k] == doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("mass total equals area; annulus area converges at O(h^2)") {
    DomainSpec d{Disk{{0, 0}, 1.0}, std::nullopt};
    d.hole = HoleSpec{CircleHole{}, {0, 0}, 0.1};
    Mesh m = generate_mesh(d, 0.08);
    for (int lvl = 0; lvl < 2; ++lvl) {
        FemSpace sp = FemSpace::build(m, 1);
        SparseSym M = assemble_mass(sp);
        Vector ones(sp.dof_count, 1.0);
        double area = M.quad_form(ones, ones);
        CHECK(area == doctest::Approx(m.total_area()).epsilon(1e-12));
        double exact = kPi * (1.0 - 0.01);
        CHECK(std::abs(area - exact) < 1.5 * std::pow(m.h_target, 2.0));
        m = refine_uniform(m);
    }
}

TEST_CASE("mass matrix is positive definite on a random small mesh") {
    DomainSpec d{Rectangle{0, 1, 0, 1}, std::nullopt};
    Mesh m = generate_mesh(d, 0.25);
    for (int order : {1, 2}) {
        FemSpace sp = FemSpace::build(m, order);
        SparseSym M = assemble_mass(sp);
        Eigen::MatrixXd Md = Eigen::MatrixXd::Zero(M.dim, M.dim);
        for (int i = 0; i < M.dim; ++i)
            for (int k = M.row_offsets[i]; k < M.row_offsets[i + 1]; ++k)
                Md(i, M.col_indices[k]) = M.values[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Md);
        CHECK(es.eigenvalues()(0) > 0.0);
    }
}

TEST_CASE("boundary load basics") {
    DomainSpec d{Rectangle{0, 1, 0, 1}, std::nullopt};
    d.hole = HoleSpec{CircleHole{}, {0.5, 0.5}, 0.08};
    Mesh m = generate_mesh(d, 0.1);
    FemSpace sp = FemSpace::build(m, 1);

    Vector b0 = assemble_boundary_load(sp, BoundaryTrace{[](const Vec2&) { return 0.0; }});
    for (double v : b0) CHECK(v == 0.0);

    Vector b1 = assemble_boundary_load(sp, BoundaryTrace{[](const Vec2&) { return 1.0; }});
    double total = 0.0;
    for (double v : b1) total += v;
    CHECK(total == doctest::Approx(m.boundary_length(BoundaryTag::Hole)).epsilon(1e-12));
    // supported on hole dofs only
    std::vector<char> is_hole(sp.dof_count, 0);
    for (int i : sp.hole_boundary_dofs) is_hole[i] = 1;
    for (int i = 0; i < sp.dof_count; ++i)
        if (!is_hole[i]) CHECK(b1[i] == 0.0);

    Mesh nohole = generate_mesh(DomainSpec{Rectangle{0, 1, 0, 1}, std::nullopt}, 0.2);
    FemSpace sp2 = FemSpace::build(nohole, 1);
    CHECK_THROWS_AS(assemble_boundary_load(sp2, BoundaryTrace{[](const Vec2&) { return 1.0; }}),
                    NoHoleError);
}

TEST_CASE("odd trace integrates to zero on the unit circle") {
    DomainSpec d{Disk{{0, 0}, 4.5}, std::nullopt};
    d.hole = HoleSpec{CircleHole{}, {0, 0}, 1.0};
    Mesh m = generate_mesh(d, 0.5);
    FemSpace sp = FemSpace::build(m, 1);
    Vector b = assemble_boundary_load(
        sp, BoundaryTrace{[](const Vec2& p) { return p.x / p.norm(); }});
    double total = 0.0;
    for (double v : b) total += v;
    CHECK(std::abs(total) <= 1e-10);
}

TEST_CASE("h1 and l2 inner products") {
    DomainSpec d{Disk{{0, 0}, 1.0}, std::nullopt};
    d.hole = HoleSpec{CircleHole{}, {0, 0}, 0.1};
    Mesh m = generate_mesh(d, 0.1);
    FemSpace sp = FemSpace::build(m, 1);
    Vector ones(sp.dof_count, 1.0);
    double area = m.total_area();
    CHECK(h1_inner(sp, ones, ones) == doctest::Approx(area).epsilon(1e-12));
    CHECK(l2_inner(sp, ones, ones) == doctest::Approx(area).epsilon(1e-12));

    // Gram-Schmidt: v orthogonal to u under M
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vector u(sp.dof_count), v(sp.dof_count);
    for (auto& x : u) x = U(rng);
    for (auto& x : v) x = U(rng);
    double c = l2_inner(sp, v, u) / l2_inner(sp, u, u);
    for (int i = 0; i < sp.dof_count; ++i) v[i] -= c * u[i];
    double nu = std::sqrt(l2_inner(sp, u, u)), nv = std::sqrt(l2_inner(sp, v, v));
    CHECK(std::abs(l2_inner(sp, u, v)) <= 1e-12 * nu * nv);
}

TEST_CASE("h1 norm of the coordinate function on the unit square") {
    DomainSpec d{Rectangle{0, 1, 0, 1}, std::nullopt};
    Mesh m = generate_mesh(d, 0.05);
    FemSpace sp = FemSpace::build(m, 1);
    Vector u = interpolate(sp, [](const Vec2& p) { return p.x; });
    // |grad x|^2 |Omega| + int x^2 = 1 + 1/3
    CHECK(h1_inner(sp, u, u) == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(2.0 * 0.05 * 0.05));
}

TEST_CASE("Galerkin symmetry for random vectors") {
    DomainSpec d{Rectangle{0, 1, 0, 1.2}, std::nullopt};
    Mesh m = generate_mesh(d, 0.1);
    for (int order : {1, 2}) {
        FemSpace sp = FemSpace::build(m, order);
        SparseSym K = assemble_stiffness(sp);
        SparseSym M = assemble_mass(sp);
        CHECK(K.symmetry_error() <= 1e-14);
        CHECK(M.symmetry_error() <= 1e-14);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int rep = 0; rep < 5; ++rep) {
            Vector u(sp.dof_count), v(sp.dof_count);
            for (auto& x : u) x = U(rng);
            for (auto& x : v) x = U(rng);
            double nu = blas::nrm2(u), nv = blas::nrm2(v);
            CHECK(std::abs(K.quad_form(u, v) - K.quad_form(v, u)) <= 1e-13 * K.norm_inf() * nu * nv);
            CHECK(std::abs(M.quad_form(u, v) - M.quad_form(v, u)) <= 1e-13 * M.norm_inf() * nu * nv);
        }
    }
}

TEST_CASE("affine interpolants reproduce the Dirichlet energy exactly") {
    DomainSpec d{Rectangle{0, 1, 0, 1.2}, std::nullopt};
    d.hole = HoleSpec{CircleHole{}, {0.5, 0.6}, 0.07};
    Mesh m = generate_mesh(d, 0.05);
    FemSpace sp = FemSpace::build(m, 1);
    SparseSym K = assemble_stiffness(sp);
    double a = 0.7, b = -1.3, c = 0.25;
    Vector g = interpolate(sp, [&](const Vec2& p) { return a * p.x + b * p.y + c; });
    double energy = K.quad_form(g, g);
    double exact = m.total_area() * (a * a + b * b);
    CHECK(energy == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("P2 mass on the reference triangle is exact against symbolic integration") {
    Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
    FemSpace sp = FemSpace::build(m, 2);
    SparseSym M = assemble_mass(sp);

    // symbolic: each P2 shape is a polynomial in (l0,l1,l2);
    // integral of l0^a l1^b l2^c over the triangle is 2A a! b! c! / (a+b+c+2)!
    auto fact = [](int n) { double f = 1; for (int i = 2; i <= n; ++i) f *= i; return f; };
    auto mono = [&](int a, int b, int c) {
        return 2.0 * 0.5 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
    };
    // shape i as coefficient list over monomials (e0,e1,e2) -> coeff
    struct Term { int e[3]; double c; };
    auto shape_terms = [&](int i) -> std::vector<Term> {
        switch (i) {
            case 0: return {{{2, 0, 0}, 2.0}, {{1, 0, 0}, -1.0}};
            case 1: return {{{0, 2, 0}, 2.0}, {{0, 1, 0}, -1.0}};
            case 2: return {{{0, 0, 2}, 2.0}, {{0, 0, 1}, -1.0}};
            case 3: return {{{1, 1, 0}, 4.0}};
            case 4: return {{{0, 1, 1}, 4.0}};
            default: return {{{1, 0, 1}, 4.0}};
        }
    };
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double exact = 0.0;
            for (const auto& ti : shape_terms(i))
                for (const auto& tj : shape_terms(j))
                    exact += ti.c * tj.c * mono(ti.e[0] + tj.e[0], ti.e[1] + tj.e[1], ti.e[2] + tj.e[2]);
            const auto& ed = sp.element_dofs[0];
            double got = 0.0;
            for (int k = M.row_offsets[ed[i]]; k < M.row_offsets[ed[i] + 1]; ++k)
                if (M.col_indices[k] == ed[j]) got = M.values[k];
            CHECK(got == doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("matrix market export") {
    Mesh m = two_triangle_square();
    FemSpace sp = FemSpace::build(m, 1);
    SparseSym K = assemble_stiffness(sp);
    std::stringstream ss;
    write_matrix_market(ss, K);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
    int r, c, nnz;
    ss >> r >> c >> nnz;
    CHECK(r == 4);
    CHECK(c == 4);
    CHECK(nnz > 0);
}
