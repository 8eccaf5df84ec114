#include "neumann_holes/torsion.hpp"

#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace nh {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::SparseMatrix<double> to_eigen(const SparseSym& a) {
    Eigen::SparseMatrix<double> m(a.dim, a.dim);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(a.values.size());
    for (int i = 0; i < a.dim; ++i)
        for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            trips.emplace_back(i, a.col_indices[k], a.values[k]);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

double rel_residual(const SparseSym& A, const Vector& x, const Vector& b) {
    Vector r = A.multiply(x);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    double nb = blas::nrm2(b);
    return nb > 0.0 ? blas::nrm2(r) / nb : blas::nrm2(r);
}

} // namespace

TorsionSolution solve_interior_torsion(const FemSpace& space, const SparseSym& K,
                                       const SparseSym& M, const BoundaryTrace& f) {
    Vector b = assemble_boundary_load(space, f); // throws NoHoleError if needed
    SparseSym A = K.plus(M);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.compute(to_eigen(A));
    if (llt.info() != Eigen::Success)
        throw FactorizationError("sparse Cholesky of K+M failed");
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
    Eigen::VectorXd x = llt.solve(bv);
    TorsionSolution sol;
    sol.U.assign(x.data(), x.data() + x.size());
    sol.load = b;
    sol.T = blas::dot(b, sol.U);
    sol.solve_residual = rel_residual(A, sol.U, b);
    double energy = A.quad_form(sol.U, sol.U);
    sol.identity_energy_residual =
        sol.T != 0.0 ? std::abs(sol.T - energy) / std::abs(sol.T) : std::abs(energy);
    return sol;
}

TorsionSolution solve_zero_average_torsion(const FemSpace& space, const SparseSym& K,
                                           const SparseSym& M, const BoundaryTrace& f) {
    Vector b = assemble_boundary_load(space, f);
    const int n = K.dim;
    Vector ones(n, 1.0);
    Vector m1 = M.multiply(ones);
    double vol = blas::dot(ones, m1);
    double mu = blas::dot(ones, b) / vol;
    Vector rhs = b;
    blas::axpy(-mu, m1, rhs);

    // pin dof 0 to lift the constant kernel, then shift back to zero average
    Eigen::SparseMatrix<double> A = to_eigen(K);
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < A.outerSize(); ++i)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, i); it; ++it) {
            if (it.row() == 0 || it.col() == 0) continue;
            trips.emplace_back(it.row(), it.col(), it.value());
        }
    trips.emplace_back(0, 0, 1.0);
    Eigen::SparseMatrix<double> Ap(n, n);
    Ap.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.compute(Ap);
    if (llt.info() != Eigen::Success)
        throw FactorizationError("sparse Cholesky of the pinned stiffness failed");
    Vector rhs_p = rhs;
    rhs_p[0] = 0.0;
    Eigen::Map<const Eigen::VectorXd> rv(rhs_p.data(), n);
    Eigen::VectorXd x = llt.solve(rv);

    TorsionSolution sol;
    sol.U.assign(x.data(), x.data() + n);
    double mean = blas::dot(m1, sol.U) / vol;
    for (auto& v : sol.U) v -= mean;
    sol.load = b;
    sol.T = blas::dot(b, sol.U);
    sol.solve_residual = rel_residual(K, sol.U, rhs);
    double energy = K.quad_form(sol.U, sol.U);
    sol.identity_energy_residual =
        sol.T != 0.0 ? std::abs(sol.T - energy) / std::abs(sol.T) : std::abs(energy);
    return sol;
}

// ---------------------------------------------------------------------------
// Annulus closed forms

void FourierHoleData::validate() const {
    if (degree < 1) throw DomainError("FourierHoleData: degree must be >= 1");
    if ((int)a.size() != degree + 1 || (int)b.size() != degree + 1)
        throw DomainError("FourierHoleData: coefficient arrays must have degree+1 entries");
}

double FourierHoleData::angular_value(double t) const {
    double s = a[0] / 2.0;
    for (int i = 1; i <= degree; ++i)
        s += a[i] * std::cos(i * t) + b[i] * std::sin(i * t);
    return s;
}

double annulus_fourier_torsion(double eps, double R, const FourierHoleData& data) {
    data.validate();
    if (!(eps > 0.0) || eps >= R) throw DomainError("annulus requires 0 < eps < R");
    const int j = data.degree;
    const double ej = std::pow(eps, j);

    double acc = 0.0;
    if (data.a[0] != 0.0) {
        // radial mode value at r = eps
        double ratio = 1.0 - (eps / R) * (eps / R);
        double bracket = std::log(eps) - eps * eps / (2.0 * R * R) + 0.5 +
                         (eps * eps * std::log(eps) - R * R * std::log(R)) / (R * R - eps * eps) +
                         (R * R + eps * eps) / (4.0 * R * R);
        double phi0 = (j * data.a[0] * ej / ratio) * bracket;
        acc += data.a[0] * phi0 / 2.0;
    }
    for (int i = 1; i <= j; ++i) {
        double r2i = std::pow(R, 2 * i);
        double e2i = std::pow(eps, 2 * i);
        double shape = -(j * ej * (e2i + r2i)) / (i * (r2i - e2i)); // eps^{i+j}(eps^i+R^{2i}eps^{-i}) collapsed
        acc += (data.a[i] * data.a[i] + data.b[i] * data.b[i]) * shape;
    }
    double t = -double(j) * ej * kPi * acc;
    if (t < 0.0 && t > -1e-14 * std::abs(acc)) t = 0.0;
    return t;
}

BoundaryTrace fourier_trace(const FourierHoleData& data, Vec2 center, double eps) {
    data.validate();
    const int j = data.degree;
    FourierHoleData d = data;
    const double scale = -double(j) * std::pow(eps, j - 1); // normal points into the hole
    return BoundaryTrace{[d, center, scale](const Vec2& p) {
        double t = std::atan2(p.y - center.y, p.x - center.x);
        return scale * d.angular_value(t);
    }};
}

ExteriorTorsion exterior_ball_torsion(int N, int k, double y_norm_sq) {
    if (N < 3) throw DomainError("exterior torsion requires N >= 3");
    if (k < 1) throw Error("exterior torsion requires spherical harmonic degree k >= 1");
    if (y_norm_sq < 0.0) throw Error("negative norm");
    ExteriorTorsion out;
    out.dim = N;
    out.degree = k;
    out.y_norm_sq = y_norm_sq;
    out.tau = double(k) * k / (N + k - 2.0) * y_norm_sq;
    return out;
}

// ---------------------------------------------------------------------------
// Radial exterior ODE

namespace {

struct OdeSample {
    double r;
    long double u;
};

// RK4 on u'' = -(N-1)/r u' + k(N+k-2)/r^2 u from r=1 with u(1)=a, u'(1)=k
std::vector<OdeSample> integrate_radial(int N, int k, double r_max, long double a,
                                        long double* u_end, long double* du_end) {
    const long double c = (long double)k * (N + k - 2);
    auto f = [&](long double r, long double u, long double v, long double& du, long double& dv) {
        du = v;
        dv = -(N - 1.0L) / r * v + c / (r * r) * u;
    };
    const int steps = 1 << 15;
    const long double h = ((long double)r_max - 1.0L) / steps;
    long double r = 1.0L, u = a, v = (long double)k;
    std::vector<OdeSample> samples;
    samples.push_back({1.0, u});
    for (int s = 0; s < steps; ++s) {
        long double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        f(r, u, v, k1u, k1v);
        f(r + 0.5L * h, u + 0.5L * h * k1u, v + 0.5L * h * k1v, k2u, k2v);
        f(r + 0.5L * h, u + 0.5L * h * k2u, v + 0.5L * h * k2v, k3u, k3v);
        f(r + h, u + h * k3u, v + h * k3v, k4u, k4v);
        u += h / 6.0L * (k1u + 2.0L * k2u + 2.0L * k3u + k4u);
        v += h / 6.0L * (k1v + 2.0L * k2v + 2.0L * k3v + k4v);
        r += h;
        if ((s & 63) == 0 || s == steps - 1) samples.push_back({(double)r, u});
    }
    *u_end = u;
    *du_end = v;
    return samples;
}

} // namespace

RadialOdeReport radial_exterior_ode_check(int N, int k, double r_max) {
    if (N < 3) throw DomainError("radial check requires N >= 3");
    if (k < 1) throw DomainError("radial check requires k >= 1");
    if (r_max < 10.0) throw DomainError("radial check requires r_max >= 10");

    const double p = N + k - 2.0;
    // decay-mode mismatch at r_max: u'(R) + p/R u(R) = 0 for the decaying branch
    auto misfit = [&](long double a) {
        long double u, du;
        integrate_radial(N, k, r_max, a, &u, &du);
        return du + (long double)p / r_max * u;
    };
    long double lo = -3.0L, hi = 1.0L;
    long double flo = misfit(lo), fhi = misfit(hi);
    if (flo * fhi > 0.0L) throw OdeError("shooting bracket does not straddle the decaying mode");
    for (int it = 0; it < 140; ++it) {
        long double mid = 0.5L * (lo + hi);
        long double fm = misfit(mid);
        if ((fm > 0.0L) == (flo > 0.0L)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    long double a = 0.5L * (lo + hi);

    long double u_end, du_end;
    auto samples = integrate_radial(N, k, r_max, a, &u_end, &du_end);
    const double u_exact_1 = -double(k) / p;
    double max_dev = 0.0;
    for (const auto& s : samples) {
        double exact = u_exact_1 * std::pow(s.r, -p);
        max_dev = std::max(max_dev, std::abs((double)s.u - exact) / std::abs(exact));
    }
    RadialOdeReport rep;
    rep.max_rel_deviation = max_dev;
    rep.u_at_1 = (double)a;
    // fitted decay exponent from the tail
    double r1 = samples[samples.size() / 2].r, r2 = samples.back().r;
    double u1 = (double)samples[samples.size() / 2].u, u2 = (double)samples.back().u;
    rep.decay_exponent = -std::log(std::abs(u2 / u1)) / std::log(r2 / r1);
    return rep;
}

// ---------------------------------------------------------------------------

double sup_characterization_bound(const SparseSym& K, const SparseSym& M,
                                  const Vector& b, const Vector& u) {
    double nu = blas::nrm2(u);
    if (nu == 0.0) throw ZeroVectorError("sup characterization needs a nonzero test vector");
    double num = blas::dot(b, u);
    SparseSym A = K.plus(M);
    double den = A.quad_form(u, u);
    if (den <= 0.0) throw ZeroVectorError("degenerate test vector energy");
    return num * num / den;
}

double sup_characterization_bound(const FemSpace& space, const SparseSym& K,
                                  const SparseSym& M, const BoundaryTrace& f,
                                  const Vector& u) {
    Vector b = assemble_boundary_load(space, f);
    return sup_characterization_bound(K, M, b, u);
}

} // namespace nh
