#include "neumann_holes/smalleig.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace nh {

Vector DenseSym::multiply(const Vector& x) const {
    Vector y(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double DenseSym::form(const Vector& u, const Vector& v) const {
    Vector qv = multiply(v);
    return blas::dot(u, qv);
}

namespace {

double norm_scale(const DenseSym& q) {
    double m = 0.0;
    for (double v : q.data) m = std::max(m, std::abs(v));
    return std::max(m, 1.0);
}

} // namespace

void SmallEigInstance::validate() const {
    const int n = q.dim;
    if ((int)f.size() != n || (int)phi.size() != n)
        throw HypothesisError("instance vectors must match the form dimension");
    const double scale = norm_scale(q);
    if (std::abs(blas::nrm2(phi) - 1.0) > 1e-10)
        throw HypothesisError("phi must be a unit vector");
    if (std::abs(blas::nrm2(f) - 1.0) > 1e-10)
        throw HypothesisError("f must be a unit vector");
    Vector r = q.multiply(phi);
    blas::axpy(-lambda, phi, r);
    if (blas::nrm2(r) > 1e-12 * scale * std::max(1.0, std::abs(lambda)))
        throw HypothesisError("(lambda, phi) is not an eigenpair of q");
    if ((int)basis_h1.size() + (int)basis_h2.size() != n - 1)
        throw HypothesisError("H1 and H2 must complement span{phi}");
    auto check_basis = [&](const std::vector<Vector>& B, const char* name) {
        for (size_t i = 0; i < B.size(); ++i) {
            if ((int)B[i].size() != n) throw HypothesisError("basis vector dimension mismatch");
            if (std::abs(blas::dot(B[i], phi)) > 1e-10)
                throw HypothesisError(std::string(name) + " is not orthogonal to phi");
            for (size_t j = 0; j <= i; ++j) {
                double d = blas::dot(B[i], B[j]);
                double target = (i == j) ? 1.0 : 0.0;
                if (std::abs(d - target) > 1e-10)
                    throw HypothesisError(std::string(name) + " is not orthonormal");
            }
        }
    };
    check_basis(basis_h1, "H1");
    check_basis(basis_h2, "H2");
    for (const auto& v1 : basis_h1)
        for (const auto& v2 : basis_h2)
            if (std::abs(q.form(v1, v2)) > 1e-10 * scale)
                throw HypothesisError("q does not decouple H1 from H2");
}

SmallEigReport verify_small_eig(const SmallEigInstance& instance) {
    instance.validate();
    const int n = instance.q.dim;

    auto block_gamma = [&](const std::vector<Vector>& B) {
        if (B.empty()) return std::numeric_limits<double>::infinity();
        const int m = (int)B.size();
        Eigen::MatrixXd P(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) P(i, j) = instance.q.form(B[i], B[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()));
        double g = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) g = std::min(g, std::abs(es.eigenvalues()(i)));
        return g;
    };

    SmallEigReport rep;
    rep.gamma1 = block_gamma(instance.basis_h1);
    rep.gamma2 = block_gamma(instance.basis_h2);
    if (!(rep.gamma1 > 0.0) || !(rep.gamma2 > 0.0))
        throw HypothesisError("gamma1 and gamma2 must be positive");
    rep.gamma = std::min(rep.gamma1, rep.gamma2);

    Vector qf = instance.q.multiply(instance.f);
    rep.delta = blas::nrm2(qf);
    rep.xi = blas::dot(instance.f, qf);
    rep.pi_coeff = blas::dot(instance.phi, instance.f);

    Vector nf = instance.f;
    blas::axpy(-rep.pi_coeff, instance.phi, nf);
    rep.projection_error = blas::nrm2(nf);
    rep.projection_bound = std::sqrt(2.0) * rep.delta / rep.gamma;
    rep.projection_ok = rep.projection_error <= rep.projection_bound * (1.0 + 1e-12);

    rep.eigenvalue_error = std::abs(instance.lambda - rep.xi);
    rep.eigenvalue_bound = 2.0 * std::abs(instance.lambda) * rep.delta * rep.delta /
                               (rep.gamma * rep.gamma) +
                           2.0 * rep.delta * rep.delta / rep.gamma;
    rep.eigenvalue_ok = rep.eigenvalue_error <= rep.eigenvalue_bound * (1.0 + 1e-12);
    return rep;
}

SmallEigInstance make_random_small_eig_instance(std::uint64_t seed) {
    // splitmix-style scalar stream
    std::uint64_t s = seed;
    auto next = [&]() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    auto uniform = [&]() { return (next() >> 11) * 0x1.0p-53; };
    auto gauss = [&]() {
        double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    const int n = 6 + int(next() % 30);
    const int p = 1 + int(next() % (n - 2)); // index of the small eigenvalue
    const double gap = 0.3 + 0.7 * uniform();

    Eigen::VectorXd mu(n);
    mu(p) = -0.2 + 0.4 * uniform(); // the small eigenvalue
    for (int i = 0; i < p; ++i) mu(i) = -gap - 2.5 * uniform();
    for (int i = p + 1; i < n; ++i) mu(i) = gap + 2.5 * uniform();

    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = gauss();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Qo = qr.householderQ();
    Eigen::MatrixXd A = Qo * mu.asDiagonal() * Qo.transpose();
    A = 0.5 * (A + A.transpose());

    SmallEigInstance inst;
    inst.q = DenseSym::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inst.q.at(i, j) = A(i, j);
    inst.lambda = mu(p);
    inst.phi.assign(n, 0.0);
    for (int i = 0; i < n; ++i) inst.phi[i] = Qo(i, p);
    // enforce exact unit norm and eigen relation against roundoff
    {
        double nn = blas::nrm2(inst.phi);
        for (auto& v : inst.phi) v /= nn;
        // Rayleigh polish of the stored eigenvalue
        Vector qphi = inst.q.multiply(inst.phi);
        inst.lambda = blas::dot(inst.phi, qphi);
    }
    for (int i = 0; i < n; ++i) {
        if (i == p) continue;
        Vector col(n);
        for (int r = 0; r < n; ++r) col[r] = Qo(r, i);
        (i < p ? inst.basis_h1 : inst.basis_h2).push_back(std::move(col));
    }
    // f = normalize(phi + t w) with w a unit combination orthogonal to phi
    double t = 0.4 * uniform();
    Vector w(n, 0.0);
    for (const auto& B : {inst.basis_h1, inst.basis_h2})
        for (const auto& v : B) blas::axpy(gauss(), v, w);
    double nw = blas::nrm2(w);
    if (nw > 0.0)
        for (auto& v : w) v /= nw;
    inst.f = inst.phi;
    blas::axpy(t, w, inst.f);
    double nf = blas::nrm2(inst.f);
    for (auto& v : inst.f) v /= nf;
    return inst;
}

} // namespace nh
