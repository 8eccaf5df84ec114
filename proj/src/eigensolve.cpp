#include "neumann_holes/eigensolve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace nh {

namespace {

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

// splitmix64: deterministic start vector independent of platform RNG state
struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

double explicit_residual(const SparseSym& Khat, const SparseSym& M,
                         double lambda, const Vector& u) {
    Vector r = Khat.multiply(u);
    Vector mu = M.multiply(u);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= lambda * mu[i];
    double den = blas::nrm2(mu);
    return den > 0.0 ? blas::nrm2(r) / den : blas::nrm2(r);
}

SpectrumSlice finalize(std::vector<EigenPair> pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
    SpectrumSlice s;
    s.pairs = std::move(pairs);
    const int m = (int)s.pairs.size();
    s.gap_to_neighbors.resize(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double g = std::numeric_limits<double>::infinity();
        if (i > 0) g = std::min(g, s.pairs[i].lambda - s.pairs[i - 1].lambda);
        if (i + 1 < m) g = std::min(g, s.pairs[i + 1].lambda - s.pairs[i].lambda);
        s.gap_to_neighbors[i] = g;
    }
    return s;
}

SpectrumSlice solve_dense(const SparseSym& Khat, const SparseSym& M, int m,
                          const EigOptions& opts) {
    const int n = Khat.dim;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = Khat.row_offsets[i]; k < Khat.row_offsets[i + 1]; ++k)
            A(i, Khat.col_indices[k]) = Khat.values[k];
        for (int k = M.row_offsets[i]; k < M.row_offsets[i + 1]; ++k)
            B(i, M.col_indices[k]) = M.values[k];
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success)
        throw FactorizationError("dense generalized eigensolver failed");
    std::vector<EigenPair> pairs;
    for (int i = 0; i < m; ++i) {
        EigenPair p;
        Eigen::VectorXd v = es.eigenvectors().col(i); // B-orthonormal already
        p.u.assign(v.data(), v.data() + n);
        // Rayleigh polish: the Cholesky reduction inside the dense solver can
        // perturb eigenvalues past the lambda >= 1 floor at roundoff level
        double mnorm = M.quad_form(p.u, p.u);
        p.lambda = Khat.quad_form(p.u, p.u) / mnorm;
        p.mu = p.lambda - 1.0;
        p.residual = explicit_residual(Khat, M, p.lambda, p.u);
        pairs.push_back(std::move(p));
    }
    return finalize(std::move(pairs));
}

SpectrumSlice solve_lanczos(const SparseSym& Khat, const SparseSym& M, int m,
                            const EigOptions& opts) {
    const int n = Khat.dim;
    const double sigma = opts.shift;

    Eigen::SparseMatrix<double> shifted = to_eigen(Khat.plus(M, -sigma));
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt; // AMD ordering by default
    llt.compute(shifted);
    if (llt.info() != Eigen::Success)
        throw FactorizationError("sparse Cholesky of the shifted matrix failed (not PD at the chosen shift)");

    const int max_basis =
        std::min(n, opts.max_iter > 0 ? opts.max_iter : std::max(8 * m + 80, 128));

    std::vector<Vector> V;  // M-orthonormal Lanczos basis
    std::vector<Vector> MV; // M * V cached
    std::vector<double> alpha, beta;

    SplitMix64 rng(opts.seed);
    Vector r(n);
    for (int i = 0; i < n; ++i) r[i] = rng.uniform() - 0.5;

    auto m_orthonormalize = [&](Vector& w) -> double {
        // two-pass full reorthogonalization against V in the M inner product
        for (int pass = 0; pass < 2; ++pass)
            for (size_t i = 0; i < V.size(); ++i) {
                double c = blas::dot(w, MV[i]);
                blas::axpy(-c, V[i], w);
            }
        Vector mw = M.multiply(w);
        double nrm = std::sqrt(std::max(blas::dot(w, mw), 0.0));
        return nrm;
    };

    {
        double nrm = std::sqrt(std::max(blas::dot(r, M.multiply(r)), 0.0));
        blas::scal(1.0 / nrm, r);
    }

    // extracts the m lowest Ritz pairs and their explicit pencil residuals
    auto extract = [&](std::vector<EigenPair>& out) -> bool {
        const int j = (int)V.size();
        if (j < m) return false;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j, j);
        for (int i = 0; i < j; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < j) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        out.clear();
        bool all_ok = true;
        for (int idx = 0; idx < m; ++idx) {
            int col = j - 1 - idx; // largest theta => smallest lambda
            if (es.eigenvalues()(col) <= 0.0) return false;
            EigenPair p;
            p.u.assign(n, 0.0);
            for (int i = 0; i < j; ++i) blas::axpy(es.eigenvectors()(i, col), V[i], p.u);
            Vector mu = M.multiply(p.u);
            double nrm = std::sqrt(std::max(blas::dot(p.u, mu), 0.0));
            blas::scal(1.0 / nrm, p.u);
            p.lambda = Khat.quad_form(p.u, p.u); // Rayleigh value of the Ritz vector
            p.mu = p.lambda - 1.0;
            p.residual = explicit_residual(Khat, M, p.lambda, p.u);
            if (p.residual > opts.tol) all_ok = false;
            out.push_back(std::move(p));
        }
        return all_ok;
    };

    std::vector<EigenPair> converged;
    bool stagnated = false;
    while ((int)V.size() < max_basis && !stagnated) {
        V.push_back(r);
        MV.push_back(M.multiply(r));
        // w = (Khat - sigma M)^{-1} M v_j
        Eigen::Map<const Eigen::VectorXd> mv(MV.back().data(), n);
        Eigen::VectorXd wz = llt.solve(mv);
        Vector w(wz.data(), wz.data() + n);
        alpha.push_back(blas::dot(w, MV.back()));
        double b = m_orthonormalize(w);
        beta.push_back(b);
        if (b < 1e-14) {
            // invariant subspace; continue with a fresh random direction
            Vector f(n);
            for (int i = 0; i < n; ++i) f[i] = rng.uniform() - 0.5;
            double nb = m_orthonormalize(f);
            if (nb < 1e-14) {
                stagnated = true; // basis spans the reachable space
            } else {
                blas::scal(1.0 / nb, f);
                r = std::move(f);
                beta.back() = 0.0;
            }
            continue;
        }
        blas::scal(1.0 / b, w);
        r = std::move(w);

        const int j = (int)V.size();
        if (j >= std::max(2 * m, 12) && (j % 6 == 0 || j == max_basis))
            if (extract(converged)) return finalize(std::move(converged));
    }
    if (extract(converged)) return finalize(std::move(converged));
    throw ConvergenceError("shift-invert Lanczos did not reach the requested tolerance");
}

} // namespace

SpectrumSlice solve_lowest(const SparseSym& K, const SparseSym& M, int m,
                           const EigOptions& opts) {
    if (K.dim != M.dim) throw Error("solve_lowest: dimension mismatch");
    if (m < 1) throw Error("solve_lowest: m must be positive");
    if (m > K.dim / 4)
        throw Error("solve_lowest: requested mode count exceeds dim/4");
    SparseSym Khat = K.plus(M); // the operator of the shifted problem
    SpectrumSlice s;
    switch (opts.method) {
        case EigMethod::Dense:
            s = solve_dense(Khat, M, m, opts);
            break;
        case EigMethod::ShiftInvertLanczos:
            s = solve_lanczos(Khat, M, m, opts);
            break;
        case EigMethod::Auto:
            // dense is the robustness fallback for small problems
            try {
                s = solve_lanczos(Khat, M, m, opts);
            } catch (const Error&) {
                if (K.dim > opts.dense_cutoff) throw;
                s = solve_dense(Khat, M, m, opts);
            }
            break;
    }
    for (const auto& p : s.pairs)
        if (p.lambda < 1.0 - 1e-10)
            throw ConvergenceError("eigenvalue below the analytic floor lambda >= 1");
    return s;
}

EigenPair align_sign(const EigenPair& pair, const Vector& u_ref, const SparseSym& M) {
    if ((int)u_ref.size() != M.dim || (int)pair.u.size() != M.dim)
        throw Error("align_sign: dimension mismatch");
    Vector mu = M.multiply(pair.u);
    double inner = blas::dot(u_ref, mu);
    double nu = std::sqrt(std::max(blas::dot(pair.u, mu), 0.0));
    double nref = std::sqrt(std::max(M.quad_form(u_ref, u_ref), 0.0));
    if (std::abs(inner) <= 1e-10 * nu * nref)
        throw AmbiguousSignError("sign convention undefined: vectors are M-orthogonal");
    if (inner >= 0.0) return pair;
    EigenPair out = pair;
    for (auto& v : out.u) v = -v;
    return out;
}

bool check_simple(const SpectrumSlice& slice, int n, double rel_gap_min) {
    if (n < 1 || n >= slice.size() - 1)
        throw Error("check_simple: need 1 <= n < size-1");
    double lo = slice.pairs[n].lambda - slice.pairs[n - 1].lambda;
    double hi = slice.pairs[n + 1].lambda - slice.pairs[n].lambda;
    return std::min(lo, hi) >= rel_gap_min * slice.pairs[n].lambda;
}

} // namespace nh
