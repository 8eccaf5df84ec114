#pragma once

#include <cstdint>
#include <vector>

#include "neumann_holes/assembly.hpp"

namespace nh {

// Eigenpair of (K+M) u = lambda M u; mu = lambda - 1 is the Neumann
// Laplacian eigenvalue. Vectors are M-normalized.
struct EigenPair {
    double lambda = 0.0;
    double mu = 0.0;
    Vector u;
    double residual = 0.0;
};

struct SpectrumSlice {
    std::vector<EigenPair> pairs;           // sorted ascending
    std::vector<double> gap_to_neighbors;   // min |lambda_i - lambda_{i +/- 1}|

    const EigenPair& operator[](int i) const { return pairs[i]; }
    int size() const { return (int)pairs.size(); }
};

enum class EigMethod { Auto, ShiftInvertLanczos, Dense };

struct EigOptions {
    double tol = 1e-9;
    std::uint64_t seed = 0x5EED;
    EigMethod method = EigMethod::Auto;
    double shift = 0.9; // below lambda_0 = 1, keeps the factorization PD
    int max_iter = 0;   // 0: automatic cap
    int dense_cutoff = 3000;
};

SpectrumSlice solve_lowest(const SparseSym& K, const SparseSym& M, int m,
                           const EigOptions& opts = {});

// Fixes the sign so that l2_inner(u, u_ref) >= 0. Applying twice equals
// applying once. Throws AmbiguousSignError when the inner product is
// negligible against the M-norms.
EigenPair align_sign(const EigenPair& pair, const Vector& u_ref, const SparseSym& M);

// True iff min(lambda_n - lambda_{n-1}, lambda_{n+1} - lambda_n)
// >= rel_gap_min * lambda_n. Requires 1 <= n < size-1.
bool check_simple(const SpectrumSlice& slice, int n, double rel_gap_min);

} // namespace nh
