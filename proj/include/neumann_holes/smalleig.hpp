#pragma once

#include <cstdint>
#include <vector>

#include "neumann_holes/assembly.hpp"

namespace nh {

struct DenseSym {
    int dim = 0;
    std::vector<double> data; // row-major

    static DenseSym zero(int n) { return {n, std::vector<double>(size_t(n) * n, 0.0)}; }
    double& at(int i, int j) { return data[size_t(i) * dim + j]; }
    double at(int i, int j) const { return data[size_t(i) * dim + j]; }
    Vector multiply(const Vector& x) const;
    double form(const Vector& u, const Vector& v) const; // u' Q v
};

// Finite-dimensional instance of the small-eigenvalue lemma: a symmetric
// form q, a unit near-eigenvector f, an exact eigenpair (lambda, phi), and a
// splitting of phi-perp into orthonormal bases on which q is sign-definite.
struct SmallEigInstance {
    DenseSym q;
    Vector f;
    double lambda = 0.0;
    Vector phi;
    std::vector<Vector> basis_h1;
    std::vector<Vector> basis_h2;

    // Throws HypothesisError when the structural assumptions fail.
    void validate() const;
};

struct SmallEigReport {
    double delta = 0.0;  // sup_v |q(f,v)| / ||v||  (= ||Qf||)
    double gamma1 = 0.0; // min |spec| of q restricted to H1
    double gamma2 = 0.0;
    double gamma = 0.0;
    double xi = 0.0;     // q(f,f)
    double pi_coeff = 0.0; // (phi, f)
    double projection_error = 0.0; // ||f - Pi f||
    double projection_bound = 0.0; // sqrt(2) delta / gamma
    double eigenvalue_error = 0.0; // |lambda - xi|
    double eigenvalue_bound = 0.0; // 2 |lambda| delta^2/gamma^2 + 2 delta^2/gamma
    bool projection_ok = false;
    bool eigenvalue_ok = false;
};

SmallEigReport verify_small_eig(const SmallEigInstance& instance);

// Random admissible instance: sign-definite spectral blocks flanking a small
// eigenvalue, conjugated by a random orthogonal matrix; f is a perturbed phi.
SmallEigInstance make_random_small_eig_instance(std::uint64_t seed);

} // namespace nh
