#pragma once

#include <vector>

#include "neumann_holes/assembly.hpp"

namespace nh {

struct TorsionSolution {
    Vector U;    // discrete torsion function
    double T;    // rigidity, b'U
    Vector load; // b
    double identity_energy_residual = 0.0; // |T - energy(U)| / T
    double solve_residual = 0.0;           // linear system relative residual
};

// Sobolev torsion: (K+M) U = b, T = b'U = U'(K+M)U.
TorsionSolution solve_interior_torsion(const FemSpace& space, const SparseSym& K,
                                       const SparseSym& M, const BoundaryTrace& f);

// Zero-average pure-gradient torsion (the annulus benchmark problem):
// K W = b - mu M 1 with mu = (1'b)/(1'M1), W mean-zero; T = b'W = W'KW.
TorsionSolution solve_zero_average_torsion(const FemSpace& space, const SparseSym& K,
                                           const SparseSym& M, const BoundaryTrace& f);

// Angular data r^j f_j(t) with f_j(t) = a0/2-normalized Fourier coefficients:
// a[i], i = 0..j and b[i], i = 1..j (b[0] ignored).
struct FourierHoleData {
    int degree = 1;
    std::vector<double> a;
    std::vector<double> b;

    void validate() const;
    // f_j(t) = a0/2 + sum_i (a_i cos(it) + b_i sin(it)); here without the /2:
    // the stored a[0] is the plain Fourier coefficient of the constant mode.
    double angular_value(double t) const;
};

// Exact closed-form torsion T_{eps,R}^j of the annulus zero-average problem.
double annulus_fourier_torsion(double eps, double R, const FourierHoleData& data);

// Boundary trace of the normal derivative of r^j f_j(t) on the circle of
// radius eps about `center`, with the normal pointing into the hole.
BoundaryTrace fourier_trace(const FourierHoleData& data, Vec2 center, double eps);

struct ExteriorTorsion {
    int dim = 3;
    int degree = 1;
    double y_norm_sq = 0.0;
    double tau = 0.0;
};

// tau = k^2/(N+k-2) * int_{S^{N-1}} Y^2 for a degree-k spherical harmonic Y.
ExteriorTorsion exterior_ball_torsion(int N, int k, double y_norm_sq);

struct RadialOdeReport {
    double max_rel_deviation = 0.0; // against the closed-form decay solution
    double u_at_1 = 0.0;
    double decay_exponent = 0.0;    // fitted from the tail
};

// Shooting integration of u'' + (N-1)/r u' - k(N+k-2)/r^2 u = 0 with
// u'(1) = k and decay at infinity.
RadialOdeReport radial_exterior_ode_check(int N, int k, double r_max);

// (b'u)^2 / (u'(K+M)u) <= T, equality iff u is the torsion function.
double sup_characterization_bound(const FemSpace& space, const SparseSym& K,
                                  const SparseSym& M, const BoundaryTrace& f,
                                  const Vector& u);
double sup_characterization_bound(const SparseSym& K, const SparseSym& M,
                                  const Vector& b, const Vector& u);

} // namespace nh
