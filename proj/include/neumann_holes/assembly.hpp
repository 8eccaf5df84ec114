#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "neumann_holes/geometry.hpp"

namespace nh {

using Vector = std::vector<double>;

// Compressed sparse rows, sorted column indices, full symmetric storage.
struct SparseSym {
    int dim = 0;
    std::vector<int> row_offsets;
    std::vector<int> col_indices;
    std::vector<double> values;

    Vector multiply(const Vector& x) const;
    double quad_form(const Vector& u, const Vector& v) const; // u' A v
    // max |A_ij - A_ji| relative to max |A_ij|; 0 for exactly symmetric
    double symmetry_error() const;
    SparseSym plus(const SparseSym& other, double scale_other = 1.0) const;
    double norm_inf() const;
};

void write_matrix_market(std::ostream& os, const SparseSym& a);
void save_matrix_market(const std::string& path, const SparseSym& a);

// Lagrange space on a triangle mesh, order 1 or 2.
struct FemSpace {
    Mesh mesh;
    int order = 1;
    int dof_count = 0;
    std::vector<Vec2> dof_coords;
    std::vector<int> outer_boundary_dofs;
    std::vector<int> hole_boundary_dofs;
    // per element: 3 (P1) or 6 (P2) global dof ids
    std::vector<std::vector<int>> element_dofs;
    // hole boundary segments: endpoint dofs (+ midpoint dof for P2)
    struct BoundarySeg {
        int a, b;
        int mid = -1; // P2 only
    };
    std::vector<BoundarySeg> hole_segments;

    static FemSpace build(Mesh mesh, int order);
};

// Trace datum on the hole boundary.
struct BoundaryTrace {
    std::function<double(const Vec2&)> f;

    double operator()(const Vec2& p) const;
};

SparseSym assemble_stiffness(const FemSpace& space);
SparseSym assemble_mass(const FemSpace& space);
Vector assemble_boundary_load(const FemSpace& space, const BoundaryTrace& f);

// Element-wise evaluations of u'(K+M)v and u'Mv; same quadrature as assembly.
double h1_inner(const FemSpace& space, const Vector& u, const Vector& v);
double l2_inner(const FemSpace& space, const Vector& u, const Vector& v);

// Nodal interpolation of a scalar field.
Vector interpolate(const FemSpace& space, const std::function<double(const Vec2&)>& g);

namespace blas {
double dot(const Vector& a, const Vector& b);
void axpy(double alpha, const Vector& x, Vector& y);
double nrm2(const Vector& a);
void scal(double alpha, Vector& a);
} // namespace blas

} // namespace nh
