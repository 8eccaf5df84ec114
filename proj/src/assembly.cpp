#include "neumann_holes/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <unordered_map>

namespace nh {

namespace blas {

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const Vector& x, Vector& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double nrm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void scal(double alpha, Vector& a) {
    for (auto& v : a) v *= alpha;
}

} // namespace blas

// ---------------------------------------------------------------------------
// SparseSym

Vector SparseSym::multiply(const Vector& x) const {
    if ((int)x.size() != dim) throw Error("SparseSym::multiply: dimension mismatch");
    Vector y(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
            s += values[k] * x[col_indices[k]];
        y[i] = s;
    }
    return y;
}

double SparseSym::quad_form(const Vector& u, const Vector& v) const {
    if ((int)u.size() != dim || (int)v.size() != dim)
        throw Error("SparseSym::quad_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double row = 0.0;
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
            row += values[k] * v[col_indices[k]];
        s += u[i] * row;
    }
    return s;
}

double SparseSym::symmetry_error() const {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    double err = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            int j = col_indices[k];
            if (j < i) continue;
            // find (j, i)
            const int* beg = col_indices.data() + row_offsets[j];
            const int* end = col_indices.data() + row_offsets[j + 1];
            const int* it = std::lower_bound(beg, end, i);
            double tji = (it != end && *it == i) ? values[it - col_indices.data()] : 0.0;
            err = std::max(err, std::abs(values[k] - tji));
        }
    }
    return scale > 0.0 ? err / scale : 0.0;
}

SparseSym SparseSym::plus(const SparseSym& other, double scale_other) const {
    if (dim != other.dim) throw Error("SparseSym::plus: dimension mismatch");
    SparseSym out;
    out.dim = dim;
    out.row_offsets.assign(dim + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    for (int i = 0; i < dim; ++i) {
        int ka = row_offsets[i], ea = row_offsets[i + 1];
        int kb = other.row_offsets[i], eb = other.row_offsets[i + 1];
        while (ka < ea || kb < eb) {
            int ca = ka < ea ? col_indices[ka] : dim + 1;
            int cb = kb < eb ? other.col_indices[kb] : dim + 1;
            if (ca == cb) {
                cols.push_back(ca);
                vals.push_back(values[ka] + scale_other * other.values[kb]);
                ++ka; ++kb;
            } else if (ca < cb) {
                cols.push_back(ca);
                vals.push_back(values[ka]);
                ++ka;
            } else {
                cols.push_back(cb);
                vals.push_back(scale_other * other.values[kb]);
                ++kb;
            }
        }
        out.row_offsets[i + 1] = (int)cols.size();
    }
    out.col_indices = std::move(cols);
    out.values = std::move(vals);
    return out;
}

double SparseSym::norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) s += std::abs(values[k]);
        m = std::max(m, s);
    }
    return m;
}

void write_matrix_market(std::ostream& os, const SparseSym& a) {
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    int nnz_lower = 0;
    for (int i = 0; i < a.dim; ++i)
        for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            if (a.col_indices[k] <= i) ++nnz_lower;
    os << a.dim << " " << a.dim << " " << nnz_lower << "\n";
    char buf[64];
    for (int i = 0; i < a.dim; ++i)
        for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            int j = a.col_indices[k];
            if (j > i) continue;
            int n = std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i + 1, j + 1, a.values[k]);
            os.write(buf, n);
        }
}

void save_matrix_market(const std::string& path, const SparseSym& a) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_matrix_market(f, a);
}

// ---------------------------------------------------------------------------
// FemSpace

double BoundaryTrace::operator()(const Vec2& p) const {
    double v = f(p);
    if (!std::isfinite(v)) throw Error("boundary trace not finite at quadrature point");
    return v;
}

namespace {

inline std::uint64_t ekey(int u, int v) {
    if (u > v) std::swap(u, v);
    return (std::uint64_t(std::uint32_t(u)) << 32) | std::uint32_t(v);
}

// P1 reference basis at barycentric (l0, l1, l2) is just (l0, l1, l2).
// P2: vertices then midpoints of edges (0,1), (1,2), (2,0).
void shape_p2(double l0, double l1, double l2, double* N) {
    N[0] = l0 * (2.0 * l0 - 1.0);
    N[1] = l1 * (2.0 * l1 - 1.0);
    N[2] = l2 * (2.0 * l2 - 1.0);
    N[3] = 4.0 * l0 * l1;
    N[4] = 4.0 * l1 * l2;
    N[5] = 4.0 * l2 * l0;
}

// gradients with respect to (l1, l2); l0 = 1 - l1 - l2
void shape_p2_grad(double l0, double l1, double l2, double g[6][2]) {
    g[0][0] = -(4.0 * l0 - 1.0); g[0][1] = -(4.0 * l0 - 1.0);
    g[1][0] = 4.0 * l1 - 1.0;    g[1][1] = 0.0;
    g[2][0] = 0.0;               g[2][1] = 4.0 * l2 - 1.0;
    g[3][0] = 4.0 * (l0 - l1);   g[3][1] = -4.0 * l1;
    g[4][0] = 4.0 * l2;          g[4][1] = 4.0 * l1;
    g[5][0] = -4.0 * l2;         g[5][1] = 4.0 * (l0 - l2);
}

struct VolumeRule {
    int n;
    const double* l1;
    const double* l2;
    const double* w; // sums to 1, scale by element area
};

// order-2, exact for quadratics
const double kP1L1[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
const double kP1L2[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
const double kP1W[3] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

// order-5 seven point rule
const double kA1 = 0.0597158717897698;
const double kB1 = 0.4701420641051151;
const double kA2 = 0.7974269853530873;
const double kB2 = 0.1012865073234563;
const double kW0 = 9.0 / 40.0;
const double kW1 = (155.0 + std::sqrt(15.0)) / 1200.0;
const double kW2 = (155.0 - std::sqrt(15.0)) / 1200.0;
const double kP2L1[7] = {1.0 / 3.0, kA1, kB1, kB1, kA2, kB2, kB2};
const double kP2L2[7] = {1.0 / 3.0, kB1, kA1, kB1, kB2, kA2, kB2};
const double kP2W[7] = {kW0, kW1, kW1, kW1, kW2, kW2, kW2};

VolumeRule volume_rule(int order) {
    if (order == 1) return {3, kP1L1, kP1L2, kP1W};
    return {7, kP2L1, kP2L2, kP2W};
}

// 4-point Gauss-Legendre on [0,1]
const double kGx[4] = {0.5 - 0.8611363115940526 / 2.0, 0.5 - 0.3399810435848563 / 2.0,
                       0.5 + 0.3399810435848563 / 2.0, 0.5 + 0.8611363115940526 / 2.0};
const double kGw[4] = {0.3478548451374538 / 2.0, 0.6521451548625461 / 2.0,
                       0.6521451548625461 / 2.0, 0.3478548451374538 / 2.0};

struct ElementGeom {
    Vec2 p0, p1, p2;
    double area;
    // gradients of barycentric coordinates
    Vec2 grad_l0, grad_l1, grad_l2;
};

ElementGeom element_geom(const Mesh& mesh, const std::array<int, 3>& t) {
    ElementGeom g;
    g.p0 = mesh.vertices[t[0]];
    g.p1 = mesh.vertices[t[1]];
    g.p2 = mesh.vertices[t[2]];
    double det = (g.p1 - g.p0).cross(g.p2 - g.p0);
    g.area = 0.5 * det;
    g.grad_l1 = {(g.p2.y - g.p0.y) / det, (g.p0.x - g.p2.x) / det};
    g.grad_l2 = {(g.p0.y - g.p1.y) / det, (g.p1.x - g.p0.x) / det};
    g.grad_l0 = {-(g.grad_l1.x + g.grad_l2.x), -(g.grad_l1.y + g.grad_l2.y)};
    return g;
}

} // namespace

FemSpace FemSpace::build(Mesh mesh, int order) {
    if (order != 1 && order != 2) throw Error("FemSpace order must be 1 or 2");
    FemSpace sp;
    sp.mesh = std::move(mesh);
    sp.order = order;
    const Mesh& m = sp.mesh;
    const int nv = (int)m.vertices.size();

    std::unordered_map<std::uint64_t, int> edge_ids;
    auto edge_id = [&](int a, int b) {
        auto k = ekey(a, b);
        auto it = edge_ids.find(k);
        if (it != edge_ids.end()) return it->second;
        int id = (int)edge_ids.size();
        edge_ids.emplace(k, id);
        return id;
    };

    sp.element_dofs.reserve(m.triangles.size());
    if (order == 1) {
        for (const auto& t : m.triangles)
            sp.element_dofs.push_back({t[0], t[1], t[2]});
        sp.dof_count = nv;
        sp.dof_coords = m.vertices;
    } else {
        for (const auto& t : m.triangles) {
            int e01 = edge_id(t[0], t[1]);
            int e12 = edge_id(t[1], t[2]);
            int e20 = edge_id(t[2], t[0]);
            sp.element_dofs.push_back({t[0], t[1], t[2], nv + e01, nv + e12, nv + e20});
        }
        sp.dof_count = nv + (int)edge_ids.size();
        sp.dof_coords.resize(sp.dof_count);
        for (int i = 0; i < nv; ++i) sp.dof_coords[i] = m.vertices[i];
        for (const auto& [k, id] : edge_ids) {
            int a = int(k >> 32), b = int(k & 0xffffffffu);
            sp.dof_coords[nv + id] = (m.vertices[a] + m.vertices[b]) * 0.5;
        }
    }

    std::vector<char> outer_mark(sp.dof_count, 0), hole_mark(sp.dof_count, 0);
    for (const auto& be : m.boundary_edges) {
        auto& mark = (be.tag == BoundaryTag::Hole) ? hole_mark : outer_mark;
        mark[be.a] = 1;
        mark[be.b] = 1;
        FemSpace::BoundarySeg seg{be.a, be.b, -1};
        if (order == 2) {
            auto it = edge_ids.find(ekey(be.a, be.b));
            if (it == edge_ids.end()) throw Error("boundary edge missing from edge table");
            seg.mid = nv + it->second;
            mark[seg.mid] = 1;
        }
        if (be.tag == BoundaryTag::Hole) sp.hole_segments.push_back(seg);
    }
    for (int i = 0; i < sp.dof_count; ++i) {
        if (outer_mark[i]) sp.outer_boundary_dofs.push_back(i);
        if (hole_mark[i]) sp.hole_boundary_dofs.push_back(i);
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

using LocalMatrix = std::array<std::array<double, 6>, 6>;

void local_stiffness(const ElementGeom& g, int order, LocalMatrix& ke) {
    const int nd = order == 1 ? 3 : 6;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) ke[i][j] = 0.0;
    if (order == 1) {
        const Vec2 gl[3] = {g.grad_l0, g.grad_l1, g.grad_l2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ke[i][j] = g.area * gl[i].dot(gl[j]);
        return;
    }
    VolumeRule rule = volume_rule(2);
    for (int q = 0; q < rule.n; ++q) {
        double l1 = rule.l1[q], l2 = rule.l2[q], l0 = 1.0 - l1 - l2;
        double gr[6][2];
        shape_p2_grad(l0, l1, l2, gr);
        Vec2 gx[6];
        for (int i = 0; i < 6; ++i)
            gx[i] = {gr[i][0] * g.grad_l1.x + gr[i][1] * g.grad_l2.x,
                     gr[i][0] * g.grad_l1.y + gr[i][1] * g.grad_l2.y};
        double w = rule.w[q] * g.area;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) ke[i][j] += w * gx[i].dot(gx[j]);
    }
}

void local_mass(const ElementGeom& g, int order, LocalMatrix& me) {
    const int nd = order == 1 ? 3 : 6;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) me[i][j] = 0.0;
    VolumeRule rule = volume_rule(order);
    double N[6];
    for (int q = 0; q < rule.n; ++q) {
        double l1 = rule.l1[q], l2 = rule.l2[q], l0 = 1.0 - l1 - l2;
        if (order == 1) {
            N[0] = l0; N[1] = l1; N[2] = l2;
        } else {
            shape_p2(l0, l1, l2, N);
        }
        double w = rule.w[q] * g.area;
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) me[i][j] += w * N[i] * N[j];
    }
}

SparseSym assemble(const FemSpace& sp, bool stiffness) {
    const int nd = sp.order == 1 ? 3 : 6;
    // sparsity pattern
    std::vector<std::vector<int>> adj(sp.dof_count);
    for (const auto& ed : sp.element_dofs)
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) adj[ed[i]].push_back(ed[j]);
    SparseSym a;
    a.dim = sp.dof_count;
    a.row_offsets.assign(sp.dof_count + 1, 0);
    for (int i = 0; i < sp.dof_count; ++i) {
        auto& r = adj[i];
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        a.row_offsets[i + 1] = a.row_offsets[i] + (int)r.size();
    }
    a.col_indices.reserve(a.row_offsets.back());
    for (int i = 0; i < sp.dof_count; ++i)
        for (int c : adj[i]) a.col_indices.push_back(c);
    a.values.assign(a.col_indices.size(), 0.0);

    auto entry = [&](int i, int j) -> double& {
        const int* beg = a.col_indices.data() + a.row_offsets[i];
        const int* end = a.col_indices.data() + a.row_offsets[i + 1];
        const int* it = std::lower_bound(beg, end, j);
        return a.values[it - a.col_indices.data()];
    };

    LocalMatrix loc;
    for (size_t e = 0; e < sp.element_dofs.size(); ++e) {
        ElementGeom g = element_geom(sp.mesh, sp.mesh.triangles[e]);
        if (stiffness)
            local_stiffness(g, sp.order, loc);
        else
            local_mass(g, sp.order, loc);
        const auto& ed = sp.element_dofs[e];
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) entry(ed[i], ed[j]) += loc[i][j];
    }
    return a;
}

} // namespace

SparseSym assemble_stiffness(const FemSpace& space) { return assemble(space, true); }
SparseSym assemble_mass(const FemSpace& space) { return assemble(space, false); }

Vector assemble_boundary_load(const FemSpace& space, const BoundaryTrace& f) {
    if (space.hole_segments.empty())
        throw NoHoleError("mesh has no Hole-tagged boundary");
    Vector b(space.dof_count, 0.0);
    for (const auto& seg : space.hole_segments) {
        const Vec2& pa = space.dof_coords[seg.a];
        const Vec2& pb = space.dof_coords[seg.b];
        double len = (pb - pa).norm();
        for (int q = 0; q < 4; ++q) {
            double t = kGx[q];
            Vec2 x = pa + (pb - pa) * t;
            double fv = f(x) * kGw[q] * len;
            if (space.order == 1) {
                b[seg.a] += fv * (1.0 - t);
                b[seg.b] += fv * t;
            } else {
                b[seg.a] += fv * (1.0 - t) * (1.0 - 2.0 * t);
                b[seg.b] += fv * t * (2.0 * t - 1.0);
                b[seg.mid] += fv * 4.0 * t * (1.0 - t);
            }
        }
    }
    return b;
}

namespace {

// u' (c_k K_e + c_m M_e) v accumulated element by element
double elementwise_form(const FemSpace& sp, const Vector& u, const Vector& v,
                        double ck, double cm) {
    if ((int)u.size() != sp.dof_count || (int)v.size() != sp.dof_count)
        throw Error("inner product: dimension mismatch");
    const int nd = sp.order == 1 ? 3 : 6;
    LocalMatrix ke, me;
    double s = 0.0;
    for (size_t e = 0; e < sp.element_dofs.size(); ++e) {
        ElementGeom g = element_geom(sp.mesh, sp.mesh.triangles[e]);
        if (ck != 0.0) local_stiffness(g, sp.order, ke);
        local_mass(g, sp.order, me);
        const auto& ed = sp.element_dofs[e];
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) {
                double m = cm * me[i][j] + (ck != 0.0 ? ck * ke[i][j] : 0.0);
                s += u[ed[i]] * m * v[ed[j]];
            }
    }
    return s;
}

} // namespace

double h1_inner(const FemSpace& space, const Vector& u, const Vector& v) {
    return elementwise_form(space, u, v, 1.0, 1.0);
}

double l2_inner(const FemSpace& space, const Vector& u, const Vector& v) {
    return elementwise_form(space, u, v, 0.0, 1.0);
}

Vector interpolate(const FemSpace& space, const std::function<double(const Vec2&)>& g) {
    Vector out(space.dof_count);
    for (int i = 0; i < space.dof_count; ++i) out[i] = g(space.dof_coords[i]);
    return out;
}

} // namespace nh
