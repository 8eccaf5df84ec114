#include "neumann_holes/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace nh {

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Predicates. Double-precision first, long-double refinement near ties.
// Exact ties are returned as 0 and treated deterministically by the callers.

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double l = (b.x - a.x) * (c.y - a.y);
    const double r = (b.y - a.y) * (c.x - a.x);
    const double det = l - r;
    const double mag = std::abs(l) + std::abs(r);
    if (std::abs(det) > 1e-14 * mag) return det;
    const long double lx = (long double)(b.x) - a.x, ly = (long double)(b.y) - a.y;
    const long double mx = (long double)(c.x) - a.x, my = (long double)(c.y) - a.y;
    const long double d = lx * my - ly * mx;
    if (std::abs((double)d) > 1e-18 * mag) return (double)d;
    return 0.0;
}

// > 0 iff d lies strictly inside the circumcircle of ccw triangle (a,b,c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    const double det = ad2 * (bdx * cdy - bdy * cdx)
                     - bd2 * (adx * cdy - ady * cdx)
                     + cd2 * (adx * bdy - ady * bdx);
    const double mag = std::abs(ad2) * (std::abs(bdx * cdy) + std::abs(bdy * cdx))
                     + std::abs(bd2) * (std::abs(adx * cdy) + std::abs(ady * cdx))
                     + std::abs(cd2) * (std::abs(adx * bdy) + std::abs(ady * bdx));
    if (std::abs(det) > 1e-12 * mag) return det;
    const long double Adx = (long double)a.x - d.x, Ady = (long double)a.y - d.y;
    const long double Bdx = (long double)b.x - d.x, Bdy = (long double)b.y - d.y;
    const long double Cdx = (long double)c.x - d.x, Cdy = (long double)c.y - d.y;
    const long double Ad2 = Adx * Adx + Ady * Ady;
    const long double Bd2 = Bdx * Bdx + Bdy * Bdy;
    const long double Cd2 = Cdx * Cdx + Cdy * Cdy;
    const long double det2 = Ad2 * (Bdx * Cdy - Bdy * Cdx)
                           - Bd2 * (Adx * Cdy - Ady * Cdx)
                           + Cd2 * (Adx * Bdy - Ady * Bdx);
    if (std::abs((double)det2) > 1e-16 * mag) return (double)det2;
    return 0.0;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double bx = b.x - a.x, by = b.y - a.y;
    const double cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

inline std::uint64_t dir_key(int u, int v) {
    return (std::uint64_t(std::uint32_t(u)) << 32) | std::uint32_t(v);
}
inline std::uint64_t und_key(int u, int v) {
    return u < v ? dir_key(u, v) : dir_key(v, u);
}

// ---------------------------------------------------------------------------
// Boundary description: sampled polylines plus analytic curves for snapping.

struct BoundaryCurve {
    enum class Kind { Polyline, Circle } kind = Kind::Polyline;
    Vec2 center;
    double radius = 0.0;

    Vec2 snap(const Vec2& p) const {
        if (kind == Kind::Circle) {
            Vec2 d = p - center;
            double n = d.norm();
            if (n == 0.0) return {center.x + radius, center.y};
            return center + d * (radius / n);
        }
        return p; // straight pieces: midpoints already lie on the line
    }
};

struct SampledBoundary {
    std::vector<Vec2> points;      // closed loop, points[i] -> points[i+1]
    BoundaryTag tag;
    BoundaryCurve curve;
};

std::vector<Vec2> sample_circle(const Vec2& c, double r, int n) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        double t = 2.0 * kPi * double(i) / double(n);
        pts.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
    }
    return pts;
}

std::vector<Vec2> sample_polygon(const std::vector<Vec2>& verts, double spacing) {
    std::vector<Vec2> pts;
    const int n = (int)verts.size();
    for (int i = 0; i < n; ++i) {
        const Vec2& a = verts[i];
        const Vec2& b = verts[(i + 1) % n];
        double len = (b - a).norm();
        int m = std::max(1, (int)std::ceil(len / spacing));
        for (int j = 0; j < m; ++j) {
            double t = double(j) / double(m);
            pts.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    return pts;
}

double polygon_signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        s += a.cross(b);
    }
    return 0.5 * s;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool in = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
            double xi = poly[j].x + (poly[i].x - poly[j].x) * (p.y - poly[j].y) / (poly[i].y - poly[j].y);
            if (p.x < xi) in = !in;
        }
    }
    return in;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = (p - a).dot(ab) / std::max(ab.norm2(), 1e-300);
    t = std::clamp(t, 0.0, 1.0);
    Vec2 q = a + ab * t;
    return (p - q).norm();
}

// ---------------------------------------------------------------------------
// Constrained Delaunay triangulation with Ruppert-style refinement.

struct Triangulator {
    struct Tri {
        int v[3];
        bool alive = false; // allocated and present
        bool live = false;  // lies inside the computational domain
    };

    std::vector<Vec2> pts;
    std::vector<Tri> tris;
    std::vector<int> free_tris;
    std::unordered_map<std::uint64_t, int> edge_tri;   // directed edge -> triangle
    std::unordered_map<std::uint64_t, BoundaryTag> walls; // undirected constrained segments
    // Spatial grid over segment midpoints for encroachment queries.
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> seg_grid;
    double grid_cell = 1.0;
    Vec2 grid_origin;
    int super[3] = {-1, -1, -1};
    int last_tri_hint = -1;
    std::vector<int> last_fan; // triangles created by the most recent insertion
    long inserted_count = 0;
    long insert_cap = 6000000;

    std::uint64_t cell_key(const Vec2& p) const {
        auto cx = (std::int64_t)std::floor((p.x - grid_origin.x) / grid_cell);
        auto cy = (std::int64_t)std::floor((p.y - grid_origin.y) / grid_cell);
        return (std::uint64_t(std::uint32_t(cx)) << 32) | std::uint32_t(std::uint32_t(cy));
    }

    Vec2 seg_mid(std::uint64_t k) const {
        int u = int(k >> 32), v = int(k & 0xffffffffu);
        return (pts[u] + pts[v]) * 0.5;
    }

    void grid_add(std::uint64_t k) { seg_grid[cell_key(seg_mid(k))].push_back(k); }
    void grid_remove(std::uint64_t k) {
        auto it = seg_grid.find(cell_key(seg_mid(k)));
        if (it == seg_grid.end()) return;
        auto& v = it->second;
        v.erase(std::remove(v.begin(), v.end(), k), v.end());
    }

    int alloc_tri(int a, int b, int c, bool live) {
        int id;
        if (!free_tris.empty()) {
            id = free_tris.back();
            free_tris.pop_back();
        } else {
            id = (int)tris.size();
            tris.push_back({});
        }
        tris[id].v[0] = a; tris[id].v[1] = b; tris[id].v[2] = c;
        tris[id].alive = true;
        tris[id].live = live;
        edge_tri[dir_key(a, b)] = id;
        edge_tri[dir_key(b, c)] = id;
        edge_tri[dir_key(c, a)] = id;
        return id;
    }

    void kill_tri(int id) {
        Tri& t = tris[id];
        for (int e = 0; e < 3; ++e) {
            auto it = edge_tri.find(dir_key(t.v[e], t.v[(e + 1) % 3]));
            if (it != edge_tri.end() && it->second == id) edge_tri.erase(it);
        }
        t.alive = false;
        free_tris.push_back(id);
    }

    int neighbor(int id, int e) const {
        const Tri& t = tris[id];
        auto it = edge_tri.find(dir_key(t.v[(e + 1) % 3], t.v[e]));
        return it == edge_tri.end() ? -1 : it->second;
    }

    bool is_wall(int u, int v) const { return walls.count(und_key(u, v)) != 0; }

    void init_super(const std::vector<Vec2>& seed_pts) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& p : seed_pts) {
            xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
        }
        Vec2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
        double d = std::max(xmax - xmin, ymax - ymin);
        double big = 64.0 * std::max(d, 1e-12);
        // slightly irregular angles dodge symmetric cocircular ties
        const double ang[3] = {0.17, 2.31, 4.43};
        for (int i = 0; i < 3; ++i) {
            super[i] = (int)pts.size();
            pts.push_back({c.x + big * std::cos(ang[i]), c.y + big * std::sin(ang[i])});
        }
        last_tri_hint = alloc_tri(super[0], super[1], super[2], false);
        grid_origin = {xmin - big, ymin - big};
    }

    bool is_super_vertex(int v) const {
        return v == super[0] || v == super[1] || v == super[2];
    }

    // Walk from hint toward p; returns a triangle containing p (possibly on
    // its boundary). Throws MeshError if the walk fails.
    int locate(const Vec2& p, int hint) const {
        int cur = hint;
        if (cur < 0 || !tris[cur].alive) {
            cur = -1;
            for (int i = (int)tris.size() - 1; i >= 0; --i)
                if (tris[i].alive) { cur = i; break; }
            if (cur < 0) throw MeshError("locate: empty triangulation");
        }
        int prev = -1;
        for (long steps = 0; steps < (long)tris.size() * 4 + 64; ++steps) {
            const Tri& t = tris[cur];
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                int a = t.v[e], b = t.v[(e + 1) % 3];
                if (orient2d(pts[a], pts[b], p) < 0.0) {
                    int nb = neighbor(cur, e);
                    if (nb >= 0 && nb != prev) { next = nb; break; }
                    if (nb >= 0 && next < 0) next = nb;
                }
            }
            if (next < 0) return cur;
            prev = cur;
            cur = next;
        }
        throw MeshError("locate: walk did not terminate");
    }

    // Bowyer-Watson insertion. The cavity never crosses constrained walls;
    // each fan triangle inherits region liveness from the cavity triangle
    // that owned its border edge (cavities may mix regions right after a
    // wall has been removed for a segment split).
    int insert_point(const Vec2& p, int hint) {
        if (++inserted_count > insert_cap)
            throw MeshError("mesh refinement exceeded insertion cap");
        int t0 = locate(p, hint);
        int pid = (int)pts.size();
        pts.push_back(p);

        // collect cavity
        std::vector<int> cavity;
        std::unordered_set<int> in_cavity;
        std::deque<int> work{t0};
        in_cavity.insert(t0);
        while (!work.empty()) {
            int id = work.front();
            work.pop_front();
            cavity.push_back(id);
            for (int e = 0; e < 3; ++e) {
                int a = tris[id].v[e], b = tris[id].v[(e + 1) % 3];
                if (is_wall(a, b)) continue;
                int nb = neighbor(id, e);
                if (nb < 0 || in_cavity.count(nb)) continue;
                const Tri& n = tris[nb];
                if (incircle(pts[n.v[0]], pts[n.v[1]], pts[n.v[2]], p) > 0.0) {
                    in_cavity.insert(nb);
                    work.push_back(nb);
                }
            }
        }

        // boundary of the cavity: directed edges whose twin is not in cavity
        struct BorderEdge { int a, b; bool live; };
        std::vector<BorderEdge> border;
        for (int id : cavity) {
            for (int e = 0; e < 3; ++e) {
                int a = tris[id].v[e], b = tris[id].v[(e + 1) % 3];
                auto it = edge_tri.find(dir_key(b, a));
                int nb = (it == edge_tri.end()) ? -1 : it->second;
                if (nb < 0 || !in_cavity.count(nb) || is_wall(a, b))
                    border.push_back({a, b, tris[id].live});
            }
        }
        for (int id : cavity) kill_tri(id);
        last_fan.clear();
        for (const auto& be : border) {
            if (orient2d(pts[be.a], pts[be.b], p) <= 0.0)
                throw MeshError("insert_point: degenerate cavity fan");
            last_fan.push_back(alloc_tri(be.a, be.b, pid, be.live));
        }
        last_tri_hint = last_fan.empty() ? -1 : last_fan.back();
        return pid;
    }

    // --- constrained segments -------------------------------------------

    void add_wall(int u, int v, BoundaryTag tag) {
        std::uint64_t k = und_key(u, v);
        walls.emplace(k, tag);
        grid_add(k);
    }

    void remove_wall(int u, int v) {
        std::uint64_t k = und_key(u, v);
        grid_remove(k);
        walls.erase(k);
    }

    bool edge_present(int u, int v) const {
        return edge_tri.count(dir_key(u, v)) || edge_tri.count(dir_key(v, u));
    }

    bool encroached(std::uint64_t k, const Vec2& p, int skip_u = -1, int skip_v = -1) const {
        int u = int(k >> 32), v = int(k & 0xffffffffu);
        if (u == skip_u || u == skip_v || v == skip_u || v == skip_v) return false;
        Vec2 a = pts[u], b = pts[v];
        double d = (p - a).dot(p - b);
        double scale = (b - a).norm2();
        return d < -1e-12 * scale;
    }

    // segments whose diametral circle contains p
    std::vector<std::uint64_t> encroached_segments(const Vec2& p, int skip_u = -1, int skip_v = -1) const {
        std::vector<std::uint64_t> out;
        auto cx = (std::int64_t)std::floor((p.x - grid_origin.x) / grid_cell);
        auto cy = (std::int64_t)std::floor((p.y - grid_origin.y) / grid_cell);
        for (std::int64_t i = cx - 1; i <= cx + 1; ++i)
            for (std::int64_t j = cy - 1; j <= cy + 1; ++j) {
                std::uint64_t ck = (std::uint64_t(std::uint32_t(i)) << 32) | std::uint32_t(std::uint32_t(j));
                auto it = seg_grid.find(ck);
                if (it == seg_grid.end()) continue;
                for (std::uint64_t k : it->second)
                    if (walls.count(k) && encroached(k, p, skip_u, skip_v)) out.push_back(k);
            }
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Size field: target edge length, graded away from a small hole.
struct SizeField {
    double h;
    bool has_hole = false;
    double hole_spacing = 0.0;
    const DomainSpec* spec = nullptr;

    double operator()(const Vec2& p) const {
        if (!has_hole || hole_spacing >= h) return h;
        const HoleSpec& hs = *spec->hole;
        double d;
        if (std::holds_alternative<CircleHole>(hs.shape)) {
            d = std::abs((p - hs.center).norm() - hs.eps);
        } else {
            const auto& poly = std::get<PolygonHole>(hs.shape).vertices;
            d = 1e300;
            for (size_t i = 0; i < poly.size(); ++i) {
                Vec2 a = hs.center + poly[i] * hs.eps;
                Vec2 b = hs.center + poly[(i + 1) % poly.size()] * hs.eps;
                d = std::min(d, dist_point_segment(p, a, b));
            }
        }
        return std::min(h, hole_spacing + 0.5 * d);
    }
};

struct RefineState {
    Triangulator T;
    SizeField size;
    double min_angle_deg = 20.0;

    bool triangle_bad(int id, double* out_le = nullptr) const {
        const auto& t = T.tris[id];
        if (!t.alive || !t.live) return false;
        if (T.is_super_vertex(t.v[0]) || T.is_super_vertex(t.v[1]) || T.is_super_vertex(t.v[2]))
            return false;
        const Vec2& a = T.pts[t.v[0]];
        const Vec2& b = T.pts[t.v[1]];
        const Vec2& c = T.pts[t.v[2]];
        double le = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        if (out_le) *out_le = le;
        Vec2 ctr{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
        if (le > 1.3 * size(ctr)) return true;
        if (geom::min_angle_deg(a, b, c) < min_angle_deg) return true;
        return false;
    }
};

// Splits a wall segment at its midpoint (snapped to the analytic curve when
// the segment belongs to one). Returns the new vertex id.
int split_segment(RefineState& st, std::uint64_t k,
                  const std::vector<BoundaryCurve>& curve_of_tag) {
    Triangulator& T = st.T;
    int u = int(k >> 32), v = int(k & 0xffffffffu);
    BoundaryTag tag = T.walls.at(k);
    Vec2 mid = (T.pts[u] + T.pts[v]) * 0.5;
    mid = curve_of_tag[(int)tag].snap(mid);
    T.remove_wall(u, v);
    int hint = -1;
    if (auto it = T.edge_tri.find(dir_key(u, v)); it != T.edge_tri.end()) hint = it->second;
    else if (auto it2 = T.edge_tri.find(dir_key(v, u)); it2 != T.edge_tri.end()) hint = it2->second;
    int m = T.insert_point(mid, hint);
    T.add_wall(u, m, tag);
    T.add_wall(m, v, tag);
    return m;
}

void flood_classify(Triangulator& T, const Vec2& seed) {
    for (auto& t : T.tris)
        if (t.alive) t.live = false;
    int t0 = T.locate(seed, T.last_tri_hint);
    std::deque<int> work{t0};
    T.tris[t0].live = true;
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        for (int e = 0; e < 3; ++e) {
            int a = T.tris[id].v[e], b = T.tris[id].v[(e + 1) % 3];
            if (T.is_wall(a, b)) continue;
            int nb = T.neighbor(id, e);
            if (nb >= 0 && !T.tris[nb].live) {
                T.tris[nb].live = true;
                work.push_back(nb);
            }
        }
    }
}

Vec2 find_interior_seed(const DomainSpec& spec) {
    std::vector<Vec2> cands;
    if (std::holds_alternative<Rectangle>(spec.outer)) {
        const auto& r = std::get<Rectangle>(spec.outer);
        for (double tx : {0.5, 0.23, 0.77, 0.11, 0.89, 0.37, 0.63})
            for (double ty : {0.5, 0.23, 0.77, 0.11, 0.89, 0.37, 0.63})
                cands.push_back({r.x_min + tx * (r.x_max - r.x_min), r.y_min + ty * (r.y_max - r.y_min)});
    } else {
        const auto& d = std::get<Disk>(spec.outer);
        cands.push_back(d.center);
        for (double fr : {0.45, 0.68, 0.23})
            for (int i = 0; i < 8; ++i) {
                double t = 2.0 * kPi * (i + 0.35) / 8.0;
                cands.push_back({d.center.x + fr * d.radius * std::cos(t),
                                 d.center.y + fr * d.radius * std::sin(t)});
            }
    }
    for (const auto& p : cands) {
        if (!spec.contains(p)) continue;
        if (spec.hole) {
            double clear = (p - spec.hole->center).norm() - spec.hole->circumradius();
            if (clear < 0.5 * spec.hole->circumradius()) continue;
        }
        if (spec.distance_to_outer_boundary(p) < 0.05 * spec.min_feature_size()) continue;
        return p;
    }
    throw GeometryError("could not find an interior seed point");
}

} // namespace

// ---------------------------------------------------------------------------
// geom helpers

namespace geom {

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b - a).cross(c - a));
}

double min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c) {
    auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        Vec2 u = q - p, v = r - p;
        double cosv = u.dot(v) / std::max(u.norm() * v.norm(), 1e-300);
        return std::acos(std::clamp(cosv, -1.0, 1.0));
    };
    double m = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
    return m * 180.0 / kPi;
}

int hole_segment_count(double eps, double h) {
    return std::max(32, (int)std::ceil(2.0 * kPi * eps / h));
}

} // namespace geom

// ---------------------------------------------------------------------------
// DomainSpec / HoleSpec

double HoleSpec::circumradius() const {
    if (std::holds_alternative<CircleHole>(shape)) return eps;
    double r = 0.0;
    for (const auto& v : std::get<PolygonHole>(shape).vertices) r = std::max(r, v.norm());
    return r * eps;
}

double DomainSpec::outer_area() const {
    if (std::holds_alternative<Rectangle>(outer)) {
        const auto& r = std::get<Rectangle>(outer);
        return (r.x_max - r.x_min) * (r.y_max - r.y_min);
    }
    const auto& d = std::get<Disk>(outer);
    return kPi * d.radius * d.radius;
}

double DomainSpec::min_feature_size() const {
    if (std::holds_alternative<Rectangle>(outer)) {
        const auto& r = std::get<Rectangle>(outer);
        return std::min(r.x_max - r.x_min, r.y_max - r.y_min);
    }
    return std::get<Disk>(outer).radius;
}

double DomainSpec::distance_to_outer_boundary(const Vec2& p) const {
    if (std::holds_alternative<Rectangle>(outer)) {
        const auto& r = std::get<Rectangle>(outer);
        return std::min({p.x - r.x_min, r.x_max - p.x, p.y - r.y_min, r.y_max - p.y});
    }
    const auto& d = std::get<Disk>(outer);
    return d.radius - (p - d.center).norm();
}

bool DomainSpec::inside_hole(const Vec2& p) const {
    if (!hole) return false;
    const HoleSpec& h = *hole;
    if (std::holds_alternative<CircleHole>(h.shape))
        return (p - h.center).norm() < h.eps;
    std::vector<Vec2> poly;
    for (const auto& v : std::get<PolygonHole>(h.shape).vertices)
        poly.push_back(h.center + v * h.eps);
    return point_in_polygon(poly, p);
}

bool DomainSpec::contains(const Vec2& p) const {
    if (distance_to_outer_boundary(p) <= 0.0) return false;
    return !inside_hole(p);
}

void DomainSpec::validate() const {
    if (std::holds_alternative<Rectangle>(outer)) {
        const auto& r = std::get<Rectangle>(outer);
        if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min))
            throw GeometryError("rectangle sides must be positive");
    } else {
        if (!(std::get<Disk>(outer).radius > 0.0))
            throw GeometryError("disk radius must be positive");
    }
    if (!hole) return;
    const HoleSpec& h = *hole;
    if (!(h.eps > 0.0)) throw GeometryError("hole scale must be positive");
    if (std::holds_alternative<PolygonHole>(h.shape)) {
        const auto& poly = std::get<PolygonHole>(h.shape).vertices;
        if (poly.size() < 3) throw GeometryError("polygon hole needs at least 3 vertices");
        if (polygon_signed_area(poly) <= 0.0)
            throw GeometryError("polygon hole must be positively oriented");
        // simplicity: no two non-adjacent edges intersect
        const int n = (int)poly.size();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
                Vec2 a = poly[i], b = poly[(i + 1) % n];
                Vec2 c = poly[j], d = poly[(j + 1) % n];
                double o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
                double o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
                if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)))
                    throw GeometryError("polygon hole is not simple");
            }
        // interior angle floor keeps Delaunay refinement terminating
        for (int i = 0; i < n; ++i) {
            Vec2 prev = poly[(i + n - 1) % n], cur = poly[i], next = poly[(i + 1) % n];
            double ang = geom::min_angle_deg(cur, prev, next) * kPi / 180.0;
            Vec2 u = prev - cur, v = next - cur;
            double a = std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
            (void)ang;
            if (a < kPi / 6.0)
                throw GeometryError("polygon hole interior angle below 30 degrees");
        }
    }
    const double rh = h.circumradius();
    double clearance;
    if (std::holds_alternative<Rectangle>(outer) || std::holds_alternative<Disk>(outer))
        clearance = distance_to_outer_boundary(h.center) - rh;
    else
        clearance = 0.0;
    if (clearance < 2.0 * rh)
        throw GeometryError("hole must keep at least one diameter of clearance from the outer boundary");
    if (distance_to_outer_boundary(h.center) <= 0.0)
        throw GeometryError("hole center lies outside the outer shape");
}

// ---------------------------------------------------------------------------
// Mesh basics

double Mesh::total_area() const {
    double s = 0.0;
    for (const auto& t : triangles)
        s += geom::triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    return s;
}

double Mesh::boundary_length(BoundaryTag tag) const {
    double s = 0.0;
    for (const auto& e : boundary_edges)
        if (e.tag == tag) s += (vertices[e.b] - vertices[e.a]).norm();
    return s;
}

bool Mesh::has_hole_boundary() const {
    for (const auto& e : boundary_edges)
        if (e.tag == BoundaryTag::Hole) return true;
    return false;
}

void Mesh::validate() const {
    if (triangles.empty()) throw MeshError("mesh has no triangles");
    const int nv = (int)vertices.size();
    std::unordered_map<std::uint64_t, int> edge_count;
    for (const auto& t : triangles) {
        for (int v : t)
            if (v < 0 || v >= nv) throw MeshError("triangle vertex index out of range");
        double a = geom::triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        if (!(a > 0.0)) throw MeshError("non-positive triangle area");
        if (geom::min_angle_deg(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 20.0 - 1e-9)
            throw MeshError("triangle below the 20 degree quality floor");
        for (int e = 0; e < 3; ++e)
            edge_count[und_key(t[e], t[(e + 1) % 3])]++;
    }
    for (auto& [k, c] : edge_count)
        if (c > 2) throw MeshError("non-conforming edge shared by more than two triangles");
    std::unordered_set<std::uint64_t> btags;
    for (const auto& be : boundary_edges) {
        std::uint64_t k = und_key(be.a, be.b);
        auto it = edge_count.find(k);
        if (it == edge_count.end() || it->second != 1)
            throw MeshError("boundary edge is not a degree-one mesh edge");
        if (!btags.insert(k).second) throw MeshError("duplicate boundary edge tag");
    }
    for (auto& [k, c] : edge_count)
        if (c == 1 && !btags.count(k)) throw MeshError("untagged boundary edge");
    if (domain && domain->hole) {
        const HoleSpec& h = *domain->hole;
        const double tol = 1e-12 * std::max(h_target, 1e-30) + 1e-15;
        for (const auto& be : boundary_edges) {
            if (be.tag != BoundaryTag::Hole) continue;
            for (int v : {be.a, be.b}) {
                double d;
                if (std::holds_alternative<CircleHole>(h.shape)) {
                    d = std::abs((vertices[v] - h.center).norm() - h.eps);
                } else {
                    const auto& poly = std::get<PolygonHole>(h.shape).vertices;
                    d = 1e300;
                    for (size_t i = 0; i < poly.size(); ++i) {
                        Vec2 a = h.center + poly[i] * h.eps;
                        Vec2 b = h.center + poly[(i + 1) % poly.size()] * h.eps;
                        d = std::min(d, dist_point_segment(vertices[v], a, b));
                    }
                }
                if (d > tol)
                    throw MeshError("hole boundary vertex off the exact hole boundary");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// generate_mesh

Mesh generate_mesh(const DomainSpec& spec, double h) {
    spec.validate();
    if (!(h > 0.0)) throw GeometryError("h must be positive");
    if (h > spec.min_feature_size() / 4.0 + 1e-12)
        throw GeometryError("h must not exceed a quarter of the smallest outer feature");

    // --- boundary sampling
    std::vector<SampledBoundary> loops;
    if (std::holds_alternative<Rectangle>(spec.outer)) {
        const auto& r = std::get<Rectangle>(spec.outer);
        std::vector<Vec2> corners = {{r.x_min, r.y_min}, {r.x_max, r.y_min}, {r.x_max, r.y_max}, {r.x_min, r.y_max}};
        SampledBoundary sb;
        sb.tag = BoundaryTag::Outer;
        sb.points = sample_polygon(corners, h);
        loops.push_back(std::move(sb));
    } else {
        const auto& d = std::get<Disk>(spec.outer);
        int n = std::max(16, (int)std::ceil(2.0 * kPi * d.radius / h));
        SampledBoundary sb;
        sb.tag = BoundaryTag::Outer;
        sb.points = sample_circle(d.center, d.radius, n);
        sb.curve = {BoundaryCurve::Kind::Circle, d.center, d.radius};
        loops.push_back(std::move(sb));
    }
    double hole_spacing = h;
    if (spec.hole) {
        const HoleSpec& hs = *spec.hole;
        SampledBoundary sb;
        sb.tag = BoundaryTag::Hole;
        if (std::holds_alternative<CircleHole>(hs.shape)) {
            int n = geom::hole_segment_count(hs.eps, h);
            sb.points = sample_circle(hs.center, hs.eps, n);
            sb.curve = {BoundaryCurve::Kind::Circle, hs.center, hs.eps};
            hole_spacing = 2.0 * hs.eps * std::sin(kPi / n);
        } else {
            const auto& poly = std::get<PolygonHole>(hs.shape).vertices;
            std::vector<Vec2> scaled;
            for (const auto& v : poly) scaled.push_back(hs.center + v * hs.eps);
            double perim = 0.0;
            for (size_t i = 0; i < scaled.size(); ++i)
                perim += (scaled[(i + 1) % scaled.size()] - scaled[i]).norm();
            int n = std::max(32, (int)std::ceil(perim / h));
            hole_spacing = perim / n;
            sb.points = sample_polygon(scaled, hole_spacing);
        }
        loops.push_back(std::move(sb));
    }

    // --- initial triangulation
    RefineState st;
    Triangulator& T = st.T;
    std::vector<Vec2> all;
    for (const auto& l : loops)
        for (const auto& p : l.points) all.push_back(p);
    double max_seg = 0.0;
    for (const auto& l : loops)
        for (size_t i = 0; i < l.points.size(); ++i)
            max_seg = std::max(max_seg, (l.points[(i + 1) % l.points.size()] - l.points[i]).norm());
    T.grid_cell = std::max(max_seg, 1e-12);
    T.init_super(all);

    std::vector<BoundaryCurve> curve_of_tag(2);
    std::vector<std::vector<int>> loop_ids;
    for (const auto& l : loops) {
        curve_of_tag[(int)l.tag] = l.curve;
        std::vector<int> ids;
        for (const auto& p : l.points) ids.push_back(T.insert_point(p, T.last_tri_hint));
        loop_ids.push_back(std::move(ids));
    }
    for (size_t li = 0; li < loops.size(); ++li) {
        const auto& ids = loop_ids[li];
        for (size_t i = 0; i < ids.size(); ++i)
            T.add_wall(ids[i], ids[(i + 1) % ids.size()], loops[li].tag);
    }

    // recover any missing constrained segments by midpoint splitting
    for (int round = 0; round < 64; ++round) {
        std::vector<std::uint64_t> missing;
        for (const auto& [k, tag] : T.walls) {
            int u = int(k >> 32), v = int(k & 0xffffffffu);
            if (!T.edge_present(u, v)) missing.push_back(k);
        }
        if (missing.empty()) break;
        std::sort(missing.begin(), missing.end());
        for (auto k : missing)
            if (T.walls.count(k)) split_segment(st, k, curve_of_tag);
        if (round == 63) throw MeshError("failed to recover boundary segments");
    }

    flood_classify(T, find_interior_seed(spec));

    // --- Ruppert refinement
    st.size = SizeField{h, spec.hole.has_value(), hole_spacing, &spec};

    std::deque<std::uint64_t> seg_q;
    for (const auto& [k, tag] : T.walls) seg_q.push_back(k);
    std::deque<int> tri_q;
    for (int i = 0; i < (int)T.tris.size(); ++i)
        if (T.tris[i].alive) tri_q.push_back(i);

    auto push_new_around = [&](int vid) {
        for (auto k : T.encroached_segments(T.pts[vid], vid, -1)) seg_q.push_back(k);
        for (int tid : T.last_fan) tri_q.push_back(tid);
    };

    long guard = 0;
    const long guard_cap = 40000000;
    while (!seg_q.empty() || !tri_q.empty()) {
        if (++guard > guard_cap) throw MeshError("refinement loop exceeded iteration cap");
        if (!seg_q.empty()) {
            std::uint64_t k = seg_q.front();
            seg_q.pop_front();
            if (!T.walls.count(k)) continue;
            int u = int(k >> 32), v = int(k & 0xffffffffu);
            // encroached by any vertex of a triangle adjacent to the segment
            bool enc = false;
            for (auto dk : {dir_key(u, v), dir_key(v, u)}) {
                auto it = T.edge_tri.find(dk);
                if (it == T.edge_tri.end()) continue;
                const auto& t = T.tris[it->second];
                for (int e = 0; e < 3; ++e) {
                    int w = t.v[e];
                    if (w != u && w != v && !T.is_super_vertex(w) &&
                        T.encroached(k, T.pts[w])) { enc = true; break; }
                }
                if (enc) break;
            }
            if (!enc) continue;
            int m = split_segment(st, k, curve_of_tag);
            seg_q.push_back(und_key(u, m));
            seg_q.push_back(und_key(m, v));
            push_new_around(m);
            continue;
        }
        int id = tri_q.front();
        tri_q.pop_front();
        if (id < 0 || id >= (int)T.tris.size() || !T.tris[id].alive) continue;
        if (!st.triangle_bad(id)) continue;
        const auto& t = T.tris[id];
        Vec2 cc;
        try {
            cc = circumcenter(T.pts[t.v[0]], T.pts[t.v[1]], T.pts[t.v[2]]);
        } catch (...) { continue; }
        if (!std::isfinite(cc.x) || !std::isfinite(cc.y)) continue;
        auto enc = T.encroached_segments(cc);
        if (!enc.empty()) {
            for (auto k : enc)
                if (T.walls.count(k)) {
                    int u = int(k >> 32), v = int(k & 0xffffffffu);
                    int m = split_segment(st, k, curve_of_tag);
                    seg_q.push_back(und_key(u, m));
                    seg_q.push_back(und_key(m, v));
                    push_new_around(m);
                }
            tri_q.push_back(id);
            continue;
        }
        int located = T.locate(cc, id);
        if (!T.tris[located].live) {
            // circumcenter escaped the domain: split the nearest wall instead
            double best = 1e300;
            std::uint64_t bk = 0;
            bool found = false;
            for (const auto& [k, tag] : T.walls) {
                int u = int(k >> 32), v = int(k & 0xffffffffu);
                double d = dist_point_segment(cc, T.pts[u], T.pts[v]);
                if (d < best) { best = d; bk = k; found = true; }
            }
            if (found) {
                int u = int(bk >> 32), v = int(bk & 0xffffffffu);
                int m = split_segment(st, bk, curve_of_tag);
                seg_q.push_back(und_key(u, m));
                seg_q.push_back(und_key(m, v));
                push_new_around(m);
                tri_q.push_back(id);
            }
            continue;
        }
        int vid = T.insert_point(cc, located);
        push_new_around(vid);
    }

    // --- extraction
    Mesh mesh;
    mesh.h_target = h;
    mesh.domain = spec;
    std::vector<int> vmap(T.pts.size(), -1);
    for (int i = 0; i < (int)T.tris.size(); ++i) {
        const auto& t = T.tris[i];
        if (!t.alive || !t.live) continue;
        for (int v : t.v)
            if (vmap[v] < 0) {
                vmap[v] = (int)mesh.vertices.size();
                mesh.vertices.push_back(T.pts[v]);
            }
        mesh.triangles.push_back({vmap[t.v[0]], vmap[t.v[1]], vmap[t.v[2]]});
    }
    // boundary edges: live-triangle edges whose twin is dead/absent
    for (int i = 0; i < (int)T.tris.size(); ++i) {
        const auto& t = T.tris[i];
        if (!t.alive || !t.live) continue;
        for (int e = 0; e < 3; ++e) {
            int a = t.v[e], b = t.v[(e + 1) % 3];
            int nb = T.neighbor(i, e);
            bool is_bnd = (nb < 0) || !T.tris[nb].live;
            if (!is_bnd) continue;
            auto it = T.walls.find(und_key(a, b));
            if (it == T.walls.end())
                throw MeshError("boundary edge without a constrained segment");
            mesh.boundary_edges.push_back({vmap[a], vmap[b], it->second});
        }
    }
    mesh.validate();
    return mesh;
}

// ---------------------------------------------------------------------------
// refine_uniform

Mesh refine_uniform(const Mesh& mesh) {
    Mesh out;
    out.h_target = 0.5 * mesh.h_target;
    out.domain = mesh.domain;
    out.vertices = mesh.vertices;

    std::unordered_map<std::uint64_t, BoundaryTag> bnd_tag;
    for (const auto& be : mesh.boundary_edges) bnd_tag[und_key(be.a, be.b)] = be.tag;

    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid_of = [&](int a, int b) {
        std::uint64_t k = und_key(a, b);
        auto it = midpoint.find(k);
        if (it != midpoint.end()) return it->second;
        Vec2 m = (mesh.vertices[a] + mesh.vertices[b]) * 0.5;
        auto bt = bnd_tag.find(k);
        if (bt != bnd_tag.end() && mesh.domain) {
            const DomainSpec& spec = *mesh.domain;
            if (bt->second == BoundaryTag::Hole && spec.hole &&
                std::holds_alternative<CircleHole>(spec.hole->shape)) {
                BoundaryCurve c{BoundaryCurve::Kind::Circle, spec.hole->center, spec.hole->eps};
                m = c.snap(m);
            } else if (bt->second == BoundaryTag::Outer &&
                       std::holds_alternative<Disk>(spec.outer)) {
                const auto& d = std::get<Disk>(spec.outer);
                BoundaryCurve c{BoundaryCurve::Kind::Circle, d.center, d.radius};
                m = c.snap(m);
            }
        }
        int id = (int)out.vertices.size();
        out.vertices.push_back(m);
        midpoint.emplace(k, id);
        return id;
    };

    for (const auto& t : mesh.triangles) {
        int m01 = mid_of(t[0], t[1]);
        int m12 = mid_of(t[1], t[2]);
        int m20 = mid_of(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }
    for (const auto& be : mesh.boundary_edges) {
        int m = mid_of(be.a, be.b);
        out.boundary_edges.push_back({be.a, m, be.tag});
        out.boundary_edges.push_back({m, be.b, be.tag});
    }
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// mesh_quality

QualityReport mesh_quality(const Mesh& mesh) {
    QualityReport q;
    q.vertex_count = (int)mesh.vertices.size();
    q.triangle_count = (int)mesh.triangles.size();
    q.boundary_edge_count = (int)mesh.boundary_edges.size();
    q.min_angle_deg = 180.0;
    q.h_min = std::numeric_limits<double>::max();
    for (const auto& t : mesh.triangles) {
        const Vec2& a = mesh.vertices[t[0]];
        const Vec2& b = mesh.vertices[t[1]];
        const Vec2& c = mesh.vertices[t[2]];
        double e0 = (b - a).norm(), e1 = (c - b).norm(), e2 = (a - c).norm();
        double le = std::max({e0, e1, e2});
        double se = std::min({e0, e1, e2});
        double area = geom::triangle_area(a, b, c);
        double inr = 2.0 * area / (e0 + e1 + e2);
        q.min_angle_deg = std::min(q.min_angle_deg, geom::min_angle_deg(a, b, c));
        q.max_aspect = std::max(q.max_aspect, le / (2.0 * inr));
        q.h_min = std::min(q.h_min, se);
        q.h_max = std::max(q.h_max, le);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void put_double(std::ostream& os, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    os.write(buf, res.ptr - buf);
}

double get_double(const std::string& tok) {
    double v;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc()) throw IoError("bad float token: " + tok);
    return v;
}

} // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "MESH 1\n";
    os << "H_TARGET ";
    put_double(os, mesh.h_target);
    os << "\n";
    if (mesh.domain) {
        const DomainSpec& d = *mesh.domain;
        if (std::holds_alternative<Rectangle>(d.outer)) {
            const auto& r = std::get<Rectangle>(d.outer);
            os << "DOMAIN rectangle ";
            put_double(os, r.x_min); os << " "; put_double(os, r.x_max); os << " ";
            put_double(os, r.y_min); os << " "; put_double(os, r.y_max); os << "\n";
        } else {
            const auto& k = std::get<Disk>(d.outer);
            os << "DOMAIN disk ";
            put_double(os, k.center.x); os << " "; put_double(os, k.center.y); os << " ";
            put_double(os, k.radius); os << "\n";
        }
        if (d.hole) {
            const HoleSpec& h = *d.hole;
            if (std::holds_alternative<CircleHole>(h.shape)) {
                os << "HOLE circle ";
                put_double(os, h.center.x); os << " "; put_double(os, h.center.y); os << " ";
                put_double(os, h.eps); os << "\n";
            } else {
                const auto& poly = std::get<PolygonHole>(h.shape).vertices;
                os << "HOLE polygon ";
                put_double(os, h.center.x); os << " "; put_double(os, h.center.y); os << " ";
                put_double(os, h.eps); os << " " << poly.size();
                for (const auto& v : poly) {
                    os << " "; put_double(os, v.x); os << " "; put_double(os, v.y);
                }
                os << "\n";
            }
        }
    }
    os << "VERTICES " << mesh.vertices.size() << "\n";
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        os << i << " ";
        put_double(os, mesh.vertices[i].x);
        os << " ";
        put_double(os, mesh.vertices[i].y);
        os << "\n";
    }
    os << "TRIANGLES " << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "BOUNDARY " << mesh.boundary_edges.size() << "\n";
    for (const auto& e : mesh.boundary_edges)
        os << e.a << " " << e.b << " " << (e.tag == BoundaryTag::Outer ? "Outer" : "Hole") << "\n";
}

Mesh read_mesh(std::istream& is) {
    Mesh mesh;
    std::string tok;
    if (!(is >> tok) || tok != "MESH") throw IoError("not a mesh file");
    int version;
    is >> version;
    while (is >> tok) {
        if (tok == "H_TARGET") {
            std::string v;
            is >> v;
            mesh.h_target = get_double(v);
        } else if (tok == "DOMAIN") {
            std::string kind;
            is >> kind;
            DomainSpec d;
            if (kind == "rectangle") {
                std::string a, b, c, e;
                is >> a >> b >> c >> e;
                d.outer = Rectangle{get_double(a), get_double(b), get_double(c), get_double(e)};
            } else if (kind == "disk") {
                std::string a, b, c;
                is >> a >> b >> c;
                d.outer = Disk{{get_double(a), get_double(b)}, get_double(c)};
            } else {
                throw IoError("unknown DOMAIN kind: " + kind);
            }
            if (mesh.domain && mesh.domain->hole) d.hole = mesh.domain->hole;
            mesh.domain = d;
        } else if (tok == "HOLE") {
            std::string kind, a, b, c;
            is >> kind >> a >> b >> c;
            HoleSpec h;
            h.center = {get_double(a), get_double(b)};
            h.eps = get_double(c);
            if (kind == "circle") {
                h.shape = CircleHole{};
            } else if (kind == "polygon") {
                size_t n;
                is >> n;
                PolygonHole p;
                for (size_t i = 0; i < n; ++i) {
                    std::string x, y;
                    is >> x >> y;
                    p.vertices.push_back({get_double(x), get_double(y)});
                }
                h.shape = std::move(p);
            } else {
                throw IoError("unknown HOLE kind: " + kind);
            }
            if (!mesh.domain) mesh.domain = DomainSpec{Rectangle{0, 1, 0, 1}, std::nullopt};
            mesh.domain->hole = std::move(h);
        } else if (tok == "VERTICES") {
            size_t n;
            is >> n;
            mesh.vertices.resize(n);
            for (size_t i = 0; i < n; ++i) {
                size_t idx;
                std::string x, y;
                is >> idx >> x >> y;
                if (idx >= n) throw IoError("vertex index out of range");
                mesh.vertices[idx] = {get_double(x), get_double(y)};
            }
        } else if (tok == "TRIANGLES") {
            size_t n;
            is >> n;
            mesh.triangles.resize(n);
            for (size_t i = 0; i < n; ++i) is >> mesh.triangles[i][0] >> mesh.triangles[i][1] >> mesh.triangles[i][2];
        } else if (tok == "BOUNDARY") {
            size_t n;
            is >> n;
            mesh.boundary_edges.resize(n);
            for (size_t i = 0; i < n; ++i) {
                std::string tag;
                is >> mesh.boundary_edges[i].a >> mesh.boundary_edges[i].b >> tag;
                if (tag == "Outer") mesh.boundary_edges[i].tag = BoundaryTag::Outer;
                else if (tag == "Hole") mesh.boundary_edges[i].tag = BoundaryTag::Hole;
                else throw IoError("unknown boundary tag: " + tag);
            }
        } else {
            throw IoError("unknown mesh section: " + tok);
        }
    }
    return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_mesh(f, mesh);
    if (!f) throw IoError("write failed: " + path);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    return read_mesh(f);
}

} // namespace nh
