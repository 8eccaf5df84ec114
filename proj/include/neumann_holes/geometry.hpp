#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "neumann_holes/errors.hpp"

namespace nh {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const;
};

struct Rectangle {
    double x_min, x_max, y_min, y_max;
};

struct Disk {
    Vec2 center;
    double radius;
};

using OuterShape = std::variant<Rectangle, Disk>;

struct CircleHole {};

struct PolygonHole {
    // Simple, positively oriented, vertices in the unit-scale frame (scaled by eps).
    std::vector<Vec2> vertices;
};

using HoleShape = std::variant<CircleHole, PolygonHole>;

// Scaled hole: center + eps * shape (CircleHole is the unit disk).
struct HoleSpec {
    HoleShape shape;
    Vec2 center;
    double eps = 0.0;

    double circumradius() const; // of the scaled hole
};

struct DomainSpec {
    OuterShape outer;
    std::optional<HoleSpec> hole;

    // Throws GeometryError on invalid sizes or hole containment violation.
    void validate() const;

    double outer_area() const;
    double min_feature_size() const;
    bool contains(const Vec2& p) const;          // inside outer, outside closed hole
    bool inside_hole(const Vec2& p) const;       // inside the exact (analytic) scaled hole
    double distance_to_outer_boundary(const Vec2& p) const;
};

enum class BoundaryTag : std::uint8_t { Outer = 0, Hole = 1 };

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    BoundaryTag tag = BoundaryTag::Outer;
};

struct QualityReport {
    double min_angle_deg = 0.0;
    double max_aspect = 0.0; // longest edge / (2 * inradius)
    double h_min = 0.0;      // shortest edge over all triangles
    double h_max = 0.0;      // longest edge
    int vertex_count = 0;
    int triangle_count = 0;
    int boundary_edge_count = 0;
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    double h_target = 0.0;
    std::optional<DomainSpec> domain; // kept for boundary snapping on refinement

    double total_area() const;
    double boundary_length(BoundaryTag tag) const;
    bool has_hole_boundary() const;

    // Checks conformity, orientation, tag partition and hole-vertex placement.
    // Throws MeshError with a description of the first violation.
    void validate() const;
};

Mesh generate_mesh(const DomainSpec& spec, double h);
Mesh refine_uniform(const Mesh& mesh);
QualityReport mesh_quality(const Mesh& mesh);

// Plain-text serialization with VERTICES / TRIANGLES / BOUNDARY sections.
// Floats use shortest round-trip decimal representation.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

namespace geom {
double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c);
double min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c);
// Number of segments used to sample the hole boundary for target size h.
int hole_segment_count(double eps, double h);
} // namespace geom

} // namespace nh
