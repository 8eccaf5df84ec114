#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "neumann_holes/geometry.hpp"

namespace nh {

struct Polyline {
    std::vector<Vec2> points;
    bool closed = false;
};

// Iso-contour {field = iso} on a uniform nx x ny grid over the rectangle,
// marching squares with linear interpolation; ambiguous cells resolved by
// the cell-center sample.
std::vector<Polyline> extract_contour(const std::function<double(double, double)>& field,
                                      const Rectangle& box, int nx, int ny,
                                      double iso = 0.0);

// x,y rows with a header, components separated by blank lines.
void write_contour_csv(std::ostream& os, const std::vector<Polyline>& lines);

struct SvgGroup {
    std::vector<Polyline> lines;
    std::string stroke = "#1f77b4";
    double stroke_width = 0.01;
};

// Standalone SVG with an explicit viewBox covering `box`.
void write_contour_svg(std::ostream& os, const Rectangle& box,
                       const std::vector<SvgGroup>& groups);

} // namespace nh
