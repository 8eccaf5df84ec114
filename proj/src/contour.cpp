#include "neumann_holes/contour.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>

namespace nh {

namespace {

struct Segment {
    Vec2 a, b;
};

Vec2 lerp_cross(Vec2 p, Vec2 q, double vp, double vq) {
    double t = vp / (vp - vq);
    return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

std::int64_t quantize(double v, double scale) {
    return (std::int64_t)std::llround(v / scale);
}

} // namespace

std::vector<Polyline> extract_contour(const std::function<double(double, double)>& field,
                                      const Rectangle& box, int nx, int ny, double iso) {
    if (nx < 2 || ny < 2) throw Error("extract_contour: grid must be at least 2x2");
    const double dx = (box.x_max - box.x_min) / (nx - 1);
    const double dy = (box.y_max - box.y_min) / (ny - 1);
    std::vector<double> v((size_t)nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            v[(size_t)j * nx + i] = field(box.x_min + i * dx, box.y_min + j * dy) - iso;

    std::vector<Segment> segs;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            double v00 = v[(size_t)j * nx + i];
            double v10 = v[(size_t)j * nx + i + 1];
            double v11 = v[(size_t)(j + 1) * nx + i + 1];
            double v01 = v[(size_t)(j + 1) * nx + i];
            int c = (v00 > 0) | ((v10 > 0) << 1) | ((v11 > 0) << 2) | ((v01 > 0) << 3);
            if (c == 0 || c == 15) continue;
            Vec2 p00{box.x_min + i * dx, box.y_min + j * dy};
            Vec2 p10{p00.x + dx, p00.y};
            Vec2 p11{p00.x + dx, p00.y + dy};
            Vec2 p01{p00.x, p00.y + dy};
            Vec2 bottom = lerp_cross(p00, p10, v00, v10);
            Vec2 right = lerp_cross(p10, p11, v10, v11);
            Vec2 top = lerp_cross(p01, p11, v01, v11);
            Vec2 left = lerp_cross(p00, p01, v00, v01);
            switch (c) {
                case 1: case 14: segs.push_back({left, bottom}); break;
                case 2: case 13: segs.push_back({bottom, right}); break;
                case 3: case 12: segs.push_back({left, right}); break;
                case 4: case 11: segs.push_back({right, top}); break;
                case 6: case 9: segs.push_back({bottom, top}); break;
                case 7: case 8: segs.push_back({left, top}); break;
                case 5: case 10: {
                    double vc = field(p00.x + 0.5 * dx, p00.y + 0.5 * dy) - iso;
                    bool flip = (vc > 0) != (c == 5);
                    if (!flip) {
                        segs.push_back({left, bottom});
                        segs.push_back({right, top});
                    } else {
                        segs.push_back({left, top});
                        segs.push_back({bottom, right});
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // chain segments into polylines by endpoint matching
    const double qscale = 1e-9 * std::max(dx, dy);
    std::multimap<std::pair<std::int64_t, std::int64_t>, size_t> by_end;
    auto key = [&](const Vec2& p) {
        return std::make_pair(quantize(p.x, qscale), quantize(p.y, qscale));
    };
    for (size_t s = 0; s < segs.size(); ++s) {
        by_end.insert({key(segs[s].a), s});
        by_end.insert({key(segs[s].b), s});
    }
    std::vector<char> used(segs.size(), 0);
    std::vector<Polyline> out;
    for (size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = 1;
        std::vector<Vec2> pts = {segs[s].a, segs[s].b};
        // grow forward then backward
        for (int dir = 0; dir < 2; ++dir) {
            while (true) {
                Vec2 tip = dir == 0 ? pts.back() : pts.front();
                auto range = by_end.equal_range(key(tip));
                size_t next = SIZE_MAX;
                for (auto it = range.first; it != range.second; ++it)
                    if (!used[it->second]) { next = it->second; break; }
                if (next == SIZE_MAX) break;
                used[next] = 1;
                Vec2 other = (key(segs[next].a) == key(tip)) ? segs[next].b : segs[next].a;
                if (dir == 0)
                    pts.push_back(other);
                else
                    pts.insert(pts.begin(), other);
            }
        }
        Polyline pl;
        pl.closed = key(pts.front()) == key(pts.back());
        if (pl.closed) pts.pop_back();
        pl.points = std::move(pts);
        out.push_back(std::move(pl));
    }
    return out;
}

void write_contour_csv(std::ostream& os, const std::vector<Polyline>& lines) {
    os << "x,y\n";
    char buf[80];
    bool first = true;
    for (const auto& pl : lines) {
        if (!first) os << "\n";
        first = false;
        for (const auto& p : pl.points) {
            int n = std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", p.x, p.y);
            os.write(buf, n);
        }
    }
}

void write_contour_svg(std::ostream& os, const Rectangle& box,
                       const std::vector<SvgGroup>& groups) {
    char buf[256];
    double w = box.x_max - box.x_min, h = box.y_max - box.y_min;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.12g %.12g %.12g %.12g\">\n",
                  box.x_min, -box.y_max, w, h);
    os << buf;
    for (const auto& g : groups) {
        std::snprintf(buf, sizeof(buf),
                      "<g fill=\"none\" stroke=\"%s\" stroke-width=\"%.12g\">\n",
                      g.stroke.c_str(), g.stroke_width);
        os << buf;
        for (const auto& pl : g.lines) {
            os << "<path d=\"";
            for (size_t i = 0; i < pl.points.size(); ++i) {
                // SVG y axis points down; mirror so the figure reads upright
                std::snprintf(buf, sizeof(buf), "%s%.12g %.12g", i == 0 ? "M" : " L",
                              pl.points[i].x, -pl.points[i].y);
                os << buf;
            }
            if (pl.closed) os << " Z";
            os << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
}

} // namespace nh
