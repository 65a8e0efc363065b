#include "fakecatcher/geometry.hpp"

#include <limits>

namespace fc {

double polygon_signed_area(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

double polygon_area(const Polygon& poly) { return std::abs(polygon_signed_area(poly)); }

Point2 polygon_centroid(const Polygon& poly) {
    if (poly.empty()) throw ParamError("centroid of empty polygon");
    const double a = polygon_signed_area(poly);
    if (std::abs(a) < 1e-12) {
        // degenerate: fall back to the vertex mean
        Point2 c;
        for (const Point2& p : poly) {
            c.x += p.x;
            c.y += p.y;
        }
        c.x /= static_cast<double>(poly.size());
        c.y /= static_cast<double>(poly.size());
        return c;
    }
    Point2 c;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        const double cross = p.x * q.y - q.x * p.y;
        c.x += (p.x + q.x) * cross;
        c.y += (p.y + q.y) * cross;
    }
    c.x /= 6.0 * a;
    c.y /= 6.0 * a;
    return c;
}

Polygon polygon_scaled(const Polygon& poly, double factor) {
    const Point2 c = polygon_centroid(poly);
    Polygon out = poly;
    for (Point2& p : out) {
        p.x = c.x + (p.x - c.x) * factor;
        p.y = c.y + (p.y - c.y) * factor;
    }
    return out;
}

bool point_in_polygon(const Polygon& poly, double x, double y) {
    // even-odd crossing rule
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = poly[i];
        const Point2& b = poly[j];
        if ((a.y > y) != (b.y > y)) {
            const double xint = (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x;
            if (x < xint) inside = !inside;
        }
    }
    return inside;
}

namespace {

bool segments_properly_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                                 const Point2& q2) {
    auto orient = [](const Point2& a, const Point2& b, const Point2& c) {
        const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (v > 1e-12) return 1;
        if (v < -1e-12) return -1;
        return 0;
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

bool polygon_is_simple(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a1 = poly[i];
        const Point2& a2 = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent edges
            if (segments_properly_intersect(a1, a2, poly[j], poly[(j + 1) % n])) return false;
        }
    }
    return true;
}

namespace {

struct Circumcircle {
    double cx, cy, r2;
    bool valid;
};

Circumcircle circumcircle(const Point2& a, const Point2& b, const Point2& c) {
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (std::abs(d) < 1e-12) return {0.0, 0.0, 0.0, false};
    const double a2 = a.x * a.x + a.y * a.y;
    const double b2 = b.x * b.x + b.y * b.y;
    const double c2 = c.x * c.x + c.y * c.y;
    const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    const double dx = a.x - ux;
    const double dy = a.y - uy;
    return {ux, uy, dx * dx + dy * dy, true};
}

}  // namespace

std::vector<Triangle> delaunay(const std::vector<Point2>& points) {
    const std::size_t n = points.size();
    if (n < 3) throw ParamError("triangulation needs at least 3 points");

    // collinearity check
    bool noncollinear = false;
    for (std::size_t i = 2; i < n && !noncollinear; ++i) {
        const double v = (points[1].x - points[0].x) * (points[i].y - points[0].y) -
                         (points[1].y - points[0].y) * (points[i].x - points[0].x);
        if (std::abs(v) > 1e-9) noncollinear = true;
    }
    if (!noncollinear) throw ParamError("triangulation input is collinear");

    double minx = points[0].x, maxx = points[0].x, miny = points[0].y, maxy = points[0].y;
    for (const Point2& p : points) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    const double dx = maxx - minx, dy = maxy - miny;
    const double dmax = std::max(dx, dy) * 16.0 + 1.0;
    const double midx = 0.5 * (minx + maxx), midy = 0.5 * (miny + maxy);

    std::vector<Point2> pts = points;
    pts.push_back({midx - dmax, midy - dmax});  // super-triangle
    pts.push_back({midx + dmax, midy - dmax});
    pts.push_back({midx, midy + dmax});
    const std::size_t s0 = n, s1 = n + 1, s2 = n + 2;

    struct Tri {
        std::size_t a, b, c;
        Circumcircle cc;
    };
    auto make_tri = [&](std::size_t a, std::size_t b, std::size_t c) {
        return Tri{a, b, c, circumcircle(pts[a], pts[b], pts[c])};
    };
    std::vector<Tri> tris{make_tri(s0, s1, s2)};

    for (std::size_t ip = 0; ip < n; ++ip) {
        const Point2& p = pts[ip];
        std::vector<std::array<std::size_t, 2>> boundary;
        std::vector<Tri> keep;
        keep.reserve(tris.size());
        for (const Tri& t : tris) {
            const double ddx = p.x - t.cc.cx;
            const double ddy = p.y - t.cc.cy;
            const bool bad = t.cc.valid && (ddx * ddx + ddy * ddy <= t.cc.r2 + 1e-12);
            if (bad) {
                boundary.push_back({t.a, t.b});
                boundary.push_back({t.b, t.c});
                boundary.push_back({t.c, t.a});
            } else {
                keep.push_back(t);
            }
        }
        // edges appearing twice are interior to the cavity; drop both copies
        std::vector<std::array<std::size_t, 2>> hull;
        for (const auto& e : boundary) {
            bool shared = false;
            for (const auto& f : boundary) {
                if (&e != &f && e[0] == f[1] && e[1] == f[0]) {
                    shared = true;
                    break;
                }
            }
            if (!shared) hull.push_back(e);
        }
        tris = std::move(keep);
        for (const auto& e : hull) tris.push_back(make_tri(e[0], e[1], ip));
    }

    std::vector<Triangle> out;
    for (const Tri& t : tris) {
        if (t.a >= n || t.b >= n || t.c >= n) continue;  // touches the super-triangle
        out.push_back(Triangle{{t.a, t.b, t.c}});
    }
    if (out.empty()) throw ParamError("triangulation produced no triangles");
    return out;
}

std::array<double, 3> barycentric(const Point2& a, const Point2& b, const Point2& c,
                                  const Point2& p) {
    const double det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
    if (std::abs(det) < 1e-14) return {-1.0, -1.0, -1.0};
    const double l1 = ((b.y - c.y) * (p.x - c.x) + (c.x - b.x) * (p.y - c.y)) / det;
    const double l2 = ((c.y - a.y) * (p.x - c.x) + (a.x - c.x) * (p.y - c.y)) / det;
    return {l1, l2, 1.0 - l1 - l2};
}

}  // namespace fc
