#pragma once

#include <array>
#include <vector>

#include "fakecatcher/common.hpp"

namespace fc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using Polygon = std::vector<Point2>;

// Signed area (shoelace); positive for counter-clockwise vertex order.
double polygon_signed_area(const Polygon& poly);
double polygon_area(const Polygon& poly);
Point2 polygon_centroid(const Polygon& poly);
// Scale about the centroid.
Polygon polygon_scaled(const Polygon& poly, double factor);
bool point_in_polygon(const Polygon& poly, double x, double y);
bool polygon_is_simple(const Polygon& poly);

struct Triangle {
    std::array<std::size_t, 3> v;  // indices into a point set
};

// Bowyer-Watson Delaunay triangulation. Throws ParamError when all points
// are collinear.
std::vector<Triangle> delaunay(const std::vector<Point2>& points);

// Barycentric coordinates of p with respect to triangle (a, b, c).
std::array<double, 3> barycentric(const Point2& a, const Point2& b, const Point2& c,
                                  const Point2& p);

}  // namespace fc
