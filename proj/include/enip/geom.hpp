#ifndef ENIP_GEOM_HPP
#define ENIP_GEOM_HPP

#include <array>
#include <optional>
#include <vector>

#include "enip/core.hpp"

namespace enip {

/// Convex polygon, vertices counterclockwise.
using Polygon = std::vector<Vec2>;

/// The closed half-plane { x : normal . x <= offset }.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;
};

/// Interface segment support n . x = d; the reference material lies on the
/// side n . x <= d, i.e. the normal points out of it.
struct InterfaceLine {
  Vec2 normal;
  double offset = 0.0;
};

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  Polygon polygon() const { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }
};

double polygon_area(const Polygon& poly);

/// Sutherland-Hodgman clip of a convex polygon by one half-plane.
Polygon clip_polygon(const Polygon& poly, const HalfPlane& half);

/// Area of { x in rect : n . x <= d }.
double volume_from_line(Vec2 normal, double offset, const Rect& rect);

/// Offset d such that volume_from_line(normal, d, rect) matches the target,
/// found by bisection over the support interval of the rectangle.
InterfaceLine line_from_volume(Vec2 normal, double target_volume, const Rect& rect);

/// 3x3 volume-fraction stencil, indexed [di + 1][dj + 1] with i along x.
using AlphaStencil = std::array<std::array<double, 3>, 3>;

/// Youngs normal n = -grad(alpha) / |grad(alpha)|; empty when the gradient
/// vanishes (below 1e-12).
std::optional<Vec2> youngs_normal(const AlphaStencil& alpha, double dx, double dy);

}  // namespace enip

#endif  // ENIP_GEOM_HPP
