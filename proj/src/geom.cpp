#include "enip/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace enip {

double polygon_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

Polygon clip_polygon(const Polygon& poly, const HalfPlane& half) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % n];
    const double da = dot(half.normal, a) - half.offset;
    const double db = dot(half.normal, b) - half.offset;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

double volume_from_line(Vec2 normal, double offset, const Rect& rect) {
  return std::clamp(polygon_area(clip_polygon(rect.polygon(), {normal, offset})), 0.0, rect.area());
}

InterfaceLine line_from_volume(Vec2 normal, double target, const Rect& rect) {
  const double area = rect.area();
  if (target < 0.0 || target > area * (1.0 + 1e-14)) {
    throw std::invalid_argument("line_from_volume: target volume outside [0, cell area]");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec2& corner : rect.polygon()) {
    const double s = dot(normal, corner);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (target <= 0.0) return {normal, lo};
  if (target >= area) return {normal, hi};

  const double span = hi - lo;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * span; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = volume_from_line(normal, mid, rect);
    if (v == target) return {normal, mid};
    if (v < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {normal, 0.5 * (lo + hi)};
}

std::optional<Vec2> youngs_normal(const AlphaStencil& a, double dx, double dy) {
  for (const auto& col : a) {
    for (double v : col) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("youngs_normal: fraction outside [0, 1]");
    }
  }
  const double east = 0.25 * (a[2][0] + 2.0 * a[2][1] + a[2][2]);
  const double west = 0.25 * (a[0][0] + 2.0 * a[0][1] + a[0][2]);
  const double north = 0.25 * (a[0][2] + 2.0 * a[1][2] + a[2][2]);
  const double south = 0.25 * (a[0][0] + 2.0 * a[1][0] + a[2][0]);
  const Vec2 grad{(east - west) / (2.0 * dx), (north - south) / (2.0 * dy)};
  const double mag = norm(grad);
  if (mag < 1e-12) return std::nullopt;
  return Vec2{-grad.x / mag, -grad.y / mag};
}

}  // namespace enip
