#include "fluxlab/geometry.hpp"

#include <cmath>
#include <numbers>

namespace fluxlab {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

PolylinePath::PolylinePath(std::vector<Vec2> vertices, bool closed)
    : verts_(std::move(vertices)), closed_(closed) {
  if (closed_ && verts_.size() >= 2 && verts_.front().x == verts_.back().x &&
      verts_.front().y == verts_.back().y) {
    verts_.pop_back();
  }
  if (verts_.size() < 2)
    throw InvalidInputError("PolylinePath: need at least 2 vertices");
  for (const Vec2& v : verts_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw InvalidInputError("PolylinePath: vertices must be finite");
  }
  const std::size_t n = verts_.size();
  const std::size_t last = closed_ ? n : n - 1;
  for (std::size_t k = 0; k < last; ++k) {
    const Vec2 a = verts_[k];
    const Vec2 b = verts_[(k + 1) % n];
    if (a.x == b.x && a.y == b.y)
      throw InvalidInputError("PolylinePath: consecutive vertices coincide");
  }
}

PolylinePath PolylinePath::reversed() const {
  std::vector<Vec2> rev(verts_.rbegin(), verts_.rend());
  return PolylinePath(std::move(rev), closed_);
}

int winding_number(const PolylinePath& path, Vec2 point) {
  if (!path.closed())
    throw InvalidInputError("winding_number: path must be closed");

  for (const Vec2& v : path.vertices()) {
    if (norm(v - point) <= kGeometryEpsilon)
      throw GeometryError("winding_number: reference point on a path vertex");
  }
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const auto [a, b] = path.segment(k);
    if (point_segment_distance(point, a, b) <= kGeometryEpsilon)
      throw GeometryError("winding_number: reference point on a path edge");
  }

  double total = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const auto [a, b] = path.segment(k);
    const Vec2 u = a - point;
    const Vec2 v = b - point;
    total += std::atan2(cross(u, v), dot(u, v));
  }

  const double turns = total / (2.0 * std::numbers::pi);
  const double nearest = std::round(turns);
  if (std::abs(turns - nearest) >= 0.01)
    throw NumericError("winding_number: angle sum is " + std::to_string(turns) +
                       " turns, not within 0.01 of an integer");
  return static_cast<int>(nearest);
}

}  // namespace fluxlab
