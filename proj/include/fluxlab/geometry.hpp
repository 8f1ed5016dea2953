#ifndef FLUXLAB_GEOMETRY_HPP
#define FLUXLAB_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "fluxlab/errors.hpp"

namespace fluxlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Ordered polyline, open or closed. A closed path implicitly joins the last
// vertex back to the first; a trailing vertex equal to the first is dropped
// on construction so both conventions parse to the same path.
class PolylinePath {
 public:
  PolylinePath(std::vector<Vec2> vertices, bool closed);

  const std::vector<Vec2>& vertices() const { return verts_; }
  bool closed() const { return closed_; }

  std::size_t segment_count() const {
    return closed_ ? verts_.size() : verts_.size() - 1;
  }
  std::pair<Vec2, Vec2> segment(std::size_t k) const {
    const std::size_t n = verts_.size();
    return {verts_[k], verts_[(k + 1) % n]};
  }

  PolylinePath reversed() const;

 private:
  std::vector<Vec2> verts_;
  bool closed_ = false;
};

// Proximity guard for winding computations: vertices or edges closer than
// this to the reference point raise GeometryError.
inline constexpr double kGeometryEpsilon = 1e-9;

// Signed number of turns of a closed path around `point`, by summation of
// subtended-angle increments. The accumulated angle must land within 0.01
// turns of an integer or NumericError is raised instead of silently rounding.
int winding_number(const PolylinePath& path, Vec2 point);

}  // namespace fluxlab

#endif
