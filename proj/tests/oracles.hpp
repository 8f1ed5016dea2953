// Test-only oracles, independent of the library code paths they check.
#ifndef FLUXLAB_TESTS_ORACLES_HPP
#define FLUXLAB_TESTS_ORACLES_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"

namespace oracles {

// Plain composite trapezoid rule along the polyline, completely separate
// from the Gauss-Legendre machinery under test.
inline double trapezoid_path_integral(const fluxlab::PolylinePath& path,
                                      const fluxlab::VectorPotentialField& field,
                                      int q, long points_per_segment) {
  double total = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const auto [a, b] = path.segment(k);
    const fluxlab::Vec2 d = b - a;
    double sum = 0.5 * (dot(field(a), d) + dot(field(b), d));
    for (long i = 1; i < points_per_segment; ++i) {
      const double t = static_cast<double>(i) / points_per_segment;
      sum += dot(field(a + t * d), d);
    }
    total += sum / points_per_segment;
  }
  return q * total;
}

// Star-shaped polygon around `center`: strictly increasing angles, so it is
// simple and counterclockwise by construction.
inline std::vector<fluxlab::Vec2> star_polygon(std::mt19937& rng, int vertices,
                                               fluxlab::Vec2 center, double r_min,
                                               double r_max) {
  std::uniform_real_distribution<double> jitter(0.05, 0.95);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::vector<fluxlab::Vec2> poly;
  poly.reserve(vertices);
  const double sector = 2.0 * std::numbers::pi / vertices;
  for (int k = 0; k < vertices; ++k) {
    const double theta = sector * (k + jitter(rng));
    const double r = radius(rng);
    poly.push_back({center.x + r * std::cos(theta), center.y + r * std::sin(theta)});
  }
  return poly;
}

// Even-odd ray casting; valid for simple polygons only.
inline bool ray_cast_inside(const std::vector<fluxlab::Vec2>& poly,
                            fluxlab::Vec2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const fluxlab::Vec2 a = poly[j];
    const fluxlab::Vec2 b = poly[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (x_cross > p.x) inside = !inside;
    }
  }
  return inside;
}

inline double shoelace_area(const std::vector<fluxlab::Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    a += cross(poly[j], poly[i]);
  return 0.5 * a;
}

// Winding of a *simple* polygon: 0 outside, +/-1 inside by orientation.
inline int simple_polygon_winding(const std::vector<fluxlab::Vec2>& poly,
                                  fluxlab::Vec2 p) {
  if (!ray_cast_inside(poly, p)) return 0;
  return shoelace_area(poly) > 0.0 ? 1 : -1;
}

inline std::vector<fluxlab::Vec2> circle_polyline(fluxlab::Vec2 center,
                                                  double radius, int segments,
                                                  bool ccw = true) {
  std::vector<fluxlab::Vec2> poly;
  poly.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double theta =
        2.0 * std::numbers::pi * k / segments * (ccw ? 1.0 : -1.0);
    poly.push_back(
        {center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)});
  }
  return poly;
}

}  // namespace oracles

#endif
