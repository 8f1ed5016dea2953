#include "fluxlab/gauge.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

namespace fluxlab {

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNode = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeight = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// integral of A . dl over the straight segment a->b with n equal panels.
double segment_quadrature(const VectorPotentialField& field, Vec2 a, Vec2 b,
                          int panels) {
  const Vec2 d = b - a;
  double sum = 0.0;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double t0 = p * h;
    for (int g = 0; g < 8; ++g) {
      const double t = t0 + 0.5 * h * (kGlNode[g] + 1.0);
      sum += kGlWeight[g] * dot(field(a + t * d), d);
    }
  }
  return sum * 0.5 * h;
}

double refine_quadrature(const VectorPotentialField& field, Vec2 a, Vec2 b) {
  double coarse = segment_quadrature(field, a, b, 1);
  for (int panels = 2; panels <= (1 << 14); panels *= 2) {
    const double fine = segment_quadrature(field, a, b, panels);
    if (std::abs(fine - coarse) < 1e-10) return fine;
    coarse = fine;
  }
  throw NumericError("path_phase: segment quadrature did not converge");
}

// The tube field is analytic except for a derivative kink on the core circle;
// splitting the segment where it crosses that circle keeps every piece smooth
// and the refinement loop geometric.
double segment_integral(const VectorPotentialField& field, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const Vec2 f = a - field.tube_center();
  const double r = field.core_radius();
  const double qa = dot(d, d);
  const double qb = 2.0 * dot(f, d);
  const double qc = dot(f, f) - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;

  std::array<double, 4> cuts{0.0, 1.0, 1.0, 1.0};
  int n_cuts = 2;
  if (disc > 0.0 && qa > 0.0) {
    const double s = std::sqrt(disc);
    for (const double t : {(-qb - s) / (2 * qa), (-qb + s) / (2 * qa)}) {
      if (t > 0.0 && t < 1.0) cuts[n_cuts++] = t;
    }
    std::sort(cuts.begin(), cuts.begin() + n_cuts);
  }

  double total = 0.0;
  for (int k = 0; k + 1 < n_cuts; ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    total += refine_quadrature(field, a + cuts[k] * d, a + cuts[k + 1] * d);
  }
  return total;
}

// Segments are integrated in a canonical orientation and summed grouped by
// canonical endpoints in sorted order, with one signed integer count per
// group. Reversing a path therefore negates every term and produces an
// exactly negated phase.
using SegmentKey = std::tuple<double, double, double, double>;

}  // namespace

double gradient_defect(const GaugeFunction& lambda, std::span<const Vec2> points,
                       double h) {
  double worst = 0.0;
  for (const Vec2 p : points) {
    const Vec2 g = lambda.gradient(p);
    const double fx =
        (lambda.value({p.x + h, p.y}) - lambda.value({p.x - h, p.y})) / (2 * h);
    const double fy =
        (lambda.value({p.x, p.y + h}) - lambda.value({p.x, p.y - h})) / (2 * h);
    worst = std::max(worst, norm(g - Vec2{fx, fy}));
  }
  return worst;
}

VectorPotentialField VectorPotentialField::ideal_flux_tube(Vec2 center,
                                                           double core_radius,
                                                           FluxFraction flux) {
  if (!(core_radius > 0.0) || !std::isfinite(core_radius))
    throw InvalidInputError("ideal_flux_tube: core radius must be positive");
  VectorPotentialField f;
  f.center_ = center;
  f.core_radius_ = core_radius;
  f.flux_ = flux;
  return f;
}

Vec2 VectorPotentialField::operator()(Vec2 p) const {
  const Vec2 d = p - center_;
  const double r2 = dot(d, d);
  const double phi = flux_.nu * kTwoPi;
  Vec2 a{0.0, 0.0};
  if (r2 > core_radius_ * core_radius_) {
    // azimuthal, magnitude Phi / (2 pi r)
    const double c = phi / (kTwoPi * r2);
    a = {-c * d.y, c * d.x};
  } else if (r2 > 0.0) {
    // linear rise inside the core, continuous at r = core_radius
    const double c = phi / (kTwoPi * core_radius_ * core_radius_);
    a = {-c * d.y, c * d.x};
  }
  for (const GaugeFunction& shift : shifts_) a = a + shift.gradient(p);
  return a;
}

VectorPotentialField gauge_transform(VectorPotentialField field,
                                     GaugeFunction lambda) {
  if (!lambda.value || !lambda.gradient)
    throw InvalidInputError("gauge_transform: lambda needs value and gradient");
  field.shifts_.push_back(std::move(lambda));
  return field;
}

PhaseValue path_phase(const PolylinePath& path, const VectorPotentialField& field,
                      ChargeMultiple q, CorePolicy core) {
  if (q.q == 0) throw InvalidInputError("path_phase: q must be nonzero");
  if (core == CorePolicy::Exclude) {
    for (const Vec2& v : path.vertices()) {
      if (norm(v - field.tube_center()) <= field.core_radius())
        throw DomainError("path_phase: path vertex inside the flux-tube core");
    }
  }

  std::map<SegmentKey, std::pair<long, double>> groups;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    auto [a, b] = path.segment(k);
    int sign = 1;
    if (std::tie(b.x, b.y) < std::tie(a.x, a.y)) {
      std::swap(a, b);
      sign = -1;
    }
    auto [it, fresh] = groups.try_emplace(SegmentKey{a.x, a.y, b.x, b.y},
                                          std::pair<long, double>{0, 0.0});
    if (fresh) it->second.second = segment_integral(field, a, b);
    it->second.first += sign;
  }

  double total = 0.0;
  for (const auto& [key, entry] : groups)
    total += static_cast<double>(entry.first) * entry.second;
  return PhaseValue(q.q * total);
}

PhaseValue loop_phase(const PolylinePath& path, const VectorPotentialField& field,
                      ChargeMultiple q, CorePolicy core) {
  if (!path.closed()) throw InvalidInputError("loop_phase: path must be closed");
  return path_phase(path, field, q, core);
}

FluxFraction enclosed_flux(const PolylinePath& path,
                           const VectorPotentialField& field) {
  return FluxFraction(loop_phase(path, field, ChargeMultiple(1)).radians() /
                      kTwoPi);
}

}  // namespace fluxlab
