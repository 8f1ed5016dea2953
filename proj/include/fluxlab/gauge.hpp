#ifndef FLUXLAB_GAUGE_HPP
#define FLUXLAB_GAUGE_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "fluxlab/errors.hpp"
#include "fluxlab/geometry.hpp"

namespace fluxlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Enclosed flux in units of the flux quantum 2*pi*hbar*c/e. Internal units
// put hbar = c = 1 and measure charge in units of e, so one flux quantum is
// a phase of 2*pi and every holonomy reduces to 2*pi * q * w * nu.
// Quantization is never enforced here; any finite value is a valid flux.
struct FluxFraction {
  double nu = 0.0;

  FluxFraction() = default;
  explicit FluxFraction(double value) : nu(value) {
    if (!std::isfinite(value))
      throw InvalidInputError("FluxFraction: flux must be finite");
  }
};

// Particle charge in units of e: 1 for an electron, 2 for a cooper pair.
struct ChargeMultiple {
  int q = 1;

  ChargeMultiple() = default;
  explicit ChargeMultiple(int value) : q(value) {
    if (value == 0) throw InvalidInputError("ChargeMultiple: q must be nonzero");
  }
};

// A phase in radians; `reduced()` folds into [0, 2*pi).
class PhaseValue {
 public:
  PhaseValue() = default;
  explicit PhaseValue(double radians) : radians_(radians) {}

  double radians() const { return radians_; }
  double reduced() const { return reduce(radians_); }

  static double reduce(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;  // fmod can round up to 2*pi exactly
    return r;
  }

 private:
  double radians_ = 0.0;
};

// Single-valued gauge function lambda(x, y) with its analytic gradient.
struct GaugeFunction {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
};

// Largest deviation between the analytic gradient and a central finite
// difference with step h over the sample points. Used to vet that a
// GaugeFunction is consistent (and in particular single-valued locally).
double gradient_defect(const GaugeFunction& lambda, std::span<const Vec2> points,
                       double h = 1e-5);

// Planar vector potential of an ideal flux tube (the cross-section of a long
// solenoid carrying flux nu), optionally wrapped by gauge shifts A -> A + grad
// lambda. Outside the core the field is azimuthal with magnitude Phi/(2 pi r);
// inside it rises linearly so the field is continuous at the core radius and
// all the flux threads the core.
class VectorPotentialField {
 public:
  static VectorPotentialField ideal_flux_tube(Vec2 center, double core_radius,
                                              FluxFraction flux);

  Vec2 operator()(Vec2 p) const;

  Vec2 tube_center() const { return center_; }
  double core_radius() const { return core_radius_; }
  FluxFraction flux() const { return flux_; }

  friend VectorPotentialField gauge_transform(VectorPotentialField field,
                                              GaugeFunction lambda);

 private:
  VectorPotentialField() = default;

  Vec2 center_;
  double core_radius_ = 0.0;
  FluxFraction flux_;
  std::vector<GaugeFunction> shifts_;
};

// A -> A + grad lambda. Loop phases are invariant; open-path phases shift by
// q * (lambda(end) - lambda(start)).
VectorPotentialField gauge_transform(VectorPotentialField field,
                                     GaugeFunction lambda);

enum class CorePolicy {
  Allow,    // path may enter the flux-tube core
  Exclude,  // any vertex inside the core raises DomainError
};

// q * integral of A . dl along the path, by per-segment composite
// Gauss-Legendre quadrature refined until successive halvings agree to 1e-10.
PhaseValue path_phase(const PolylinePath& path, const VectorPotentialField& field,
                      ChargeMultiple q, CorePolicy core = CorePolicy::Allow);

// path_phase restricted to closed paths: the holonomy q * contour integral,
// equal to 2*pi * q * w * nu for a path of winding number w about the tube.
PhaseValue loop_phase(const PolylinePath& path, const VectorPotentialField& field,
                      ChargeMultiple q, CorePolicy core = CorePolicy::Allow);

// Flux enclosed by a closed path: loop phase at unit charge divided by 2*pi,
// i.e. w * nu.
FluxFraction enclosed_flux(const PolylinePath& path,
                           const VectorPotentialField& field);

}  // namespace fluxlab

#endif
