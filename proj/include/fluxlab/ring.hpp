#ifndef FLUXLAB_RING_HPP
#define FLUXLAB_RING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fluxlab/errors.hpp"
#include "fluxlab/gauge.hpp"

namespace fluxlab {

// Allowed flux values for a condensate of charge q: nu = n/q, n integer.
// For cooper pairs (q = 2) that is half-integer nu, i.e. flux in steps of
// half the electron flux quantum.
struct QuantizationRule {
  ChargeMultiple q;

  explicit QuantizationRule(ChargeMultiple charge) : q(charge) {}
  FluxFraction allowed(long long n) const {
    return FluxFraction(static_cast<double>(n) / q.q);
  }
};

FluxFraction allowed_flux(long long n, ChargeMultiple q);

struct QuantizedFlux {
  long long n = 0;
  FluxFraction trapped;
};

// Nearest allowed value to the external flux; an exact halfway tie snaps to
// the even n.
QuantizedFlux quantize_flux(FluxFraction nu_external, ChargeMultiple q);

struct StaircasePoint {
  double nu_external = 0.0;
  long long n = 0;
  double nu_trapped = 0.0;
};

std::vector<StaircasePoint> staircase(std::span<const double> nu_external_sweep,
                                      ChargeMultiple q);

// Particle-on-a-ring levels E_n = (n - q nu)^2 / 2 in units hbar^2/(m R^2),
// sorted by energy (even n first on exact ties, matching quantize_flux).
struct RingSpectrum {
  struct Level {
    long long n = 0;
    double energy = 0.0;
  };
  std::vector<Level> levels;
  ChargeMultiple q;
  FluxFraction nu;

  const Level& ground() const { return levels.front(); }
};

RingSpectrum ring_spectrum(long long n_min, long long n_max, ChargeMultiple q,
                           FluxFraction nu);

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Planar condensate support: allowed cells may carry wavefunction, the flux
// threads flux_cell.
struct DomainMask {
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> allowed;
  Cell flux_cell;

  int index(int x, int y) const { return y * nx + x; }
  bool is_allowed(int x, int y) const { return allowed[index(x, y)] != 0; }
};

// Whether the quantization argument binds: the flux region must be a hole in
// the condensate, i.e. a forbidden component fully enclosed by allowed cells.
// If the flux cell is itself allowed, or its forbidden component reaches the
// grid boundary, any loop around the flux can be contracted away and no
// quantization follows.
struct TopologyVerdict {
  enum class Kind { QuantizationApplies, NoQuantization };
  enum class Reason { EnclosedHole, HoleOpenToBoundary, FluxRegionAllowed };

  Kind kind = Kind::NoQuantization;
  Reason reason = Reason::FluxRegionAllowed;
  // EnclosedHole: the forbidden component containing the flux cell.
  // HoleOpenToBoundary: a forbidden path from the flux cell to the boundary.
  // FluxRegionAllowed: just the flux cell.
  std::vector<Cell> witness;

  std::string describe() const;
};

// Flood fill over forbidden cells from flux_cell, 4-connectivity.
TopologyVerdict topology_check(const DomainMask& mask);

// Canonical masks used across tests and docs.
DomainMask annulus_mask(int nx, int ny, double r_inner, double r_outer);
DomainMask open_plane_mask(int nx, int ny);

}  // namespace fluxlab

#endif
