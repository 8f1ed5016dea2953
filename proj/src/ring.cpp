#include "fluxlab/ring.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fluxlab {

FluxFraction allowed_flux(long long n, ChargeMultiple q) {
  return QuantizationRule(q).allowed(n);
}

QuantizedFlux quantize_flux(FluxFraction nu_external, ChargeMultiple q) {
  const double x = nu_external.nu * q.q;
  double lower = std::floor(x);
  double frac = x - lower;
  long long n = static_cast<long long>(lower);
  if (frac > 0.5) {
    n += 1;
  } else if (frac == 0.5) {
    // exact tie: take the even candidate
    if (n % 2 != 0) n += 1;
  }
  return {n, FluxFraction(static_cast<double>(n) / q.q)};
}

std::vector<StaircasePoint> staircase(std::span<const double> nu_external_sweep,
                                      ChargeMultiple q) {
  if (nu_external_sweep.empty())
    throw InvalidInputError("staircase: sweep must be nonempty");
  std::vector<StaircasePoint> out;
  out.reserve(nu_external_sweep.size());
  for (const double nu : nu_external_sweep) {
    const QuantizedFlux t = quantize_flux(FluxFraction(nu), q);
    out.push_back({nu, t.n, t.trapped.nu});
  }
  return out;
}

RingSpectrum ring_spectrum(long long n_min, long long n_max, ChargeMultiple q,
                           FluxFraction nu) {
  if (n_min > n_max) throw InvalidInputError("ring_spectrum: empty n range");
  RingSpectrum s{{}, q, nu};
  s.levels.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  for (long long n = n_min; n <= n_max; ++n) {
    const double k = static_cast<double>(n) - q.q * nu.nu;
    s.levels.push_back({n, 0.5 * k * k});
  }
  std::sort(s.levels.begin(), s.levels.end(),
            [](const RingSpectrum::Level& a, const RingSpectrum::Level& b) {
              if (a.energy != b.energy) return a.energy < b.energy;
              const bool a_even = (a.n % 2) == 0;
              const bool b_even = (b.n % 2) == 0;
              if (a_even != b_even) return a_even;
              return a.n < b.n;
            });
  return s;
}

std::string TopologyVerdict::describe() const {
  switch (reason) {
    case Reason::EnclosedHole:
      return "QuantizationApplies: flux cell lies in a forbidden hole enclosed "
             "by the condensate (" +
             std::to_string(witness.size()) + " cells)";
    case Reason::HoleOpenToBoundary:
      return "NoQuantization: flux region reaches the grid boundary, loops "
             "around it can be slid off";
    case Reason::FluxRegionAllowed:
      return "NoQuantization: flux cell is inside the allowed region, loops "
             "around it can be contracted through it";
  }
  return "";
}

TopologyVerdict topology_check(const DomainMask& mask) {
  if (mask.nx <= 0 || mask.ny <= 0 ||
      mask.allowed.size() != static_cast<std::size_t>(mask.nx) * mask.ny)
    throw InvalidInputError("topology_check: malformed mask");
  const Cell f = mask.flux_cell;
  if (f.x < 0 || f.x >= mask.nx || f.y < 0 || f.y >= mask.ny)
    throw InvalidInputError("topology_check: flux cell out of bounds");
  if (std::none_of(mask.allowed.begin(), mask.allowed.end(),
                   [](std::uint8_t a) { return a != 0; }))
    throw InvalidInputError("topology_check: mask has no allowed cell");

  TopologyVerdict verdict;
  if (mask.is_allowed(f.x, f.y)) {
    verdict.kind = TopologyVerdict::Kind::NoQuantization;
    verdict.reason = TopologyVerdict::Reason::FluxRegionAllowed;
    verdict.witness = {f};
    return verdict;
  }

  // BFS over forbidden cells; keep parents so an escape path can be
  // reconstructed when the component touches the boundary.
  std::vector<int> parent(static_cast<std::size_t>(mask.nx) * mask.ny, -1);
  std::vector<Cell> component;
  std::queue<Cell> frontier;
  frontier.push(f);
  parent[mask.index(f.x, f.y)] = mask.index(f.x, f.y);
  int boundary_hit = -1;

  const int dxs[4] = {1, -1, 0, 0};
  const int dys[4] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop();
    component.push_back(c);
    if (boundary_hit < 0 &&
        (c.x == 0 || c.x == mask.nx - 1 || c.y == 0 || c.y == mask.ny - 1))
      boundary_hit = mask.index(c.x, c.y);
    for (int d = 0; d < 4; ++d) {
      const int x = c.x + dxs[d];
      const int y = c.y + dys[d];
      if (x < 0 || x >= mask.nx || y < 0 || y >= mask.ny) continue;
      const int i = mask.index(x, y);
      if (mask.allowed[i] || parent[i] >= 0) continue;
      parent[i] = mask.index(c.x, c.y);
      frontier.push({x, y});
    }
  }

  if (boundary_hit >= 0) {
    verdict.kind = TopologyVerdict::Kind::NoQuantization;
    verdict.reason = TopologyVerdict::Reason::HoleOpenToBoundary;
    int i = boundary_hit;
    while (true) {
      verdict.witness.push_back({i % mask.nx, i / mask.nx});
      if (parent[i] == i) break;
      i = parent[i];
    }
    std::reverse(verdict.witness.begin(), verdict.witness.end());
  } else {
    verdict.kind = TopologyVerdict::Kind::QuantizationApplies;
    verdict.reason = TopologyVerdict::Reason::EnclosedHole;
    verdict.witness = std::move(component);
  }
  return verdict;
}

DomainMask annulus_mask(int nx, int ny, double r_inner, double r_outer) {
  if (nx < 4 || ny < 4 || !(0.0 < r_inner) || !(r_inner < r_outer))
    throw InvalidInputError("annulus_mask: bad geometry");
  DomainMask m;
  m.nx = nx;
  m.ny = ny;
  m.allowed.assign(static_cast<std::size_t>(nx) * ny, 0);
  const double cx = 0.5 * (nx - 1);
  const double cy = 0.5 * (ny - 1);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const double r = std::hypot(x - cx, y - cy);
      if (r >= r_inner && r <= r_outer) m.allowed[m.index(x, y)] = 1;
    }
  }
  m.flux_cell = {static_cast<int>(cx), static_cast<int>(cy)};
  return m;
}

DomainMask open_plane_mask(int nx, int ny) {
  if (nx < 4 || ny < 4) throw InvalidInputError("open_plane_mask: too small");
  DomainMask m;
  m.nx = nx;
  m.ny = ny;
  m.allowed.assign(static_cast<std::size_t>(nx) * ny, 1);
  m.flux_cell = {nx / 2, ny / 2};
  return m;
}

}  // namespace fluxlab
