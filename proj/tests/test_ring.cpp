#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <set>

#include "fluxlab/experiments.hpp"
#include "fluxlab/ring.hpp"

using namespace fluxlab;
using std::numbers::pi;

namespace {

// Brute-force argmin over a wide window of n, replicating only the statement
// "nearest allowed value, ties to even n" and nothing of the implementation.
long long argmin_oracle(double nu, int q) {
  long long best_n = 0;
  double best_d = std::abs(nu - 0.0);
  for (long long n = -64; n <= 64; ++n) {
    const double d = std::abs(nu - static_cast<double>(n) / q);
    const bool closer = d < best_d;
    const bool tie_even = d == best_d && n % 2 == 0 && best_n % 2 != 0;
    if (closer || tie_even) {
      best_d = d;
      best_n = n;
    }
  }
  return best_n;
}

// Independent connectivity oracle: BFS over forbidden cells from *every*
// boundary cell, then ask whether the flux cell was reached.
bool hole_reaches_boundary_oracle(const DomainMask& m) {
  std::vector<std::uint8_t> seen(m.allowed.size(), 0);
  std::queue<Cell> frontier;
  auto push = [&](int x, int y) {
    const int i = m.index(x, y);
    if (!m.allowed[i] && !seen[i]) {
      seen[i] = 1;
      frontier.push({x, y});
    }
  };
  for (int x = 0; x < m.nx; ++x) {
    push(x, 0);
    push(x, m.ny - 1);
  }
  for (int y = 0; y < m.ny; ++y) {
    push(0, y);
    push(m.nx - 1, y);
  }
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop();
    if (c.x > 0) push(c.x - 1, c.y);
    if (c.x + 1 < m.nx) push(c.x + 1, c.y);
    if (c.y > 0) push(c.x, c.y - 1);
    if (c.y + 1 < m.ny) push(c.x, c.y + 1);
  }
  return seen[m.index(m.flux_cell.x, m.flux_cell.y)] != 0;
}

DomainMask random_mask(std::mt19937& rng, int nx, int ny) {
  DomainMask m;
  m.nx = nx;
  m.ny = ny;
  m.allowed.assign(static_cast<std::size_t>(nx) * ny, 1);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_int_distribution<int> px(0, nx - 1);
  std::uniform_int_distribution<int> py(0, ny - 1);
  std::uniform_int_distribution<int> extent(1, nx / 3);
  const int blobs = count(rng);
  for (int b = 0; b < blobs; ++b) {
    const int cx = px(rng);
    const int cy = py(rng);
    const int r = extent(rng);
    const bool disc = rng() % 2 == 0;
    for (int y = std::max(0, cy - r); y <= std::min(ny - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(nx - 1, cx + r); ++x) {
        if (!disc || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
          m.allowed[m.index(x, y)] = 0;
      }
    }
  }
  // ensure at least one allowed cell
  m.allowed[m.index(px(rng), py(rng))] = 1;
  m.flux_cell = {px(rng), py(rng)};
  return m;
}

}  // namespace

TEST_CASE("allowed flux values are n / q") {
  CHECK(allowed_flux(0, ChargeMultiple(2)).nu == 0.0);
  CHECK(allowed_flux(1, ChargeMultiple(2)).nu == 0.5);
  CHECK(allowed_flux(3, ChargeMultiple(2)).nu == 1.5);
  CHECK(allowed_flux(-5, ChargeMultiple(2)).nu == -2.5);
  CHECK(allowed_flux(7, ChargeMultiple(1)).nu == 7.0);
  const QuantizationRule rule((ChargeMultiple(2)));
  for (long long n = -8; n <= 8; ++n)
    CHECK(rule.allowed(n).nu == static_cast<double>(n) / 2.0);
}

TEST_CASE("quantize_flux picks the nearest allowed value") {
  const auto r = quantize_flux(FluxFraction(0.6), ChargeMultiple(2));
  CHECK(r.n == 1);
  CHECK(r.trapped.nu == 0.5);

  const auto zero = quantize_flux(FluxFraction(0.0), ChargeMultiple(3));
  CHECK(zero.n == 0);
  CHECK(zero.trapped.nu == 0.0);
}

TEST_CASE("quantize_flux exact ties break toward even n") {
  // 0.25 at q = 2 sits exactly between n = 0 and n = 1
  CHECK(quantize_flux(FluxFraction(0.25), ChargeMultiple(2)).n == 0);
  CHECK(quantize_flux(FluxFraction(0.75), ChargeMultiple(2)).n == 2);
  CHECK(quantize_flux(FluxFraction(-0.25), ChargeMultiple(2)).n == 0);
  CHECK(quantize_flux(FluxFraction(0.5), ChargeMultiple(1)).n == 0);
  CHECK(quantize_flux(FluxFraction(1.5), ChargeMultiple(1)).n == 2);
  CHECK(quantize_flux(FluxFraction(-1.5), ChargeMultiple(1)).n == -2);
}

TEST_CASE("quantize_flux agrees with the brute-force argmin oracle") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (const int q : {1, 2, 3}) {
    for (int i = 0; i < 2000; ++i) {
      const double nu = u(rng);
      const auto got = quantize_flux(FluxFraction(nu), ChargeMultiple(q));
      CHECK(got.n == argmin_oracle(nu, q));
      CHECK(std::abs(nu - got.trapped.nu) <= 0.5 / q + 1e-12);
    }
  }
}

TEST_CASE("staircase: plateaus at n/q, jumps at half-spacing, monotone") {
  std::vector<double> sweep;
  for (double v = 0.0; v <= 1.0 + 1e-12; v += 0.01) sweep.push_back(v);
  const auto stairs = staircase(sweep, ChargeMultiple(2));
  REQUIRE(stairs.size() == sweep.size());

  std::set<double> plateaus;
  for (std::size_t i = 0; i < stairs.size(); ++i) {
    plateaus.insert(stairs[i].nu_trapped);
    if (i > 0) {
      CHECK(stairs[i].nu_trapped >= stairs[i - 1].nu_trapped);
      if (stairs[i].nu_trapped != stairs[i - 1].nu_trapped) {
        // jump within one sweep step of 0.25 or 0.75
        const double at = 0.5 * (stairs[i].nu_external + stairs[i - 1].nu_external);
        const bool near_quarter =
            std::abs(at - 0.25) <= 0.01 || std::abs(at - 0.75) <= 0.01;
        CHECK(near_quarter);
      }
    }
  }
  CHECK(plateaus == std::set<double>{0.0, 0.5, 1.0});

  // hypothetical electron condensate: plateau spacing doubles
  const auto electron = staircase(sweep, ChargeMultiple(1));
  std::set<double> electron_plateaus;
  for (const auto& p : electron) electron_plateaus.insert(p.nu_trapped);
  CHECK(electron_plateaus == std::set<double>{0.0, 1.0});

  // constant sweep at an allowed value is the identity
  const std::vector<double> flat(5, 1.5);
  for (const auto& p : staircase(flat, ChargeMultiple(2)))
    CHECK(p.nu_trapped == 1.5);

  CHECK_THROWS_AS(staircase(std::vector<double>{}, ChargeMultiple(2)),
                  InvalidInputError);
}

TEST_CASE("ring spectrum: levels, degeneracy, and ground index") {
  const auto flat = ring_spectrum(-4, 4, ChargeMultiple(1), FluxFraction(0.0));
  CHECK(flat.ground().n == 0);
  CHECK(flat.ground().energy == 0.0);
  for (const auto& level : flat.levels)
    CHECK(level.energy == 0.5 * level.n * level.n);
  // +/- n degenerate at nu = 0
  CHECK(flat.levels[1].energy == flat.levels[2].energy);

  CHECK_THROWS_AS(ring_spectrum(3, 2, ChargeMultiple(1), FluxFraction(0.0)),
                  InvalidInputError);
}

TEST_CASE("spectrum at nu + 1/q equals spectrum at nu with n shifted") {
  // exact set equality at the dyadic point q = 2, nu = 1/2
  const auto a = ring_spectrum(-6, 6, ChargeMultiple(2), FluxFraction(0.0));
  const auto b = ring_spectrum(-5, 7, ChargeMultiple(2), FluxFraction(0.5));
  REQUIRE(a.levels.size() == b.levels.size());
  std::multiset<double> ea, eb;
  for (const auto& l : a.levels) ea.insert(l.energy);
  for (const auto& l : b.levels) eb.insert(l.energy);
  CHECK(ea == eb);

  // generic nu: same property within roundoff
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double nu = u(rng);
    for (const int q : {1, 2}) {
      const auto s0 = ring_spectrum(-8, 8, ChargeMultiple(q), FluxFraction(nu));
      const auto s1 =
          ring_spectrum(-7, 9, ChargeMultiple(q), FluxFraction(nu + 1.0 / q));
      std::vector<double> e0, e1;
      for (const auto& l : s0.levels) e0.push_back(l.energy);
      for (const auto& l : s1.levels) e1.push_back(l.energy);
      std::sort(e0.begin(), e0.end());
      std::sort(e1.begin(), e1.end());
      for (std::size_t i = 0; i < e0.size(); ++i)
        CHECK(std::abs(e0[i] - e1[i]) < 1e-12);
    }
  }
}

TEST_CASE("ground level index tracks quantize_flux over a dense nu scan") {
  for (const int q : {1, 2}) {
    for (int i = -400; i <= 400; ++i) {
      const double nu = i * 0.005;
      const auto spectrum =
          ring_spectrum(-16, 16, ChargeMultiple(q), FluxFraction(nu));
      const auto trapped = quantize_flux(FluxFraction(nu), ChargeMultiple(q));
      CHECK(spectrum.ground().n == trapped.n);
    }
  }
}

TEST_CASE("ground energy is periodic with period 1/q, minima at allowed flux") {
  const ChargeMultiple q(2);
  for (int i = 0; i <= 100; ++i) {
    const double nu = -1.0 + 0.03 * i;
    const double e0 =
        ring_spectrum(-16, 16, q, FluxFraction(nu)).ground().energy;
    const double e1 =
        ring_spectrum(-16, 16, q, FluxFraction(nu + 0.5)).ground().energy;
    CHECK(std::abs(e0 - e1) < 1e-12);
  }
  for (long long n = -2; n <= 2; ++n) {
    const double at_allowed =
        ring_spectrum(-16, 16, q, allowed_flux(n, q)).ground().energy;
    CHECK(at_allowed == 0.0);
  }
}

TEST_CASE("canonical masks: annulus, open plane, boundary-touching slab") {
  const DomainMask annulus = annulus_mask(64, 64, 10.0, 24.0);
  const auto ring_verdict = topology_check(annulus);
  CHECK(ring_verdict.kind == TopologyVerdict::Kind::QuantizationApplies);
  CHECK(ring_verdict.reason == TopologyVerdict::Reason::EnclosedHole);
  // witness is exactly the set of forbidden cells in the hole
  for (const Cell& c : ring_verdict.witness) {
    CHECK_FALSE(annulus.is_allowed(c.x, c.y));
    const double r = std::hypot(c.x - 31.5, c.y - 31.5);
    CHECK(r < 10.0);
  }

  const auto plane_verdict = topology_check(open_plane_mask(64, 64));
  CHECK(plane_verdict.kind == TopologyVerdict::Kind::NoQuantization);
  CHECK(plane_verdict.reason == TopologyVerdict::Reason::FluxRegionAllowed);

  // C-shaped conductor: forbidden slab from the flux cell to the boundary
  DomainMask slab = open_plane_mask(64, 64);
  for (int y = 28; y <= 36; ++y)
    for (int x = 0; x <= 40; ++x) slab.allowed[slab.index(x, y)] = 0;
  slab.flux_cell = {32, 32};
  const auto slab_verdict = topology_check(slab);
  CHECK(slab_verdict.kind == TopologyVerdict::Kind::NoQuantization);
  CHECK(slab_verdict.reason == TopologyVerdict::Reason::HoleOpenToBoundary);
  // witness is a forbidden path from the flux cell to the boundary
  REQUIRE_FALSE(slab_verdict.witness.empty());
  CHECK(slab_verdict.witness.front() == Cell{32, 32});
  const Cell exit = slab_verdict.witness.back();
  CHECK((exit.x == 0 || exit.x == 63 || exit.y == 0 || exit.y == 63));
  for (const Cell& c : slab_verdict.witness)
    CHECK_FALSE(slab.is_allowed(c.x, c.y));
}

TEST_CASE("topology_check matches the boundary-BFS oracle on random masks") {
  std::mt19937 rng(97);
  for (int trial = 0; trial < 100; ++trial) {
    const DomainMask m = random_mask(rng, 32, 32);
    const auto verdict = topology_check(m);
    if (m.is_allowed(m.flux_cell.x, m.flux_cell.y)) {
      CHECK(verdict.kind == TopologyVerdict::Kind::NoQuantization);
      continue;
    }
    const bool open = hole_reaches_boundary_oracle(m);
    CHECK((verdict.kind == TopologyVerdict::Kind::NoQuantization) == open);
    // recomputation is reproducible
    const auto again = topology_check(m);
    CHECK(again.kind == verdict.kind);
    CHECK(again.witness.size() == verdict.witness.size());
  }
}

TEST_CASE("topology_check rejects malformed input") {
  DomainMask m = open_plane_mask(8, 8);
  m.flux_cell = {8, 3};
  CHECK_THROWS_AS(topology_check(m), InvalidInputError);
  DomainMask empty = open_plane_mask(8, 8);
  std::fill(empty.allowed.begin(), empty.allowed.end(), 0);
  CHECK_THROWS_AS(topology_check(empty), InvalidInputError);
}

TEST_CASE("superconductor values fed to the electron interferometer") {
  // allowed_flux(n, 2) seen by charge 1 predicts a shift only for odd n
  for (long long n = 0; n <= 6; ++n) {
    const PhaseValue shift =
        predicted_shift(allowed_flux(n, ChargeMultiple(2)), ChargeMultiple(1));
    const double expected = (n % 2 == 0) ? 0.0 : pi;
    CHECK(shift.reduced() == doctest::Approx(expected).epsilon(1e-12));
  }
}
