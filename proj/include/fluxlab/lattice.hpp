#ifndef FLUXLAB_LATTICE_HPP
#define FLUXLAB_LATTICE_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fluxlab/errors.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"

namespace fluxlab {

using Complex = std::complex<double>;

// 2-D square lattice for the minimal-coupling Schrodinger equation,
// discretized with Peierls link phases:
//   (H psi)_i = sum_nn -t U_ij psi_j + (4t + V_i) psi_i,  t = 1/(2 m dx^2).
// link_x(x,y) is the phase on the directed link (x,y) -> (x+1,y) and enters
// the pair as H[(x,y), (x+1,y)] = -t * link_x; the reverse element is the
// conjugate. link_y likewise for (x,y) -> (x,y+1). Masked sites are hard
// walls: they produce and receive nothing and keep amplitude zero. An
// optional absorbing sponge adds -i*sponge_i on the diagonal.
//
// Grids are treated as immutable once built; operations that change them
// (flux strings, sponges) return a modified copy.
struct LatticeGrid {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double mass = 1.0;
  std::vector<std::uint8_t> allowed;  // 1 = wavefunction may live here
  std::vector<double> potential;      // on-site V (static, real)
  std::vector<double> sponge;         // absorbing rate, >= 0
  std::vector<Complex> link_x;        // size nx*ny, column nx-1 unused
  std::vector<Complex> link_y;        // size nx*ny, row ny-1 unused

  int site(int x, int y) const { return y * nx + x; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < nx && y >= 0 && y < ny;
  }
  bool is_allowed(int x, int y) const { return allowed[site(x, y)] != 0; }
  double hopping() const { return 1.0 / (2.0 * mass * dx * dx); }
  int undirected_link_count() const;

  LatticeGrid with_sponge(std::function<double(int, int)> rate) const;

  // Rebuilds the fused hop/diagonal arrays the propagator uses. Called by
  // the builders; call it again after directly editing fields in tests.
  void refresh();

  // fused arrays: hop = -t * U for live links else 0; diag = 4t + V - i*sponge
  std::vector<Complex> hop_x_;
  std::vector<Complex> hop_y_;
  std::vector<Complex> diag_;
};

LatticeGrid build_grid(int nx, int ny, double dx, double mass,
                       const std::function<bool(int, int)>& mask = {},
                       const std::function<double(int, int)>& potential = {});

// Explicit-vector overload; sizes must be nx*ny.
LatticeGrid build_grid(int nx, int ny, double dx, double mass,
                       std::vector<std::uint8_t> mask,
                       std::vector<double> potential);

// Plaquette (px, py) spans sites {px, px+1} x {py, py+1}.
struct PlaquetteIndex {
  int x = 0;
  int y = 0;
};

enum class CutStep : std::uint8_t { Down, Up, Left, Right };

// Dual-lattice path from the flux plaquette out of the grid. Each step
// crosses one primal link, which picks up the cut phase. Any cut with the
// same flux_cell is gauge-equivalent.
struct FluxString {
  PlaquetteIndex flux_cell;
  std::vector<CutStep> cut;

  static FluxString straight_down(PlaquetteIndex cell);
  static FluxString straight_up(PlaquetteIndex cell, int ny);
};

// Multiplies the links crossed by the cut with exp(+/- i 2 pi q nu) so the
// plaquette product is exp(i 2 pi q nu) at flux_cell and exactly 1 elsewhere.
// q*nu is reduced mod 1 first, so nu and nu + 1/q give identical link phases.
LatticeGrid apply_flux_string(const LatticeGrid& grid, const FluxString& string,
                              FluxFraction nu, ChargeMultiple q);

// Counterclockwise product of the four link phases around plaquette (px, py).
Complex plaquette_phase(const LatticeGrid& grid, int px, int py);

struct WaveState {
  std::vector<Complex> amp;  // nx*ny site amplitudes
  double time = 0.0;
};

// Sum |amp|^2 dx^2.
double norm_squared(const LatticeGrid& grid, const WaveState& state);

// H applied to a state vector. Hermitian whenever the sponge is zero.
WaveState hamiltonian_apply(const LatticeGrid& grid, const WaveState& state);

namespace detail {
// conj_sponge flips the sign of the absorbing term (the adjoint of H).
void apply_hamiltonian(const LatticeGrid& grid, std::span<const Complex> in,
                       std::span<Complex> out, bool conj_sponge = false);
}  // namespace detail

// Normalized Gaussian packet exp(-|r-c|^2 / (4 w^2)) * exp(i k.r), masked
// sites zeroed. Rejects packets whose probability on masked sites exceeds
// 1e-6 before zeroing.
WaveState gaussian_packet(const LatticeGrid& grid, Vec2 center, double width,
                          Vec2 momentum);

struct SolverOptions {
  // The step contract requires residual < 1e-10; the default is tighter so
  // gauge-equivalent runs stay comparable pointwise to 1e-9 over thousands
  // of steps.
  double tolerance = 1e-13;
  int max_iterations = 500;
};

// One Crank-Nicolson (Cayley) step: (1 + i dt/2 H) psi' = (1 - i dt/2 H) psi,
// solved by conjugate gradient on the normal equations. Norm-preserving up to
// the solver tolerance when the sponge is zero. Reusable across steps; the
// grid must outlive the stepper.
class CrankNicolsonStepper {
 public:
  CrankNicolsonStepper(const LatticeGrid& grid, double dt,
                       SolverOptions options = {});

  void step(WaveState& state);
  int last_iterations() const { return last_iterations_; }

 private:
  void apply_cayley(std::span<const Complex> in, std::span<Complex> out,
                    bool adjoint) const;

  const LatticeGrid* grid_;
  double dt_;
  SolverOptions options_;
  int last_iterations_ = 0;
  mutable std::vector<Complex> h_;  // scratch for H * v
  std::vector<Complex> b_, r_, z_, p_, w_;
};

WaveState crank_nicolson_step(const LatticeGrid& grid, const WaveState& state,
                              double dt, SolverOptions options = {});

// Probability current in +x direction across the links (col, y) -> (col+1, y),
// one entry per row, in the measure where norm_squared is the total
// probability (multiply by dt and sum over steps to integrate).
std::vector<double> transverse_current(const LatticeGrid& grid,
                                       std::span<const Complex> psi, int col);

}  // namespace fluxlab

#endif
