#ifndef FLUXLAB_EXPERIMENTS_HPP
#define FLUXLAB_EXPERIMENTS_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fluxlab/gauge.hpp"
#include "fluxlab/lattice.hpp"

namespace fluxlab {

// Two-slit interferometer with a flux tube in the barrier between the slits.
// Distances are in units of dx; the transverse axis of symmetry sits at
// y = (ny-1)/2. Geometry defaults give visibility above 0.4 on the default
// grid; everything is overridable from configs.
struct TwoSlitConfig {
  int nx = 384;
  int ny = 192;
  double dx = 1.0;
  double mass = 1.0;

  int barrier_col = 160;   // single masked column with two openings
  int screen_col = 256;    // current is integrated through this column
  int slit_separation = 24;  // center-to-center, sites
  int slit_width = 6;        // sites

  int flux_col = 160;  // flux plaquette, must sit in the barrier wall
  int flux_row = 95;   // strictly between the slit openings

  double packet_x = 96.0;
  double packet_y = 95.5;  // defaults to the symmetry axis
  double packet_width = 10.0;
  double momentum = 0.62831853071795865;  // 0.8 * (pi/4) per dx, toward barrier

  int steps = 2200;
  double dt = 0.25;  // 0.25 * mass * dx^2

  int sponge_width = 12;       // absorber behind the screen; 0 disables
  double sponge_strength = 0.5;  // peak rate in units of the hopping t

  enum class ClosedSlit { None, Lower, Upper };
  ClosedSlit closed_slit = ClosedSlit::None;

  enum class Cut { Down, Up };
  Cut cut = Cut::Down;  // which way the flux string leaves the grid

  ChargeMultiple q{1};
  FluxFraction nu{0.0};

  double warn_crossing_fraction = 0.5;

  // Inclusive row ranges of the two openings.
  std::pair<int, int> lower_slit_rows() const;
  std::pair<int, int> upper_slit_rows() const;
  double axis_row() const { return 0.5 * (ny - 1); }

  // Checks the geometric invariants, including that the region behind the
  // barrier is reachable only through the slits. Throws InvalidInputError.
  void validate() const;

  // Hash of everything but nu; patterns are comparable iff these agree.
  std::uint64_t geometry_hash() const;

  LatticeGrid make_grid() const;
  FluxString make_flux_string() const;
};

// Time-integrated probability that crossed the screen column, per interior
// row. `y` holds the physical transverse coordinates.
struct ScreenPattern {
  std::vector<double> y;
  std::vector<double> intensity;
  double nu = 0.0;
  int q = 1;
  std::uint64_t geometry_hash = 0;
  double crossed_fraction = 0.0;
};

struct FringeReport {
  PhaseValue delta_phi;  // measured shift of the fringe phase
  PhaseValue predicted;  // 2 pi q (nu - nu_baseline), reduced
  double visibility = 0.0;
  double nu = 0.0;
  int q = 1;
};

// |psi1 * exp(i 2 pi q nu) + psi2|^2: the two-slit superposition with the
// enclosed-flux phase on the branch through slit 1. The common phase factor
// on both branches cancels in the modulus and is dropped.
double two_path_superposition(std::complex<double> psi1,
                              std::complex<double> psi2, FluxFraction nu,
                              ChargeMultiple q);

// The analytic fringe shift 2 pi q nu, reduced mod 2 pi.
PhaseValue predicted_shift(FluxFraction nu, ChargeMultiple q);

// Full lattice run: build grid + flux string, launch the packet, integrate
// the probability current through the screen column over all steps.
// `final_state`, when given, receives the wavefunction after the last step.
ScreenPattern run_two_slit(const TwoSlitConfig& config,
                           WaveState* final_state = nullptr);

// Fringe phase shift of `pattern` relative to `baseline`, from the Fourier
// phase at the baseline's dominant fringe frequency over the central 60%
// window. Raises NoFringesError when the baseline visibility is below 0.05.
FringeReport extract_fringe_shift(const ScreenPattern& pattern,
                                  const ScreenPattern& baseline);

// One run per nu, each measured against a freshly run nu = 0 baseline.
// Runs execute concurrently; reports come back in input order. When
// csv_path is nonempty the reports are also written as CSV.
std::vector<FringeReport> flux_sweep(const TwoSlitConfig& config,
                                     std::span<const double> nu_values,
                                     const std::string& csv_path = {});

}  // namespace fluxlab

#endif
