#ifndef FLUXLAB_IO_HPP
#define FLUXLAB_IO_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fluxlab/experiments.hpp"
#include "fluxlab/lattice.hpp"
#include "fluxlab/ring.hpp"

namespace fluxlab::io {

// Shortest round-trip decimal form, '.' separator, locale independent.
// All CSV output goes through this so identical runs are byte-identical.
std::string format_double(double v);

void write_pattern_csv(const std::string& path, const ScreenPattern& pattern);
void write_fringe_csv(const std::string& path,
                      std::span<const FringeReport> reports);
void write_staircase_csv(const std::string& path,
                         std::span<const StaircasePoint> points);
void write_spectrum_csv(const std::string& path, const RingSpectrum& spectrum);

// Grid snapshot of |psi|^2 as a 16-bit PGM, row ny-1 at the top.
void write_wave_pgm(const std::string& path, const LatticeGrid& grid,
                    const WaveState& state);
// Full state dump: x,y,re,im per site.
void write_wave_csv(const std::string& path, const LatticeGrid& grid,
                    const WaveState& state);

// 8-bit PGM: 0 = forbidden, 255 = allowed, witness cells at 128.
void write_mask_pgm(const std::string& path, const DomainMask& mask,
                    std::span<const Cell> witness = {});
// Reads P5/P2 PGM; cells at or above half of maxval are allowed.
// flux_cell is left default; callers set it from their config.
DomainMask read_mask_pgm(const std::string& path);

void write_manifest(const std::string& path, const std::string& tool_version,
                    const std::string& command_line,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    double wall_seconds);

}  // namespace fluxlab::io

#endif
