#include "fluxlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fluxlab/errors.hpp"

namespace fluxlab::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw InvalidInputError("error while writing: " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_pattern_csv(const std::string& path, const ScreenPattern& pattern) {
  auto out = open_out(path);
  out << "y,intensity\n";
  for (std::size_t i = 0; i < pattern.y.size(); ++i)
    out << format_double(pattern.y[i]) << ','
        << format_double(pattern.intensity[i]) << '\n';
  finish(out, path);
}

void write_fringe_csv(const std::string& path,
                      std::span<const FringeReport> reports) {
  auto out = open_out(path);
  out << "nu,q,delta_phi_measured,delta_phi_predicted,visibility\n";
  for (const FringeReport& r : reports)
    out << format_double(r.nu) << ',' << r.q << ','
        << format_double(r.delta_phi.reduced()) << ','
        << format_double(r.predicted.reduced()) << ','
        << format_double(r.visibility) << '\n';
  finish(out, path);
}

void write_staircase_csv(const std::string& path,
                         std::span<const StaircasePoint> points) {
  auto out = open_out(path);
  out << "nu_external,n,nu_trapped\n";
  for (const StaircasePoint& p : points)
    out << format_double(p.nu_external) << ',' << p.n << ','
        << format_double(p.nu_trapped) << '\n';
  finish(out, path);
}

void write_spectrum_csv(const std::string& path, const RingSpectrum& spectrum) {
  auto out = open_out(path);
  out << "n,energy\n";
  for (const RingSpectrum::Level& l : spectrum.levels)
    out << l.n << ',' << format_double(l.energy) << '\n';
  finish(out, path);
}

void write_wave_pgm(const std::string& path, const LatticeGrid& grid,
                    const WaveState& state) {
  double peak = 0.0;
  for (const Complex& a : state.amp) peak = std::max(peak, std::norm(a));
  const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;

  auto out = open_out(path);
  out << "P5\n" << grid.nx << ' ' << grid.ny << "\n65535\n";
  for (int y = grid.ny - 1; y >= 0; --y) {
    for (int x = 0; x < grid.nx; ++x) {
      const double p = std::norm(state.amp[grid.site(x, y)]) * scale;
      const auto v = static_cast<std::uint16_t>(std::lround(std::min(p, 65535.0)));
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  }
  finish(out, path);
}

void write_wave_csv(const std::string& path, const LatticeGrid& grid,
                    const WaveState& state) {
  auto out = open_out(path);
  out << "x,y,re,im\n";
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      const Complex a = state.amp[grid.site(x, y)];
      out << format_double(x * grid.dx) << ',' << format_double(y * grid.dx)
          << ',' << format_double(a.real()) << ',' << format_double(a.imag())
          << '\n';
    }
  }
  finish(out, path);
}

void write_mask_pgm(const std::string& path, const DomainMask& mask,
                    std::span<const Cell> witness) {
  std::vector<std::uint8_t> img(mask.allowed.size());
  for (std::size_t i = 0; i < mask.allowed.size(); ++i)
    img[i] = mask.allowed[i] ? 255 : 0;
  for (const Cell& c : witness) img[mask.index(c.x, c.y)] = 128;

  auto out = open_out(path);
  out << "P5\n" << mask.nx << ' ' << mask.ny << "\n255\n";
  for (int y = mask.ny - 1; y >= 0; --y)
    for (int x = 0; x < mask.nx; ++x)
      out.put(static_cast<char>(img[mask.index(x, y)]));
  finish(out, path);
}

DomainMask read_mask_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open mask file: " + path);

  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw InvalidInputError("truncated PGM header: " + path);
  };

  const std::string magic = next_token();
  if (magic != "P5" && magic != "P2")
    throw InvalidInputError("mask file is not a P2/P5 PGM: " + path);
  const int nx = std::stoi(next_token());
  const int ny = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (nx <= 0 || ny <= 0 || maxval <= 0 || maxval > 65535)
    throw InvalidInputError("bad PGM dimensions in " + path);

  DomainMask mask;
  mask.nx = nx;
  mask.ny = ny;
  mask.allowed.assign(static_cast<std::size_t>(nx) * ny, 0);
  const int threshold = (maxval + 1) / 2;
  const int bytes = maxval > 255 ? 2 : 1;

  auto read_value = [&]() -> int {
    if (magic == "P2") {
      int v;
      if (!(in >> v)) throw InvalidInputError("truncated P2 data: " + path);
      return v;
    }
    int v = in.get();
    if (bytes == 2) v = (v << 8) | in.get();
    if (!in) throw InvalidInputError("truncated P5 data: " + path);
    return v;
  };

  if (magic == "P5") in.get();  // single whitespace after maxval
  for (int row = 0; row < ny; ++row) {
    const int y = ny - 1 - row;  // row 0 is the top of the image
    for (int x = 0; x < nx; ++x)
      mask.allowed[mask.index(x, y)] = read_value() >= threshold ? 1 : 0;
  }
  return mask;
}

void write_manifest(const std::string& path, const std::string& tool_version,
                    const std::string& command_line,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    double wall_seconds) {
  auto out = open_out(path);
  out << "tool = " << tool_version << '\n';
  out << "command = " << command_line << '\n';
  out << "wall_seconds = " << format_double(wall_seconds) << '\n';
  for (const auto& [key, value] : config) out << key << " = " << value << '\n';
  finish(out, path);
}

}  // namespace fluxlab::io
