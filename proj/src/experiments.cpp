#include "fluxlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <numeric>
#include <queue>
#include <sstream>

#include "fluxlab/io.hpp"

namespace fluxlab {

namespace {

std::pair<int, int> slit_rows(double center, int width) {
  const double half = 0.5 * (width - 1);
  return {static_cast<int>(std::ceil(center - half - 1e-9)),
          static_cast<int>(std::floor(center + half + 1e-9))};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::pair<int, int> TwoSlitConfig::lower_slit_rows() const {
  return slit_rows(axis_row() - 0.5 * slit_separation, slit_width);
}

std::pair<int, int> TwoSlitConfig::upper_slit_rows() const {
  return slit_rows(axis_row() + 0.5 * slit_separation, slit_width);
}

void TwoSlitConfig::validate() const {
  if (nx < 32 || ny < 32)
    throw InvalidInputError("two-slit: grid must be at least 32x32");
  if (!(dx > 0.0) || !(mass > 0.0))
    throw InvalidInputError("two-slit: dx and mass must be positive");
  if (steps < 1 || !(dt > 0.0))
    throw InvalidInputError("two-slit: need steps >= 1 and dt > 0");
  if (slit_width < 1 || slit_separation < slit_width + 2)
    throw InvalidInputError("two-slit: slits must be separated by a wall");
  if (sponge_width < 0 || sponge_strength < 0.0)
    throw InvalidInputError("two-slit: sponge parameters must be nonnegative");

  const int sponge_start = sponge_width > 0 ? nx - 1 - sponge_width : nx - 1;
  if (barrier_col < 2 || screen_col <= barrier_col || screen_col + 1 >= sponge_start)
    throw InvalidInputError(
        "two-slit: need 2 <= barrier < screen, screen ahead of the sponge");

  const auto [lo0, lo1] = lower_slit_rows();
  const auto [hi0, hi1] = upper_slit_rows();
  if (lo0 < 2 || hi1 > ny - 3 || lo1 + 1 >= hi0)
    throw InvalidInputError("two-slit: slit openings do not fit in the wall");

  if (flux_col != barrier_col - 1 && flux_col != barrier_col)
    throw InvalidInputError("two-slit: flux plaquette must sit in the barrier");
  if (flux_row <= lo1 || flux_row + 1 >= hi0)
    throw InvalidInputError(
        "two-slit: flux plaquette must lie strictly between the slits");

  // The half-plane behind the barrier must be reachable only through the
  // slits: reachable through the real mask, unreachable once the barrier
  // column (openings included) is sealed.
  const LatticeGrid probe = make_grid();
  const int seed = probe.site(1, 1);
  if (!probe.allowed[seed])
    throw InvalidInputError("two-slit: packet region is masked");

  auto flood = [&](bool seal_barrier) {
    std::vector<std::uint8_t> seen(probe.allowed.size(), 0);
    std::queue<int> frontier;
    seen[seed] = 1;
    frontier.push(seed);
    bool reached_screen = false;
    bool reached_back = false;
    while (!frontier.empty()) {
      const int i = frontier.front();
      frontier.pop();
      const int x = i % nx;
      if (x > barrier_col) reached_back = true;
      if (x == screen_col) reached_screen = true;
      const int nbr[4] = {i + 1, i - 1, i + nx, i - nx};
      const int nbx[4] = {x + 1, x - 1, x, x};
      for (int d = 0; d < 4; ++d) {
        const int j = nbr[d];
        if (nbx[d] < 0 || nbx[d] >= nx || j < 0 ||
            j >= static_cast<int>(seen.size()))
          continue;
        if (seen[j] || !probe.allowed[j]) continue;
        if (seal_barrier && nbx[d] == barrier_col) continue;
        seen[j] = 1;
        frontier.push(j);
      }
    }
    return std::pair{reached_screen, reached_back};
  };

  if (closed_slit == ClosedSlit::None && !flood(false).first)
    throw InvalidInputError("two-slit: screen is not reachable from the source");
  if (flood(true).second)
    throw InvalidInputError(
        "two-slit: region behind the barrier is reachable around the slits");
}

std::uint64_t TwoSlitConfig::geometry_hash() const {
  std::ostringstream s;
  s << nx << ';' << ny << ';' << dx << ';' << mass << ';' << barrier_col << ';'
    << screen_col << ';' << slit_separation << ';' << slit_width << ';'
    << flux_col << ';' << flux_row << ';' << packet_x << ';' << packet_y << ';'
    << packet_width << ';' << momentum << ';' << steps << ';' << dt << ';'
    << sponge_width << ';' << sponge_strength << ';'
    << static_cast<int>(closed_slit) << ';' << q.q;
  return fnv1a(s.str());
}

LatticeGrid TwoSlitConfig::make_grid() const {
  const auto [lo0, lo1] = lower_slit_rows();
  const auto [hi0, hi1] = upper_slit_rows();
  const bool lower_open = closed_slit != ClosedSlit::Lower;
  const bool upper_open = closed_slit != ClosedSlit::Upper;

  auto mask = [&, lo0 = lo0, lo1 = lo1, hi0 = hi0, hi1 = hi1](int x, int y) {
    if (x == 0 || y == 0 || x == nx - 1 || y == ny - 1) return false;
    if (x != barrier_col) return true;
    if (lower_open && y >= lo0 && y <= lo1) return true;
    if (upper_open && y >= hi0 && y <= hi1) return true;
    return false;
  };

  LatticeGrid grid = build_grid(nx, ny, dx, mass, mask, {});
  if (sponge_width > 0) {
    const int sponge_start = nx - 1 - sponge_width;
    const double peak = sponge_strength * grid.hopping();
    grid = grid.with_sponge([&](int x, int) {
      if (x < sponge_start) return 0.0;
      const double u = static_cast<double>(x - sponge_start + 1) / sponge_width;
      return peak * u * u;
    });
  }
  return grid;
}

FluxString TwoSlitConfig::make_flux_string() const {
  const PlaquetteIndex cell{flux_col, flux_row};
  return cut == Cut::Down ? FluxString::straight_down(cell)
                          : FluxString::straight_up(cell, ny);
}

double two_path_superposition(std::complex<double> psi1,
                              std::complex<double> psi2, FluxFraction nu,
                              ChargeMultiple q) {
  const std::complex<double> phase = std::polar(1.0, kTwoPi * q.q * nu.nu);
  return std::norm(psi1 * phase + psi2);
}

PhaseValue predicted_shift(FluxFraction nu, ChargeMultiple q) {
  return PhaseValue(PhaseValue::reduce(kTwoPi * q.q * nu.nu));
}

ScreenPattern run_two_slit(const TwoSlitConfig& config, WaveState* final_state) {
  config.validate();
  LatticeGrid grid = config.make_grid();
  grid = apply_flux_string(grid, config.make_flux_string(), config.nu, config.q);

  WaveState psi = gaussian_packet(
      grid, {config.packet_x * config.dx, config.packet_y * config.dx},
      config.packet_width, {config.momentum, 0.0});

  CrankNicolsonStepper stepper(grid, config.dt);
  const std::size_t n = psi.amp.size();
  std::vector<Complex> mid(n);
  std::vector<double> integrated(config.ny, 0.0);

  for (int s = 0; s < config.steps; ++s) {
    mid = psi.amp;
    stepper.step(psi);
    // midpoint field: the Cayley step conserves probability exactly in it
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (mid[i] + psi.amp[i]);
    const std::vector<double> j =
        transverse_current(grid, mid, config.screen_col);
    for (int y = 0; y < config.ny; ++y) integrated[y] += config.dt * j[y];
  }

  const double crossed =
      std::accumulate(integrated.begin(), integrated.end(), 0.0);
  if (crossed < config.warn_crossing_fraction) {
    std::cerr << "fluxlab: warning: only " << crossed * 100.0
              << "% of the norm crossed the screen; pattern may be "
                 "under-integrated (nu = "
              << config.nu.nu << ")\n";
  }

  if (final_state) *final_state = std::move(psi);

  ScreenPattern pattern;
  pattern.nu = config.nu.nu;
  pattern.q = config.q.q;
  pattern.geometry_hash = config.geometry_hash();
  pattern.crossed_fraction = crossed;
  pattern.y.reserve(config.ny - 2);
  pattern.intensity.reserve(config.ny - 2);
  for (int y = 1; y + 1 < config.ny; ++y) {
    pattern.y.push_back(y * config.dx);
    // truncate the tiny negative transients backflow leaves at dark fringes
    pattern.intensity.push_back(std::max(integrated[y], 0.0));
  }
  return pattern;
}

namespace {

struct WindowSpec {
  std::size_t start = 0;
  std::size_t size = 0;
};

WindowSpec central_window(std::size_t n) {
  WindowSpec w;
  w.size = n * 3 / 5;  // central 60%
  w.start = (n - w.size) / 2;
  return w;
}

std::vector<double> windowed(const std::vector<double>& data, WindowSpec w) {
  std::vector<double> out(data.begin() + w.start, data.begin() + w.start + w.size);
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / out.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double hann = 0.5 * (1.0 - std::cos(kTwoPi * i / out.size()));
    out[i] = (out[i] - mean) * hann;
  }
  return out;
}

// Boxcar average over exactly one fringe period (fractional end weights), so
// the carrier integrates to zero and what remains is the diffraction
// envelope. `period` is in samples.
std::vector<double> envelope_estimate(const std::vector<double>& data,
                                      double period, WindowSpec w) {
  const double radius = 0.5 * period;
  const int reach = static_cast<int>(std::ceil(radius - 0.5));
  std::vector<double> env(w.size);
  for (std::size_t k = 0; k < w.size; ++k) {
    const long center = static_cast<long>(w.start + k);
    double acc = 0.0;
    double total = 0.0;
    for (int j = -reach; j <= reach; ++j) {
      // overlap of the sample cell [j-1/2, j+1/2] with [-radius, radius]
      const double lo = std::max(j - 0.5, -radius);
      const double hi = std::min(j + 0.5, radius);
      const double weight = std::max(hi - lo, 0.0);
      long i = center + j;
      i = std::clamp(i, 0L, static_cast<long>(data.size()) - 1);
      acc += weight * data[i];
      total += weight;
    }
    env[k] = acc / total;
  }
  return env;
}

std::complex<double> dft_bin(const std::vector<double>& data, std::size_t k) {
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    sum += data[i] * std::polar(1.0, -kTwoPi * static_cast<double>(k) *
                                         static_cast<double>(i) / data.size());
  return sum;
}

double window_visibility(const std::vector<double>& intensity, WindowSpec w) {
  const auto [lo, hi] = std::minmax_element(intensity.begin() + w.start,
                                            intensity.begin() + w.start + w.size);
  const double span = *hi - *lo;
  const double total = *hi + *lo;
  return total > 0.0 ? span / total : 0.0;
}

}  // namespace

FringeReport extract_fringe_shift(const ScreenPattern& pattern,
                                  const ScreenPattern& baseline) {
  if (pattern.geometry_hash != baseline.geometry_hash ||
      pattern.q != baseline.q ||
      pattern.intensity.size() != baseline.intensity.size())
    throw InvalidInputError(
        "extract_fringe_shift: patterns come from different apparatus");
  if (pattern.intensity.size() < 16)
    throw InvalidInputError("extract_fringe_shift: pattern too short");

  const WindowSpec w = central_window(pattern.intensity.size());
  const double base_visibility = window_visibility(baseline.intensity, w);
  if (base_visibility < 0.05)
    throw NoFringesError("extract_fringe_shift: baseline visibility " +
                         io::format_double(base_visibility) +
                         " is below 0.05, no fringes to track");

  // locate the dominant nonzero frequency of the baseline
  const std::vector<double> base_probe = windowed(baseline.intensity, w);
  std::size_t k_star = 1;
  double best = -1.0;
  for (std::size_t k = 1; k <= base_probe.size() / 2; ++k) {
    const double mag = std::abs(dft_bin(base_probe, k));
    if (mag > best) {
      best = mag;
      k_star = k;
    }
  }

  // Subtract the baseline's fringe-period-smoothed envelope from both
  // patterns. The envelope spectrum otherwise leaks into the fringe bin and
  // biases the phase by several percent; subtracting the same estimate from
  // both keeps the comparison unbiased.
  const double period = static_cast<double>(w.size) / k_star;
  const std::vector<double> env = envelope_estimate(baseline.intensity, period, w);
  std::vector<double> base_sig(baseline.intensity.begin() + w.start,
                               baseline.intensity.begin() + w.start + w.size);
  std::vector<double> pat_sig(pattern.intensity.begin() + w.start,
                              pattern.intensity.begin() + w.start + w.size);
  for (std::size_t i = 0; i < w.size; ++i) {
    // periodic Hann: its spectrum sits on integer bins, so exact-bin
    // carriers leak nothing into each other
    const double hann = 0.5 * (1.0 - std::cos(kTwoPi * i / w.size));
    base_sig[i] = (base_sig[i] - env[i]) * hann;
    pat_sig[i] = (pat_sig[i] - env[i]) * hann;
  }

  const std::complex<double> fb = dft_bin(base_sig, k_star);
  const std::complex<double> fp = dft_bin(pat_sig, k_star);

  // The fringe bin holds A + Q exp(-i delta): Q from the two-slit carrier,
  // A from flux-independent interference (single-slit wall bounces) that
  // stays put when the fringes move. The ratio estimator cancels A:
  //   1 - fp/fb = (Q/(A+Q)) (1 - exp(-i delta)),  arg = (pi - delta)/2.
  // Near delta = 0 the ratio loses the phase in noise, so fall back to the
  // direct bin-phase difference, which is unbiased exactly there.
  const std::complex<double> ratio = fp / fb;
  double delta;
  if (std::abs(1.0 - ratio) < 1e-2) {
    delta = std::arg(fb * std::conj(fp));
  } else {
    delta = std::numbers::pi - 2.0 * std::arg(1.0 - ratio);
  }

  FringeReport report;
  report.delta_phi = PhaseValue(PhaseValue::reduce(delta));
  report.predicted =
      predicted_shift(FluxFraction(pattern.nu - baseline.nu),
                      ChargeMultiple(pattern.q));
  report.visibility = window_visibility(pattern.intensity, w);
  report.nu = pattern.nu;
  report.q = pattern.q;
  return report;
}

std::vector<FringeReport> flux_sweep(const TwoSlitConfig& config,
                                     std::span<const double> nu_values,
                                     const std::string& csv_path) {
  if (nu_values.size() < 2)
    throw InvalidInputError("flux_sweep: need at least 2 nu values");
  config.validate();

  TwoSlitConfig base_config = config;
  base_config.nu = FluxFraction(0.0);

  auto run_one = [](TwoSlitConfig c) { return run_two_slit(c); };
  std::vector<std::future<ScreenPattern>> jobs;
  jobs.reserve(nu_values.size() + 1);
  jobs.push_back(std::async(std::launch::async, run_one, base_config));
  for (const double nu : nu_values) {
    TwoSlitConfig c = config;
    c.nu = FluxFraction(nu);
    jobs.push_back(std::async(std::launch::async, run_one, c));
  }

  const ScreenPattern baseline = jobs.front().get();
  std::vector<FringeReport> reports;
  reports.reserve(nu_values.size());
  for (std::size_t i = 0; i < nu_values.size(); ++i)
    reports.push_back(extract_fringe_shift(jobs[i + 1].get(), baseline));

  if (!csv_path.empty()) io::write_fringe_csv(csv_path, reports);
  return reports;
}

}  // namespace fluxlab
