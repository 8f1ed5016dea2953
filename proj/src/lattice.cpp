#include "fluxlab/lattice.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

namespace fluxlab {

namespace {

void check_dims(const LatticeGrid& grid, std::size_t n, const char* who) {
  if (n != static_cast<std::size_t>(grid.nx) * grid.ny)
    throw InvalidInputError(std::string(who) + ": state size does not match grid");
}

std::once_flag cfl_warning_flag;

}  // namespace

int LatticeGrid::undirected_link_count() const {
  return (nx - 1) * ny + nx * (ny - 1);
}

void LatticeGrid::refresh() {
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  hop_x_.assign(n, Complex(0.0));
  hop_y_.assign(n, Complex(0.0));
  diag_.assign(n, Complex(0.0));
  const double t = hopping();
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const int i = site(x, y);
      if (!allowed[i]) continue;
      diag_[i] = Complex(4.0 * t + potential[i], -sponge[i]);
      if (x + 1 < nx && allowed[i + 1]) hop_x_[i] = -t * link_x[i];
      if (y + 1 < ny && allowed[i + nx]) hop_y_[i] = -t * link_y[i];
    }
  }
}

LatticeGrid LatticeGrid::with_sponge(std::function<double(int, int)> rate) const {
  LatticeGrid out = *this;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) out.sponge[site(x, y)] = rate(x, y);
  out.refresh();
  return out;
}

LatticeGrid build_grid(int nx, int ny, double dx, double mass,
                       std::vector<std::uint8_t> mask,
                       std::vector<double> potential) {
  if (nx < 4 || ny < 4)
    throw InvalidInputError("build_grid: need nx, ny >= 4");
  if (!(dx > 0.0) || !(mass > 0.0))
    throw InvalidInputError("build_grid: dx and mass must be positive");
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  if (mask.size() != n || potential.size() != n)
    throw InvalidInputError("build_grid: mask/potential size mismatch");

  LatticeGrid g;
  g.nx = nx;
  g.ny = ny;
  g.dx = dx;
  g.mass = mass;
  g.allowed = std::move(mask);
  g.potential = std::move(potential);
  g.sponge.assign(n, 0.0);
  g.link_x.assign(n, Complex(1.0));
  g.link_y.assign(n, Complex(1.0));
  g.refresh();
  return g;
}

LatticeGrid build_grid(int nx, int ny, double dx, double mass,
                       const std::function<bool(int, int)>& mask,
                       const std::function<double(int, int)>& potential) {
  if (nx < 4 || ny < 4)
    throw InvalidInputError("build_grid: need nx, ny >= 4");
  const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  std::vector<std::uint8_t> m(n, 1);
  std::vector<double> v(n, 0.0);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * nx + x;
      if (mask) m[i] = mask(x, y) ? 1 : 0;
      if (potential) v[i] = potential(x, y);
    }
  }
  return build_grid(nx, ny, dx, mass, std::move(m), std::move(v));
}

FluxString FluxString::straight_down(PlaquetteIndex cell) {
  FluxString s;
  s.flux_cell = cell;
  s.cut.assign(static_cast<std::size_t>(cell.y) + 1, CutStep::Down);
  return s;
}

FluxString FluxString::straight_up(PlaquetteIndex cell, int ny) {
  FluxString s;
  s.flux_cell = cell;
  s.cut.assign(static_cast<std::size_t>(ny - 1 - cell.y), CutStep::Up);
  return s;
}

LatticeGrid apply_flux_string(const LatticeGrid& grid, const FluxString& string,
                              FluxFraction nu, ChargeMultiple q) {
  const int npx = grid.nx - 1;  // plaquette counts
  const int npy = grid.ny - 1;
  if (string.flux_cell.x < 0 || string.flux_cell.x >= npx ||
      string.flux_cell.y < 0 || string.flux_cell.y >= npy)
    throw InvalidInputError("apply_flux_string: flux cell outside the grid");

  // Reduce q*nu mod 1 so that nu and nu + 1/q give bit-identical phases.
  double turns = q.q * nu.nu;
  turns -= std::floor(turns);
  const Complex factor = std::polar(1.0, kTwoPi * turns);

  LatticeGrid out = grid;
  auto scale = [&out, factor](std::vector<Complex>& links, int x, int y,
                              bool forward) {
    Complex& u = links[out.site(x, y)];
    u *= forward ? factor : std::conj(factor);
    u /= std::abs(u);
  };

  // Walk the dual-lattice cut. Each step transfers the phase so the plaquette
  // behind keeps exp(i 2 pi q nu) and every other product telescopes to 1.
  int px = string.flux_cell.x;
  int py = string.flux_cell.y;
  bool exited = false;
  for (const CutStep step : string.cut) {
    if (exited)
      throw InvalidInputError("apply_flux_string: cut continues outside grid");
    switch (step) {
      case CutStep::Down:
        scale(out.link_x, px, py, true);
        py -= 1;
        break;
      case CutStep::Up:
        scale(out.link_x, px, py + 1, false);
        py += 1;
        break;
      case CutStep::Left:
        scale(out.link_y, px, py, false);
        px -= 1;
        break;
      case CutStep::Right:
        scale(out.link_y, px + 1, py, true);
        px += 1;
        break;
    }
    exited = px < 0 || px >= npx || py < 0 || py >= npy;
  }
  if (!exited)
    throw InvalidInputError("apply_flux_string: cut does not reach the boundary");

  out.refresh();
  return out;
}

Complex plaquette_phase(const LatticeGrid& grid, int px, int py) {
  if (px < 0 || px + 1 >= grid.nx || py < 0 || py + 1 >= grid.ny)
    throw InvalidInputError("plaquette_phase: plaquette outside the grid");
  const Complex bottom = grid.link_x[grid.site(px, py)];
  const Complex right = grid.link_y[grid.site(px + 1, py)];
  const Complex top = grid.link_x[grid.site(px, py + 1)];
  const Complex left = grid.link_y[grid.site(px, py)];
  return bottom * right * std::conj(top) * std::conj(left);
}

double norm_squared(const LatticeGrid& grid, const WaveState& state) {
  check_dims(grid, state.amp.size(), "norm_squared");
  double s = 0.0;
  for (const Complex& a : state.amp) s += std::norm(a);
  return s * grid.dx * grid.dx;
}

namespace detail {

void apply_hamiltonian(const LatticeGrid& grid, std::span<const Complex> in,
                       std::span<Complex> out, bool conj_sponge) {
  const int nx = grid.nx;
  const int ny = grid.ny;
  const Complex* hx = grid.hop_x_.data();
  const Complex* hy = grid.hop_y_.data();
  const Complex* dg = grid.diag_.data();
  const Complex* v = in.data();
  Complex* o = out.data();

  for (int y = 0; y < ny; ++y) {
    const int row = y * nx;
    for (int x = 0; x < nx; ++x) {
      const int i = row + x;
      // H[i, i+1] = hop_x_[i], H[i+1, i] = conj(hop_x_[i])
      Complex acc = (conj_sponge ? std::conj(dg[i]) : dg[i]) * v[i];
      if (x + 1 < nx) acc += hx[i] * v[i + 1];
      if (x > 0) acc += std::conj(hx[i - 1]) * v[i - 1];
      if (y + 1 < ny) acc += hy[i] * v[i + nx];
      if (y > 0) acc += std::conj(hy[i - nx]) * v[i - nx];
      o[i] = acc;
    }
  }
}

}  // namespace detail

WaveState hamiltonian_apply(const LatticeGrid& grid, const WaveState& state) {
  check_dims(grid, state.amp.size(), "hamiltonian_apply");
  WaveState out;
  out.time = state.time;
  out.amp.resize(state.amp.size());
  detail::apply_hamiltonian(grid, state.amp, out.amp);
  return out;
}

WaveState gaussian_packet(const LatticeGrid& grid, Vec2 center, double width,
                          Vec2 momentum) {
  if (!(width > 0.0))
    throw InvalidInputError("gaussian_packet: width must be positive");
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  WaveState state;
  state.amp.resize(n);

  double total = 0.0;
  double masked = 0.0;
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      const Vec2 r{x * grid.dx, y * grid.dx};
      const Vec2 d = r - center;
      const double envelope = std::exp(-dot(d, d) / (4.0 * width * width));
      const Complex a = envelope * std::polar(1.0, dot(momentum, r));
      state.amp[grid.site(x, y)] = a;
      const double p = std::norm(a);
      total += p;
      if (!grid.is_allowed(x, y)) masked += p;
    }
  }
  if (total <= 0.0)
    throw InvalidInputError("gaussian_packet: packet has no support on grid");
  if (masked / total >= 1e-6)
    throw InvalidInputError(
        "gaussian_packet: packet overlaps masked region (fraction " +
        std::to_string(masked / total) + ")");

  double live = 0.0;
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      const int i = grid.site(x, y);
      if (!grid.allowed[i]) state.amp[i] = Complex(0.0);
      live += std::norm(state.amp[i]);
    }
  }
  const double scale = 1.0 / (std::sqrt(live) * grid.dx);
  for (Complex& a : state.amp) a *= scale;
  return state;
}

CrankNicolsonStepper::CrankNicolsonStepper(const LatticeGrid& grid, double dt,
                                           SolverOptions options)
    : grid_(&grid), dt_(dt), options_(options) {
  if (!(dt > 0.0)) throw InvalidInputError("crank_nicolson_step: dt must be > 0");
  if (dt > grid.mass * grid.dx * grid.dx) {
    std::call_once(cfl_warning_flag, [&] {
      std::cerr << "fluxlab: warning: dt = " << dt
                << " exceeds mass*dx^2 = " << grid.mass * grid.dx * grid.dx
                << "; Cayley phase errors grow as (dt E)^3\n";
    });
  }
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  h_.resize(n);
  b_.resize(n);
  r_.resize(n);
  z_.resize(n);
  p_.resize(n);
  w_.resize(n);
}

// (1 +/- i dt/2 H) without forming the matrix.
void CrankNicolsonStepper::apply_cayley(std::span<const Complex> in,
                                        std::span<Complex> out,
                                        bool adjoint) const {
  detail::apply_hamiltonian(*grid_, in, h_, adjoint);
  const Complex ihalf = adjoint ? Complex(0.0, -0.5 * dt_) : Complex(0.0, 0.5 * dt_);
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] + ihalf * h_[i];
}

void CrankNicolsonStepper::step(WaveState& state) {
  check_dims(*grid_, state.amp.size(), "crank_nicolson_step");
  const std::size_t n = state.amp.size();
  std::vector<Complex>& x = state.amp;

  // b = (1 - i dt/2 H) psi
  detail::apply_hamiltonian(*grid_, x, h_);
  const Complex mihalf(0.0, -0.5 * dt_);
  double b_norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b_[i] = x[i] + mihalf * h_[i];
    b_norm2 += std::norm(b_[i]);
  }
  const double target = options_.tolerance * std::sqrt(b_norm2);

  // CGNR on A^H A x = A^H b with A = 1 + i dt/2 H; A is near-identity so the
  // normal equations stay well conditioned. Initial guess x = b.
  x = b_;
  apply_cayley(x, w_, false);
  double r_norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r_[i] = b_[i] - w_[i];
    r_norm2 += std::norm(r_[i]);
  }

  int iterations = 0;
  if (std::sqrt(r_norm2) > target) {
    apply_cayley(r_, z_, true);
    double gamma = 0.0;
    for (std::size_t i = 0; i < n; ++i) gamma += std::norm(z_[i]);
    p_ = z_;

    bool converged = false;
    for (; iterations < options_.max_iterations; ++iterations) {
      apply_cayley(p_, w_, false);
      double w_norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) w_norm2 += std::norm(w_[i]);
      const double alpha = gamma / w_norm2;
      r_norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p_[i];
        r_[i] -= alpha * w_[i];
        r_norm2 += std::norm(r_[i]);
      }
      if (std::sqrt(r_norm2) <= target) {
        converged = true;
        ++iterations;
        break;
      }
      apply_cayley(r_, z_, true);
      double gamma_next = 0.0;
      for (std::size_t i = 0; i < n; ++i) gamma_next += std::norm(z_[i]);
      const double beta = gamma_next / gamma;
      gamma = gamma_next;
      for (std::size_t i = 0; i < n; ++i) p_[i] = z_[i] + beta * p_[i];
    }
    if (!converged)
      throw NumericError("crank_nicolson_step: solver stalled, residual " +
                         std::to_string(std::sqrt(r_norm2)) + " after " +
                         std::to_string(iterations) + " iterations");
  }
  last_iterations_ = iterations;
  state.time += dt_;
}

WaveState crank_nicolson_step(const LatticeGrid& grid, const WaveState& state,
                              double dt, SolverOptions options) {
  CrankNicolsonStepper stepper(grid, dt, options);
  WaveState out = state;
  stepper.step(out);
  return out;
}

std::vector<double> transverse_current(const LatticeGrid& grid,
                                       std::span<const Complex> psi, int col) {
  if (col < 0 || col + 1 >= grid.nx)
    throw InvalidInputError("transverse_current: column outside the grid");
  check_dims(grid, psi.size(), "transverse_current");
  // J = 2 Im(conj(hop) * psi_left * conj(psi_right)) with hop = -t U, from
  // the discrete continuity equation; dx^2 matches the norm_squared measure.
  std::vector<double> j(grid.ny, 0.0);
  for (int y = 0; y < grid.ny; ++y) {
    const int i = grid.site(col, y);
    const Complex hop = grid.hop_x_[i];
    j[y] = 2.0 * grid.dx * grid.dx *
           std::imag(std::conj(hop) * psi[i] * std::conj(psi[i + 1]));
  }
  return j;
}

}  // namespace fluxlab
