// fluxlab: gauge holonomies, a two-slit flux-tube interferometer, ring flux
// quantization, and domain topology checks, from one config-driven CLI.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxlab/config.hpp"
#include "fluxlab/experiments.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/io.hpp"
#include "fluxlab/lattice.hpp"
#include "fluxlab/ring.hpp"

namespace {

constexpr const char* kVersion = "fluxlab 1.0.0";

using Clock = std::chrono::steady_clock;

struct OutputDir {
  std::filesystem::path dir;

  explicit OutputDir(const std::string& path) : dir(path) {
    std::filesystem::create_directories(dir);
  }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// filename-safe spelling of a flux value: 0.25 -> 0p25, -1.5 -> m1p5
std::string nu_tag(double nu) {
  std::string s = fluxlab::io::format_double(nu);
  for (char& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

const std::set<std::string> kSlitKeys = {
    "nx", "ny", "dx", "mass", "barrier_col", "screen_col", "slit_separation",
    "slit_width", "flux_col", "flux_row", "packet_x", "packet_y",
    "packet_width", "momentum", "steps", "dt", "sponge_width",
    "sponge_strength", "closed_slit", "cut", "q", "nu_list", "seed",
    "warn_crossing_fraction"};

fluxlab::TwoSlitConfig two_slit_from_config(const fluxlab::KeyValueConfig& cfg) {
  using fluxlab::TwoSlitConfig;
  cfg.require_known_keys(kSlitKeys);
  TwoSlitConfig c;
  c.nx = cfg.get_int("nx", c.nx);
  c.ny = cfg.get_int("ny", c.ny);
  c.dx = cfg.get_double("dx", c.dx);
  c.mass = cfg.get_double("mass", c.mass);
  c.barrier_col = cfg.get_int("barrier_col", 5 * c.nx / 12);
  c.screen_col = cfg.get_int("screen_col", 2 * c.nx / 3);
  c.slit_separation = cfg.get_int("slit_separation", c.slit_separation);
  c.slit_width = cfg.get_int("slit_width", c.slit_width);
  c.flux_col = cfg.get_int("flux_col", c.barrier_col);
  c.flux_row = cfg.get_int("flux_row", (c.ny - 2) / 2);
  c.packet_x = cfg.get_double("packet_x", c.barrier_col / 2.0 * c.dx);
  c.packet_y = cfg.get_double("packet_y", 0.5 * (c.ny - 1) * c.dx);
  c.packet_width = cfg.get_double("packet_width", c.packet_width);
  c.momentum = cfg.get_double("momentum", c.momentum);
  c.steps = cfg.get_int("steps", c.steps);
  c.dt = cfg.get_double("dt", 0.25 * c.mass * c.dx * c.dx);
  c.sponge_width = cfg.get_int("sponge_width", c.sponge_width);
  c.sponge_strength = cfg.get_double("sponge_strength", c.sponge_strength);
  c.q = fluxlab::ChargeMultiple(cfg.get_int("q", 1));
  c.warn_crossing_fraction =
      cfg.get_double("warn_crossing_fraction", c.warn_crossing_fraction);

  const std::string closed = cfg.get_string("closed_slit", "none");
  if (closed == "none") c.closed_slit = TwoSlitConfig::ClosedSlit::None;
  else if (closed == "lower") c.closed_slit = TwoSlitConfig::ClosedSlit::Lower;
  else if (closed == "upper") c.closed_slit = TwoSlitConfig::ClosedSlit::Upper;
  else throw fluxlab::InvalidInputError("closed_slit must be none|lower|upper");

  const std::string cut = cfg.get_string("cut", "down");
  if (cut == "down") c.cut = TwoSlitConfig::Cut::Down;
  else if (cut == "up") c.cut = TwoSlitConfig::Cut::Up;
  else throw fluxlab::InvalidInputError("cut must be down|up");
  return c;
}

std::vector<double> parse_nu_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw fluxlab::InvalidInputError("nu_list: bad value `" + item + "`");
    }
  }
  return out;
}

void echo_config(std::vector<std::pair<std::string, std::string>>& into,
                 const fluxlab::TwoSlitConfig& c) {
  using fluxlab::io::format_double;
  into.emplace_back("nx", std::to_string(c.nx));
  into.emplace_back("ny", std::to_string(c.ny));
  into.emplace_back("dx", format_double(c.dx));
  into.emplace_back("mass", format_double(c.mass));
  into.emplace_back("barrier_col", std::to_string(c.barrier_col));
  into.emplace_back("screen_col", std::to_string(c.screen_col));
  into.emplace_back("slit_separation", std::to_string(c.slit_separation));
  into.emplace_back("slit_width", std::to_string(c.slit_width));
  into.emplace_back("flux_col", std::to_string(c.flux_col));
  into.emplace_back("flux_row", std::to_string(c.flux_row));
  into.emplace_back("packet_x", format_double(c.packet_x));
  into.emplace_back("packet_y", format_double(c.packet_y));
  into.emplace_back("packet_width", format_double(c.packet_width));
  into.emplace_back("momentum", format_double(c.momentum));
  into.emplace_back("steps", std::to_string(c.steps));
  into.emplace_back("dt", format_double(c.dt));
  into.emplace_back("sponge_width", std::to_string(c.sponge_width));
  into.emplace_back("sponge_strength", format_double(c.sponge_strength));
  into.emplace_back("closed_slit",
                    c.closed_slit == fluxlab::TwoSlitConfig::ClosedSlit::None
                        ? "none"
                        : (c.closed_slit == fluxlab::TwoSlitConfig::ClosedSlit::Lower
                               ? "lower"
                               : "upper"));
  into.emplace_back(
      "cut", c.cut == fluxlab::TwoSlitConfig::Cut::Down ? "down" : "up");
  into.emplace_back("q", std::to_string(c.q.q));
}

int cmd_holonomy(const std::string& path_file, double nu, int q,
                 const std::string& lambda_expr, double center_x,
                 double center_y, double core_radius, const std::string& out,
                 const std::string& cmdline) {
  const auto t0 = Clock::now();
  const fluxlab::PolylinePath path = fluxlab::read_path_file(path_file);
  const auto field = fluxlab::VectorPotentialField::ideal_flux_tube(
      {center_x, center_y}, core_radius, fluxlab::FluxFraction(nu));
  const fluxlab::ChargeMultiple charge(q);

  const fluxlab::PhaseValue phase = fluxlab::path_phase(path, field, charge);
  std::optional<int> winding;
  std::optional<double> enclosed;
  if (path.closed()) {
    winding = fluxlab::winding_number(path, {center_x, center_y});
    enclosed = fluxlab::enclosed_flux(path, field).nu;
  }
  std::optional<double> gauge_phase;
  if (!lambda_expr.empty()) {
    const fluxlab::GaugeFunction lambda = fluxlab::parse_gauge_lambda(lambda_expr);
    const auto shifted = fluxlab::gauge_transform(field, lambda);
    gauge_phase = fluxlab::path_phase(path, shifted, charge).radians();
  }

  using fluxlab::io::format_double;
  std::cout << "closed = " << (path.closed() ? "yes" : "no") << '\n';
  if (winding) std::cout << "winding = " << *winding << '\n';
  std::cout << "phase_rad = " << format_double(phase.radians()) << '\n';
  std::cout << "phase_mod_2pi = " << format_double(phase.reduced()) << '\n';
  if (enclosed) std::cout << "enclosed_nu = " << format_double(*enclosed) << '\n';
  if (gauge_phase)
    std::cout << "phase_gauge_rad = " << format_double(*gauge_phase) << '\n';

  OutputDir od(out);
  {
    std::ofstream csv(od.file("holonomy.csv"), std::ios::binary);
    csv << "closed,winding,phase_rad,phase_mod_2pi,enclosed_nu,phase_gauge_rad\n";
    csv << (path.closed() ? 1 : 0) << ','
        << (winding ? std::to_string(*winding) : "") << ','
        << format_double(phase.radians()) << ','
        << format_double(phase.reduced()) << ','
        << (enclosed ? format_double(*enclosed) : "") << ','
        << (gauge_phase ? format_double(*gauge_phase) : "") << '\n';
  }
  std::vector<std::pair<std::string, std::string>> echo = {
      {"path_file", path_file},
      {"nu", format_double(nu)},
      {"q", std::to_string(q)},
      {"lambda", lambda_expr},
      {"center", format_double(center_x) + "," + format_double(center_y)},
      {"core_radius", format_double(core_radius)}};
  fluxlab::io::write_manifest(
      od.file("manifest.txt"), kVersion, cmdline, echo,
      std::chrono::duration<double>(Clock::now() - t0).count());
  return 0;
}

int cmd_slit(const fluxlab::KeyValueConfig& cfg, std::vector<double> nus,
             const std::string& out, const std::string& cmdline) {
  const auto t0 = Clock::now();
  fluxlab::TwoSlitConfig config = two_slit_from_config(cfg);

  if (nus.empty()) nus = parse_nu_list(cfg.get_string("nu_list", "0,0.5"));
  if (nus.empty()) throw fluxlab::InvalidInputError("no nu values given");
  config.validate();

  OutputDir od(out);

  // one run per nu plus the nu = 0 baseline, concurrently
  auto run_one = [&config](double nu) {
    fluxlab::TwoSlitConfig c = config;
    c.nu = fluxlab::FluxFraction(nu);
    fluxlab::WaveState final_state;
    fluxlab::ScreenPattern p = fluxlab::run_two_slit(c, &final_state);
    return std::pair{std::move(p), std::move(final_state)};
  };

  std::vector<std::future<std::pair<fluxlab::ScreenPattern, fluxlab::WaveState>>>
      jobs;
  jobs.push_back(std::async(std::launch::async, run_one, 0.0));
  for (const double nu : nus)
    jobs.push_back(std::async(std::launch::async, run_one, nu));

  auto [baseline, baseline_state] = jobs.front().get();
  const fluxlab::LatticeGrid grid = config.make_grid();
  fluxlab::io::write_pattern_csv(od.file("pattern_baseline.csv"), baseline);
  fluxlab::io::write_wave_pgm(od.file("state_baseline.pgm"), grid,
                              baseline_state);

  std::vector<fluxlab::FringeReport> reports;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    auto [pattern, state] = jobs[i + 1].get();
    reports.push_back(fluxlab::extract_fringe_shift(pattern, baseline));
    const std::string tag = nu_tag(nus[i]);
    fluxlab::io::write_pattern_csv(od.file("pattern_nu_" + tag + ".csv"), pattern);
    fluxlab::io::write_wave_pgm(od.file("state_nu_" + tag + ".pgm"), grid, state);
  }
  fluxlab::io::write_fringe_csv(od.file("fringes.csv"), reports);

  using fluxlab::io::format_double;
  std::cout << "nu,q,delta_phi_measured,delta_phi_predicted,visibility\n";
  for (const fluxlab::FringeReport& r : reports)
    std::cout << format_double(r.nu) << ',' << r.q << ','
              << format_double(r.delta_phi.reduced()) << ','
              << format_double(r.predicted.reduced()) << ','
              << format_double(r.visibility) << '\n';

  std::vector<std::pair<std::string, std::string>> echo;
  echo_config(echo, config);
  std::string nu_list;
  for (const double nu : nus)
    nu_list += (nu_list.empty() ? "" : ",") + format_double(nu);
  echo.emplace_back("nu_list", nu_list);
  if (cfg.has("seed")) echo.emplace_back("seed", cfg.get_string("seed", ""));
  fluxlab::io::write_manifest(
      od.file("manifest.txt"), kVersion, cmdline, echo,
      std::chrono::duration<double>(Clock::now() - t0).count());
  return 0;
}

int cmd_ring(int q, double nu, double sweep_min, double sweep_max,
             double sweep_step, int n_range, const std::string& out,
             const std::string& cmdline) {
  const auto t0 = Clock::now();
  if (!(sweep_step > 0.0) || sweep_max < sweep_min)
    throw fluxlab::InvalidInputError("ring: bad sweep range/step");
  const fluxlab::ChargeMultiple charge(q);

  std::vector<double> sweep;
  for (double v = sweep_min; v <= sweep_max + 1e-12; v += sweep_step)
    sweep.push_back(v);

  OutputDir od(out);
  const auto stairs = fluxlab::staircase(sweep, charge);
  fluxlab::io::write_staircase_csv(od.file("staircase.csv"), stairs);

  const auto spectrum = fluxlab::ring_spectrum(-n_range, n_range, charge,
                                               fluxlab::FluxFraction(nu));
  fluxlab::io::write_spectrum_csv(od.file("spectrum.csv"), spectrum);

  {
    std::ofstream csv(od.file("ground_energy.csv"), std::ios::binary);
    csv << "nu,ground_n,ground_energy\n";
    for (const double v : sweep) {
      const auto s = fluxlab::ring_spectrum(-n_range, n_range, charge,
                                            fluxlab::FluxFraction(v));
      csv << fluxlab::io::format_double(v) << ',' << s.ground().n << ','
          << fluxlab::io::format_double(s.ground().energy) << '\n';
    }
  }

  std::cout << "staircase points = " << stairs.size() << '\n';
  std::cout << "ground level at nu = " << fluxlab::io::format_double(nu)
            << ": n = " << spectrum.ground().n
            << ", energy = " << fluxlab::io::format_double(spectrum.ground().energy)
            << '\n';

  fluxlab::io::write_manifest(
      od.file("manifest.txt"), kVersion, cmdline,
      {{"q", std::to_string(q)},
       {"nu", fluxlab::io::format_double(nu)},
       {"sweep_min", fluxlab::io::format_double(sweep_min)},
       {"sweep_max", fluxlab::io::format_double(sweep_max)},
       {"sweep_step", fluxlab::io::format_double(sweep_step)},
       {"n_range", std::to_string(n_range)}},
      std::chrono::duration<double>(Clock::now() - t0).count());
  return 0;
}

int cmd_topology(const std::string& mask_file, int flux_x, int flux_y,
                 const std::string& out, const std::string& cmdline) {
  const auto t0 = Clock::now();
  fluxlab::DomainMask mask = fluxlab::io::read_mask_pgm(mask_file);
  mask.flux_cell = {flux_x, flux_y};
  const fluxlab::TopologyVerdict verdict = fluxlab::topology_check(mask);

  std::cout << verdict.describe() << '\n';

  OutputDir od(out);
  {
    std::ofstream txt(od.file("verdict.txt"), std::ios::binary);
    txt << verdict.describe() << '\n';
  }
  fluxlab::io::write_mask_pgm(od.file("mask_witness.pgm"), mask, verdict.witness);
  fluxlab::io::write_manifest(
      od.file("manifest.txt"), kVersion, cmdline,
      {{"mask_file", mask_file},
       {"flux_x", std::to_string(flux_x)},
       {"flux_y", std::to_string(flux_y)}},
      std::chrono::duration<double>(Clock::now() - t0).count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge holonomy, two-slit flux interference, ring flux "
               "quantization, and domain topology"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  const std::string cmdline = join_args(argc, argv);

  // holonomy
  auto* holonomy = app.add_subcommand(
      "holonomy", "winding number, path/loop phase and enclosed flux");
  std::string path_file;
  double h_nu = 0.0, h_cx = 0.0, h_cy = 0.0, h_core = 0.1;
  int h_q = 1;
  std::string h_lambda, h_out = "fluxlab_out";
  holonomy->add_option("--path", path_file, "path file (`x y` per line)")
      ->required();
  holonomy->add_option("--nu", h_nu, "flux in units of 2 pi hbar c / e");
  holonomy->add_option("--q", h_q, "charge in units of e");
  holonomy->add_option("--lambda", h_lambda,
                       "gauge function, e.g. '3x+y' or '0.5sin(x)cos(y)'");
  holonomy->add_option("--center-x", h_cx, "flux tube center x");
  holonomy->add_option("--center-y", h_cy, "flux tube center y");
  holonomy->add_option("--core-radius", h_core, "flux tube core radius");
  holonomy->add_option("--out", h_out, "output directory");

  // slit
  auto* slit = app.add_subcommand(
      "slit", "two-slit interference with a flux tube between the slits");
  std::string s_config, s_out = "fluxlab_out";
  std::vector<double> s_nus;
  std::vector<std::string> s_sets;
  int s_q = 0;
  slit->add_option("--config", s_config, "key = value config file");
  slit->add_option("--nu", s_nus, "flux values (repeatable)");
  slit->add_option("--q", s_q, "charge in units of e");
  slit->add_option("--set", s_sets, "config override key=value (repeatable)");
  slit->add_option("--out", s_out, "output directory");

  // ring
  auto* ring = app.add_subcommand(
      "ring", "flux-trapping staircase and ring spectrum");
  int r_q = 2, r_nrange = 8;
  double r_nu = 0.0, r_min = 0.0, r_max = 1.6, r_step = 0.005;
  std::string r_out = "fluxlab_out";
  ring->add_option("--q", r_q, "condensate charge in units of e");
  ring->add_option("--nu", r_nu, "flux for the spectrum output");
  ring->add_option("--sweep-min", r_min, "external flux sweep start");
  ring->add_option("--sweep-max", r_max, "external flux sweep end");
  ring->add_option("--sweep-step", r_step, "external flux sweep step");
  ring->add_option("--n-range", r_nrange, "levels n in [-n_range, n_range]");
  ring->add_option("--out", r_out, "output directory");

  // topology
  auto* topology = app.add_subcommand(
      "topology", "does the domain mask make flux quantization binding?");
  std::string t_mask, t_out = "fluxlab_out";
  int t_fx = 0, t_fy = 0;
  topology->add_option("--mask", t_mask, "PGM mask, 0 = forbidden, 255 = allowed")
      ->required();
  topology->add_option("--flux-x", t_fx, "flux cell x")->required();
  topology->add_option("--flux-y", t_fy, "flux cell y")->required();
  topology->add_option("--out", t_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // parse/usage problems are validation failures
  }

  try {
    if (holonomy->parsed())
      return cmd_holonomy(path_file, h_nu, h_q, h_lambda, h_cx, h_cy, h_core,
                          h_out, cmdline);
    if (slit->parsed()) {
      fluxlab::KeyValueConfig cfg;
      if (!s_config.empty()) cfg = fluxlab::KeyValueConfig::parse_file(s_config);
      for (const std::string& kv : s_sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
          throw fluxlab::InvalidInputError("--set expects key=value, got " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (s_q != 0) cfg.set("q", std::to_string(s_q));
      return cmd_slit(cfg, s_nus, s_out, cmdline);
    }
    if (ring->parsed())
      return cmd_ring(r_q, r_nu, r_min, r_max, r_step, r_nrange, r_out, cmdline);
    if (topology->parsed())
      return cmd_topology(t_mask, t_fx, t_fy, t_out, cmdline);
  } catch (const fluxlab::InvalidInputError& e) {
    std::cerr << "fluxlab: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const fluxlab::NumericError& e) {
    std::cerr << "fluxlab: numeric failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fluxlab: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
