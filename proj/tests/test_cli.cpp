// End-to-end checks of the fluxlab binary: exit codes, file outputs, and
// byte-stable CSVs. The binary path comes from the build system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fluxlab/config.hpp"
#include "fluxlab/io.hpp"
#include "fluxlab/ring.hpp"

using namespace fluxlab;
namespace fs = std::filesystem;

namespace {

const std::string kBin = FLUXLAB_BIN_PATH;

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("fluxlab_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  const int status = std::system((kBin + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// small fast slit config shared by the CLI tests
std::string slit_config_text() {
  return "# fast desk-scale interferometer\n"
         "nx = 160\n"
         "ny = 80\n"
         "barrier_col = 64\n"
         "screen_col = 100\n"
         "slit_separation = 20\n"
         "slit_width = 4\n"
         "flux_col = 64\n"
         "flux_row = 39\n"
         "packet_x = 32\n"
         "packet_y = 39.5\n"
         "packet_width = 6\n"
         "steps = 640\n"
         "warn_crossing_fraction = 0\n";
}

}  // namespace

TEST_CASE("config parser: comments, strictness, types") {
  const KeyValueConfig cfg = KeyValueConfig::parse_text(
      "# comment\n nx = 24 # trailing\n\n dt=0.5\n name = two slit\n");
  CHECK(cfg.get_int("nx", 0) == 24);
  CHECK(cfg.get_double("dt", 0.0) == 0.5);
  CHECK(cfg.get_string("name", "") == "two slit");
  CHECK(cfg.get_int("missing", 7) == 7);

  CHECK_THROWS_AS(KeyValueConfig::parse_text("nx = 1\nnx = 2\n"), InvalidInputError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("just some words\n"), InvalidInputError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("BadKey = 1\n"), InvalidInputError);
  CHECK_THROWS_AS(cfg.get_int("dt", 0), InvalidInputError);

  CHECK_THROWS_AS(cfg.require_known_keys({"nx", "dt"}), InvalidInputError);
  CHECK_NOTHROW(cfg.require_known_keys({"nx", "dt", "name"}));
}

TEST_CASE("gauge lambda expressions parse with analytic gradients") {
  const GaugeFunction linear = parse_gauge_lambda("3x + y - 2");
  CHECK(linear.value({1.0, 2.0}) == doctest::Approx(3.0));
  CHECK(linear.gradient({5.0, -1.0}).x == doctest::Approx(3.0));
  CHECK(linear.gradient({5.0, -1.0}).y == doctest::Approx(1.0));

  const GaugeFunction wavy = parse_gauge_lambda("0.5sin(x)cos(y)");
  const std::vector<Vec2> pts{{0.2, 0.4}, {-1.0, 2.0}};
  CHECK(gradient_defect(wavy, pts) < 1e-9);

  const GaugeFunction minus = parse_gauge_lambda("-x");
  CHECK(minus.value({2.0, 0.0}) == doctest::Approx(-2.0));

  CHECK_THROWS_AS(parse_gauge_lambda("3z"), InvalidInputError);
  CHECK_THROWS_AS(parse_gauge_lambda(""), InvalidInputError);
  CHECK_THROWS_AS(parse_gauge_lambda("x ++ y"), InvalidInputError);
}

TEST_CASE("path files parse directives, comments, and reject junk") {
  Sandbox sb;
  write_file(sb.path("loop.path"), "closed\n# unit square\n0 0\n1 0\n1 1\n0 1\n");
  const PolylinePath loop = read_path_file(sb.path("loop.path"));
  CHECK(loop.closed());
  CHECK(loop.vertices().size() == 4);

  write_file(sb.path("open.path"), "1 0\n2 0\n");
  CHECK_FALSE(read_path_file(sb.path("open.path")).closed());

  write_file(sb.path("bad.path"), "closed\n1 0 extra\n");
  CHECK_THROWS_AS(read_path_file(sb.path("bad.path")), InvalidInputError);
  CHECK_THROWS_AS(read_path_file(sb.path("missing.path")), InvalidInputError);
}

TEST_CASE("mask PGM round trip") {
  Sandbox sb;
  const DomainMask mask = annulus_mask(24, 20, 4.0, 8.0);
  io::write_mask_pgm(sb.path("mask.pgm"), mask);
  const DomainMask back = io::read_mask_pgm(sb.path("mask.pgm"));
  CHECK(back.nx == mask.nx);
  CHECK(back.ny == mask.ny);
  CHECK(back.allowed == mask.allowed);
}

TEST_CASE("cli: holonomy on a circle reports the loop phase") {
  Sandbox sb;
  std::ostringstream path;
  path << "closed\n";
  for (int k = 0; k < 64; ++k) {
    const double t = 2.0 * 3.14159265358979312 * k / 64;
    path << 2 * std::cos(t) << ' ' << 2 * std::sin(t) << '\n';
  }
  write_file(sb.path("circle.path"), path.str());

  const std::string out = sb.path("out");
  CHECK(run("holonomy --path " + sb.path("circle.path") +
            " --nu 0.5 --q 2 --out " + out) == 0);
  const std::string csv = slurp(out + "/holonomy.csv");
  CHECK(csv.find("closed,winding,phase_rad,phase_mod_2pi,enclosed_nu") !=
        std::string::npos);
  // phase 2 pi, winding 1, enclosed flux 1/2
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.substr(0, 4) == "1,1,");
  CHECK(row.find("6.28318530717958") != std::string::npos);
  CHECK(slurp(out + "/manifest.txt").find("tool = fluxlab") != std::string::npos);

  // open radial segment: no winding column, zero phase
  write_file(sb.path("radial.path"), "1 0\n2 0\n");
  CHECK(run("holonomy --path " + sb.path("radial.path") + " --nu 0.5 --out " +
            out) == 0);
  std::istringstream open_csv(slurp(out + "/holonomy.csv"));
  std::getline(open_csv, header);
  std::getline(open_csv, row);
  CHECK(row.substr(0, 3) == "0,,");

  // gauge column shifts by q * delta lambda for open paths
  CHECK(run("holonomy --path " + sb.path("radial.path") +
            " --nu 0.5 --q 2 --lambda \"3x+y\" --out " + out) == 0);
  std::istringstream gauge_csv(slurp(out + "/holonomy.csv"));
  std::getline(gauge_csv, header);
  std::getline(gauge_csv, row);
  const std::size_t last_comma = row.rfind(',');
  const double gauge_phase = std::stod(row.substr(last_comma + 1));
  CHECK(gauge_phase == doctest::Approx(2 * 3.0).epsilon(1e-9));  // q * (3*1)

  CHECK(run("holonomy --path " + sb.path("does_not_exist.path")) == 2);
}

TEST_CASE("cli: slit run writes patterns, fringes, states, manifest") {
  Sandbox sb;
  write_file(sb.path("slit.cfg"), slit_config_text());
  const std::string out = sb.path("out");
  CHECK(run("slit --config " + sb.path("slit.cfg") + " --nu 0.5 --out " + out) == 0);

  CHECK(fs::exists(out + "/fringes.csv"));
  CHECK(fs::exists(out + "/pattern_baseline.csv"));
  CHECK(fs::exists(out + "/pattern_nu_0p5.csv"));
  CHECK(fs::exists(out + "/state_nu_0p5.pgm"));
  CHECK(fs::exists(out + "/manifest.txt"));

  const std::string fringe_csv = slurp(out + "/fringes.csv");
  CHECK(fringe_csv.find("nu,q,delta_phi_measured,delta_phi_predicted,visibility") == 0);

  const std::string pgm = slurp(out + "/state_nu_0p5.pgm");
  CHECK(pgm.substr(0, 2) == "P5");

  // determinism: identical invocation gives byte-identical CSV artifacts
  const std::string out2 = sb.path("out2");
  CHECK(run("slit --config " + sb.path("slit.cfg") + " --nu 0.5 --out " + out2) == 0);
  CHECK(slurp(out + "/fringes.csv") == slurp(out2 + "/fringes.csv"));
  CHECK(slurp(out + "/pattern_nu_0p5.csv") == slurp(out2 + "/pattern_nu_0p5.csv"));
}

TEST_CASE("cli: invalid slit geometry exits with code 2") {
  Sandbox sb;
  write_file(sb.path("bad.cfg"), slit_config_text() + "screen_col = 10\n");
  CHECK(run("slit --config " + sb.path("bad.cfg") + " --nu 0.5 --out " +
            sb.path("out")) == 2);

  write_file(sb.path("unknown.cfg"), slit_config_text() + "warp_factor = 9\n");
  CHECK(run("slit --config " + sb.path("unknown.cfg") + " --out " + sb.path("out")) ==
        2);
}

TEST_CASE("cli: ring staircase and spectrum") {
  Sandbox sb;
  const std::string out = sb.path("out");
  CHECK(run("ring --q 2 --sweep-min 0 --sweep-max 1 --sweep-step 0.01 --out " +
            out) == 0);
  const std::string stairs = slurp(out + "/staircase.csv");
  CHECK(stairs.find("nu_external,n,nu_trapped") == 0);
  CHECK(stairs.find("\n0.6,1,0.5\n") != std::string::npos);
  CHECK(slurp(out + "/spectrum.csv").find("n,energy") == 0);
  CHECK(fs::exists(out + "/ground_energy.csv"));

  // electron condensate: plateaus at whole quanta
  const std::string out2 = sb.path("out2");
  CHECK(run("ring --q 1 --sweep-min 0 --sweep-max 1 --sweep-step 0.25 --out " +
            out2) == 0);
  CHECK(slurp(out2 + "/staircase.csv").find("\n0.75,1,1\n") != std::string::npos);

  CHECK(run("ring --q 2 --sweep-step 0 --out " + out) == 2);
}

TEST_CASE("cli: topology verdicts") {
  Sandbox sb;
  const std::string out = sb.path("out");

  io::write_mask_pgm(sb.path("annulus.pgm"), annulus_mask(64, 64, 10.0, 24.0));
  CHECK(run("topology --mask " + sb.path("annulus.pgm") +
            " --flux-x 31 --flux-y 31 --out " + out) == 0);
  CHECK(slurp(out + "/verdict.txt").find("QuantizationApplies") == 0);
  CHECK(fs::exists(out + "/mask_witness.pgm"));

  io::write_mask_pgm(sb.path("plane.pgm"), open_plane_mask(32, 32));
  CHECK(run("topology --mask " + sb.path("plane.pgm") +
            " --flux-x 16 --flux-y 16 --out " + out) == 0);
  CHECK(slurp(out + "/verdict.txt").find("NoQuantization") == 0);

  CHECK(run("topology --mask " + sb.path("plane.pgm") +
            " --flux-x 99 --flux-y 0 --out " + out) == 2);
  CHECK(run("topology --mask " + sb.path("nothere.pgm") +
            " --flux-x 1 --flux-y 1 --out " + out) == 2);
}

TEST_CASE("cli: bad usage exits 2, version exits 0") {
  CHECK(run("--version") == 0);
  CHECK(run("frobnicate") == 2);
  CHECK(run("holonomy") == 2);  // missing required --path
}
