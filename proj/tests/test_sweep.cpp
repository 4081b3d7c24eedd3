#include "fhn/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace fhn;
namespace fs = std::filesystem;

namespace {

SweepSpec small_spec() {
  return parse_sweep_spec(
      "# small grid\n"
      "omega_min = 0.015\nomega_max = 0.03\nomega_points = 4\n"
      "E_min = 0.45\nE_max = 0.55\nE_points = 3\n"
      "checkpoint_every = 5\n");
}

fs::path scratch_dir(const char* name) {
  const fs::path d = fs::temp_directory_path() /
                     ("fhn_sweep_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("axis ranges") {
  const AxisRange a{0.01, 0.04, 0.01};
  CHECK(a.size() == 4);
  CHECK(a.values().back() == doctest::Approx(0.04));
  const auto b = AxisRange::with_count(0.4, 0.55, 20);
  CHECK(b.size() == 20);
  CHECK(b.values().front() == 0.4);
  CHECK(b.values().back() == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(AxisRange::with_count(0.3, 0.3, 1).size() == 1);
  CHECK_THROWS_AS((AxisRange{0.04, 0.01, 0.01}.validate("omega")), Error);
  CHECK_THROWS_AS((AxisRange{0.01, 0.04, 0.0}.validate("omega")), Error);
}

TEST_CASE("spec parsing") {
  const auto s = small_spec();
  CHECK(s.omega.size() == 4);
  CHECK(s.e.size() == 3);
  CHECK(s.cell_count() == 12);
  CHECK(s.metrics == 0xFu);

  auto t = s;
  t.workers = 8;
  CHECK(t.hash() == s.hash());
  t.params.eps = 0.081;
  CHECK(t.hash() != s.hash());

  const auto m = parse_sweep_spec("omega_min=0.01\nomega_max=0.02\nomega_step=0.01\n"
                                  "E_min=0.4\nE_max=0.4\nE_step=0.1\nmetrics = spike_count, l2\n");
  CHECK(m.wants(Metric::SpikeCount));
  CHECK(m.wants(Metric::L2));
  CHECK_FALSE(m.wants(Metric::EstCount));

  auto kind_of = [](const std::string& text) {
    try {
      parse_sweep_spec(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind_of("bogus = 1\n") == ErrorKind::ConfigError);
  CHECK(kind_of("omega_min = x\n") == ErrorKind::ConfigError);
  CHECK(kind_of("omega_min 0.1\n") == ErrorKind::ConfigError);
  CHECK(kind_of("omega_min = 0.01\nomega_max = 0.02\nomega_step = 0.01\n") ==
        ErrorKind::ConfigError);
  CHECK(kind_of("omega_min=0.01\nomega_max=0.02\nomega_step=0.01\n"
                "E_min=0.4\nE_max=0.5\nE_step=0.1\nmetrics=volume\n") == ErrorKind::ConfigError);
  CHECK_THROWS_AS(load_sweep_spec("/nonexistent/spec.txt"), Error);
}

TEST_CASE("1x1 sweep equals a single cell run") {
  auto spec = small_spec();
  spec.omega = AxisRange::with_count(0.0149354, 0.0149354, 1);
  spec.e = AxisRange::with_count(0.55, 0.55, 1);
  const auto grid = run_sweep(spec);
  REQUIRE(grid.cells.size() == 1);
  const auto direct = run_cell(spec, 0.0149354, 0.55);
  CHECK(grid.cells[0] == direct);
  CHECK(direct.spike_count == 3);
  CHECK(direct.region == "II");
  CHECK(direct.est_count == 3);
}

TEST_CASE("determinism across worker counts") {
  auto spec = small_spec();
  spec.workers = 1;
  const std::string one = grid_csv(run_sweep(spec));
  spec.workers = 4;
  const std::string four = grid_csv(run_sweep(spec));
  CHECK(one == four);
  CHECK(one.rfind(kGridHeader, 0) == 0);
}

TEST_CASE("resume from checkpoint is byte-identical") {
  const auto dir = scratch_dir("resume");
  auto spec = small_spec();
  spec.workers = 2;

  SweepOptions full;
  full.output = dir / "full.csv";
  run_sweep(spec, full);
  CHECK(fs::exists(dir / "full.csv.meta.json"));

  SweepOptions part;
  part.checkpoint = dir / "ck.log";
  part.output = dir / "resumed.csv";
  part.stop_after = 5;
  const auto g1 = run_sweep(spec, part);
  CHECK_FALSE(g1.complete());
  CHECK(g1.pending() == 7);
  CHECK_FALSE(fs::exists(dir / "resumed.csv"));
  CHECK(fs::exists(dir / "ck.log"));

  // Simulate a torn write at the end of the log.
  {
    std::ofstream ck(dir / "ck.log", std::ios::app);
    ck << "7,0.025,0.5,o";
  }
  part.stop_after.reset();
  const auto g2 = run_sweep(spec, part);
  CHECK(g2.complete());
  CHECK(slurp(dir / "resumed.csv") == slurp(dir / "full.csv"));
  CHECK_FALSE(fs::exists(dir / "ck.log"));

  // A log from another spec is rejected.
  part.stop_after = 2;
  run_sweep(spec, part);
  auto other = spec;
  other.f_burst = 30.0;
  part.stop_after.reset();
  CHECK_THROWS_AS(run_sweep(other, part), Error);
  fs::remove_all(dir);
}

TEST_CASE("grid CSV round trip") {
  const auto dir = scratch_dir("csv");
  const auto spec = small_spec();
  auto grid = run_sweep(spec);
  grid.cells[3].status = "MaxStepsExceeded";
  write_grid_csv(grid, dir / "g.csv");
  const auto back = read_grid_csv(dir / "g.csv");
  CHECK(back.omegas == grid.omegas);
  CHECK(back.es == grid.es);
  CHECK(grid_csv(back) == grid_csv(grid));
  CHECK_FALSE(back.cells[3].ok());

  const auto field = metric_field(back, Metric::SpikeCount);
  CHECK(field.valid[3] == 0);
  CHECK(field.valid[0] == 1);

  auto incomplete = grid;
  incomplete.cells[5].done = false;
  CHECK_THROWS_AS(write_grid_csv(incomplete, dir / "x.csv"), Error);
  CHECK_THROWS_AS(extract_boundaries(incomplete), Error);
  CHECK_THROWS_AS(parse_grid_csv("omega,E\n1,2\n"), Error);
  fs::remove_all(dir);
}

TEST_CASE("boundaries and level sets of a synthetic grid") {
  SweepGrid g;
  g.omegas = {0.01, 0.02, 0.03, 0.04};
  g.es = {0.4, 0.5, 0.6};
  for (double e : g.es)
    for (double w : g.omegas) {
      CellRecord c;
      c.omega = w;
      c.e = e;
      c.status = "ok";
      c.spike_count = w < 0.025 ? 2 : 1;
      c.l2 = 1.0;
      c.done = true;
      g.cells.push_back(c);
    }
  const auto b = extract_boundaries(g);
  REQUIRE(b.size() == 1);
  CHECK(b[0].level == 1.5);
  CHECK(l2_levelsets(g).empty());
  CHECK(l2_levelsets(g, 0).empty());
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
