#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stfem/common.hpp"
#include "stfem/experiment.hpp"

using namespace stfem;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config_text(
      "# comment\n"
      "method = GB\n"
      "projection = P0\n"
      "terminal_time = sqrt2\n"
      "spatial_levels = [1, 2]\n"
      "temporal_levels = [0]\n"
      "truncation_tol = 1e-9\n"
      "threads = 2\n");
  CHECK(cfg.method == Method::GB);
  CHECK(cfg.projection == ProjectionKind::P0);
  CHECK(cfg.terminal_time == doctest::Approx(1.41421356));
  CHECK(cfg.spatial_levels == std::vector<int>{1, 2});
  CHECK(cfg.truncation.tol == doctest::Approx(1e-9));
  CHECK(cfg.threads == 2);

  CHECK_THROWS_AS(parse_config_text("method = XX\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("unknown_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("spatial_levels = [1]\ntemporal_levels = []\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("spatial_levels = oops\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("tiny convergence run is deterministic and writes tables") {
  ExperimentConfig cfg;
  cfg.method = Method::GP;
  cfg.projection = ProjectionKind::RT1;
  cfg.spatial_levels = {1, 2};
  cfg.temporal_levels = {0};
  cfg.out_dir = (fs::temp_directory_path() / "stfem_test_conv").string();
  fs::remove_all(cfg.out_dir);

  const StudyResult r1 = run_convergence(cfg);
  REQUIRE(r1.cells.size() == 2);
  CHECK(r1.cells[0].solver_residual <= 1e-10);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "seminorm.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "l2.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "meta.json"));

  const std::string semi1 = slurp((fs::path(cfg.out_dir) / "seminorm.csv").string());
  const std::string l21 = slurp((fs::path(cfg.out_dir) / "l2.csv").string());
  const StudyResult r2 = run_convergence(cfg);
  CHECK(slurp((fs::path(cfg.out_dir) / "seminorm.csv").string()) == semi1);
  CHECK(slurp((fs::path(cfg.out_dir) / "l2.csv").string()) == l21);

  // sidecar carries the per-cell records
  const std::string meta = slurp((fs::path(cfg.out_dir) / "meta.json").string());
  CHECK(meta.find("solver_residual") != std::string::npos);
  CHECK(meta.find("truncation_bound") != std::string::npos);
  CHECK(meta.find("\"build\"") != std::string::npos);

  // threaded run produces identical tables
  ExperimentConfig threaded = cfg;
  threaded.threads = 2;
  run_convergence(threaded);
  CHECK(slurp((fs::path(cfg.out_dir) / "seminorm.csv").string()) == semi1);
  (void)r2;
}

TEST_CASE("cfl study writes predictions and observations") {
  ExperimentConfig cfg;
  cfg.method = Method::GP;
  cfg.projection = ProjectionKind::RT1;
  cfg.spatial_levels = {2};
  cfg.temporal_levels = {0};
  cfg.out_dir = (fs::temp_directory_path() / "stfem_test_cfl").string();
  fs::remove_all(cfg.out_dir);
  const StudyResult r = run_cfl_study(cfg);
  REQUIRE(r.cells.size() == 1);
  const std::string csv = slurp((fs::path(cfg.out_dir) / "cfl.csv").string());
  CHECK(csv.find("h_t,h_x,ratio,predicted,observed") == 0u);

  ExperimentConfig bad = cfg;
  bad.method = Method::GB;
  CHECK_THROWS_AS(run_cfl_study(bad), ConfigError);
}

TEST_CASE("interp study and slice dump") {
  ExperimentConfig cfg;
  cfg.spatial_levels = {2};
  cfg.temporal_levels = {0, 1};
  cfg.out_dir = (fs::temp_directory_path() / "stfem_test_interp").string();
  fs::remove_all(cfg.out_dir);
  const StudyResult r = run_interp(cfg);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].interp_seminorm > 0.0);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "interp_seminorm.csv"));

  ExperimentConfig scfg;
  scfg.method = Method::GP;
  scfg.projection = ProjectionKind::P0;
  scfg.slice_spatial_n = 2;
  scfg.slice_temporal_alpha = 0;
  scfg.slice_resolution = 10;
  scfg.out_dir = (fs::temp_directory_path() / "stfem_test_slice").string();
  fs::remove_all(scfg.out_dir);
  run_slice(scfg);
  const std::string csv = slurp((fs::path(scfg.out_dir) / "slice.csv").string());
  CHECK(csv.find("x,y,magnitude") == 0u);
  // header + 100 lattice lines
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
}

TEST_CASE("GP and GB agree on stable cells") {
  // both methods approximate the same solution; on CFL-stable grids the
  // seminorm errors differ by well under 15 percent
  for (auto [n, alpha] : {std::pair{2, 0}, {4, 0}}) {
    ExperimentConfig gp;
    gp.method = Method::GP;
    gp.projection = ProjectionKind::RT1;
    ExperimentConfig gb = gp;
    gb.method = Method::GB;
    const CellResult c_gp = solve_cell(gp, n, alpha);
    const CellResult c_gb = solve_cell(gb, n, alpha);
    REQUIRE(c_gp.observed_stable);
    CHECK(std::fabs(c_gp.seminorm - c_gb.seminorm) / c_gp.seminorm <= 0.15);
  }
}

TEST_CASE("resource guardrail refuses oversized GB assemblies") {
  ExperimentConfig cfg;
  cfg.method = Method::GB;
  cfg.spatial_levels = {2};
  cfg.temporal_levels = {0};
  cfg.nnz_budget = 10.0;  // deliberately tiny
  cfg.out_dir = (fs::temp_directory_path() / "stfem_test_budget").string();
  CHECK_THROWS_AS(run_convergence(cfg), ResourceError);
}

}  // TEST_SUITE
