#pragma once

#include <string>
#include <vector>

#include "stfem/analysis.hpp"
#include "stfem/projection.hpp"
#include "stfem/spacetime.hpp"

namespace stfem {

/// Declarative description of one study over a (spatial level) x (temporal
/// level) grid. Spatial levels are n (squares per side, n = 4 * 2^level for
/// the reference tables); temporal levels are alpha with N^t = 5 * 2^alpha.
struct ExperimentConfig {
  Method method = Method::GP;
  ProjectionKind projection = ProjectionKind::RT1;
  double terminal_time = 1.4142135623730951;
  std::vector<int> spatial_levels{4};
  std::vector<int> temporal_levels{0};
  SeriesTruncation truncation{};
  QuadOrders quad{};
  SourceQuadrature source_quad{};
  std::string out_dir = "results";
  int threads = 1;
  bool iterative = false;
  long direct_unknown_cap = 300000;
  double nnz_budget = 5e8;
  double slice_time = -1.0;  // negative selects t = T
  int slice_resolution = 200;
  int slice_spatial_n = 8;
  int slice_temporal_alpha = 2;
  double c_inverse = 18.0;

  void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct CellResult {
  int n = 0;
  int alpha = 0;
  double h_x = 0.0, h_t = 0.0;
  long unknowns = 0;
  double l2 = 0.0, seminorm = 0.0;
  double interp_l2 = 0.0, interp_seminorm = 0.0;
  double solver_residual = 0.0;
  double truncation_bound = 0.0;
  double ratio = 0.0;
  bool predicted_stable = true;
  bool observed_stable = true;
  double seconds = 0.0;
};

struct StudyResult {
  std::vector<CellResult> cells;  // spatial-major: index = is * n_alpha + ia
  std::vector<std::string> files_written;
};

/// Convergence tables (seminorm.csv, l2.csv, verdicts.csv + meta.json).
StudyResult run_convergence(const ExperimentConfig& cfg);

/// CFL sharpness study (GP only): cfl.csv with
/// (h_t, h_x, ratio, predicted, observed) per cell + meta.json.
StudyResult run_cfl_study(const ExperimentConfig& cfg);

/// Interpolation error tables (interp_seminorm.csv, interp_l2.csv + meta.json).
StudyResult run_interp(const ExperimentConfig& cfg);

/// Terminal-slice magnitude dump (slice.csv "x,y,magnitude" + meta.json).
StudyResult run_slice(const ExperimentConfig& cfg);

/// Solve one grid cell (used by the runners and the acceptance suite).
CellResult solve_cell(const ExperimentConfig& cfg, int n, int alpha);

}  // namespace stfem
