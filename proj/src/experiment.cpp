#include "stfem/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "stfem/common.hpp"
#include "stfem/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace stfem {

void ExperimentConfig::validate() const {
  if (spatial_levels.empty() || temporal_levels.empty())
    throw ConfigError("config: spatial_levels and temporal_levels must be non-empty");
  for (int n : spatial_levels)
    if (n < 1 || n > 256) throw ConfigError("config: spatial level n out of [1,256]");
  for (int a : temporal_levels)
    if (a < 0 || a > 8) throw ConfigError("config: temporal level alpha out of [0,8]");
  if (!(terminal_time > 0.0)) throw ConfigError("config: terminal_time must be positive");
  if (threads < 1 || threads > 64) throw ConfigError("config: threads out of [1,64]");
  if (slice_resolution < 2 || slice_resolution > 4096)
    throw ConfigError("config: slice_resolution out of [2,4096]");
  try {
    truncation.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError("config: key '" + key + "' expects a list [a, b, ...]");
  std::vector<int> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_number(key, item)));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));

    if (key == "method") {
      if (value == "GP") cfg.method = Method::GP;
      else if (value == "GB") cfg.method = Method::GB;
      else throw ConfigError("config: method must be GP or GB");
    } else if (key == "projection") {
      if (value == "P0") cfg.projection = ProjectionKind::P0;
      else if (value == "RT1") cfg.projection = ProjectionKind::RT1;
      else throw ConfigError("config: projection must be P0 or RT1");
    } else if (key == "terminal_time") {
      if (value == "sqrt2") cfg.terminal_time = std::sqrt(2.0);
      else if (value == "threehalves") cfg.terminal_time = 1.5;
      else cfg.terminal_time = parse_number(key, value);
    } else if (key == "spatial_levels") {
      cfg.spatial_levels = parse_int_list(key, value);
    } else if (key == "temporal_levels") {
      cfg.temporal_levels = parse_int_list(key, value);
    } else if (key == "truncation_tol") {
      cfg.truncation.mode = SeriesTruncation::Mode::tolerance;
      cfg.truncation.tol = parse_number(key, value);
    } else if (key == "truncation_max_terms") {
      cfg.truncation.terms = static_cast<int>(parse_number(key, value));
    } else if (key == "truncation_fixed_terms") {
      cfg.truncation.mode = SeriesTruncation::Mode::fixed_terms;
      cfg.truncation.terms = static_cast<int>(parse_number(key, value));
    } else if (key == "truncation_acceleration") {
      cfg.truncation.acceleration = parse_bool(key, value);
    } else if (key == "quad_temporal") {
      cfg.quad.temporal = static_cast<int>(parse_number(key, value));
    } else if (key == "quad_spatial_subdiv") {
      cfg.quad.spatial_subdiv = static_cast<int>(parse_number(key, value));
    } else if (key == "source_quad_temporal") {
      cfg.source_quad.temporal_points = static_cast<int>(parse_number(key, value));
    } else if (key == "source_quad_subdiv") {
      cfg.source_quad.spatial_subdiv = static_cast<int>(parse_number(key, value));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_number(key, value));
    } else if (key == "iterative") {
      cfg.iterative = parse_bool(key, value);
    } else if (key == "direct_unknown_cap") {
      cfg.direct_unknown_cap = static_cast<long>(parse_number(key, value));
    } else if (key == "nnz_budget") {
      cfg.nnz_budget = parse_number(key, value);
    } else if (key == "slice_time") {
      cfg.slice_time = parse_number(key, value);
    } else if (key == "slice_resolution") {
      cfg.slice_resolution = static_cast<int>(parse_number(key, value));
    } else if (key == "slice_spatial_n") {
      cfg.slice_spatial_n = static_cast<int>(parse_number(key, value));
    } else if (key == "slice_temporal_alpha") {
      cfg.slice_temporal_alpha = static_cast<int>(parse_number(key, value));
    } else if (key == "c_inverse") {
      cfg.c_inverse = parse_number(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string table_csv(const std::vector<double>& hx, const std::vector<double>& ht,
                      const std::vector<double>& cells) {
  std::ostringstream out;
  out << "h_x\\h_t";
  for (double h : ht) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.4f", h);
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < hx.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", hx[i]);
    out << buf;
    for (std::size_t j = 0; j < ht.size(); ++j) out << ',' << format_cell(cells[i * ht.size() + j]);
    out << '\n';
  }
  return out.str();
}

json cell_json(const CellResult& c) {
  return json{{"n", c.n},
              {"alpha", c.alpha},
              {"h_x", c.h_x},
              {"h_t", c.h_t},
              {"unknowns", c.unknowns},
              {"l2", c.l2},
              {"seminorm", c.seminorm},
              {"interp_l2", c.interp_l2},
              {"interp_seminorm", c.interp_seminorm},
              {"solver_residual", c.solver_residual},
              {"truncation_bound", c.truncation_bound},
              {"ratio", c.ratio},
              {"predicted_stable", c.predicted_stable},
              {"observed_stable", c.observed_stable},
              {"seconds", c.seconds}};
}

json config_json(const ExperimentConfig& cfg) {
  return json{{"method", cfg.method == Method::GP ? "GP" : "GB"},
              {"projection", cfg.projection == ProjectionKind::P0 ? "P0" : "RT1"},
              {"terminal_time", cfg.terminal_time},
              {"spatial_levels", cfg.spatial_levels},
              {"temporal_levels", cfg.temporal_levels},
              {"truncation_tol", cfg.truncation.tol},
              {"truncation_terms", cfg.truncation.terms},
              {"truncation_acceleration", cfg.truncation.acceleration},
              {"quad_temporal", cfg.quad.temporal},
              {"quad_spatial_subdiv", cfg.quad.spatial_subdiv},
              {"iterative", cfg.iterative},
              {"threads", cfg.threads}};
}

void write_meta(const ExperimentConfig& cfg, const std::string& study,
                const std::vector<CellResult>& cells, StudyResult& result) {
  json meta;
  meta["build"] = build_version;
  meta["study"] = study;
  meta["config"] = config_json(cfg);
  meta["cells"] = json::array();
  for (const auto& c : cells) meta["cells"].push_back(cell_json(c));
  const std::string path = (fs::path(cfg.out_dir) / "meta.json").string();
  write_atomic(path, meta.dump(2) + "\n");
  result.files_written.push_back(path);
}

// Serial per-cell work; cells run in parallel at the study level.
CellResult convergence_cell(const ExperimentConfig& cfg, int n, int alpha) {
  const auto t0 = std::chrono::steady_clock::now();
  CellResult cell;
  cell.n = n;
  cell.alpha = alpha;

  const TriMesh xmesh = build_unit_square_mesh(n);
  const TemporalMesh tmesh = build_uniform_temporal_mesh(cfg.terminal_time, alpha);
  const MaterialData mat = MaterialData::identity(xmesh);
  const ManufacturedProblem prob = manufactured();
  cell.h_x = xmesh.h_max();
  cell.h_t = tmesh.h_max();

  const SpaceTimeOperator op = assemble_operator(cfg.method, tmesh, xmesh, mat, cfg.truncation);
  cell.unknowns = op.unknowns();
  cell.truncation_bound = op.hilbert_bound;

  if (cfg.method == Method::GB && !cfg.iterative) {
    const SparseMat pattern = op.x_mass + op.x_curl;
    const double nnz_spatial = static_cast<double>(pattern.nonZeros());
    const double est = nnz_spatial * double(op.nt) * double(op.nt);
    if (est > cfg.nnz_budget)
      throw ResourceError("assembled GB matrix estimate " + std::to_string(est) +
                          " nonzeros exceeds the budget; rerun with --iterative");
  }

  const ProjectedSource src =
      cfg.projection == ProjectionKind::P0
          ? project_P0(prob.source, tmesh, xmesh, cfg.source_quad)
          : project_RT1(prob.source, tmesh, xmesh, cfg.source_quad);
  const Eigen::MatrixXd load = build_load(src, cfg.method, tmesh, xmesh, cfg.truncation);

  SolveInfo sinfo;
  SpaceTimeCoefficients coeffs;
  if (cfg.method == Method::GP && !cfg.iterative) {
    coeffs = march_two_step(op, load, &sinfo);
  } else {
    SolveOptions opts;
    opts.force_iterative = cfg.iterative;
    opts.direct_unknown_cap = cfg.direct_unknown_cap;
    coeffs = solve(op, load, opts, &sinfo);
  }
  cell.solver_residual = sinfo.residual;

  const ErrorReport err = error_norms(coeffs, prob, tmesh, xmesh, cfg.quad);
  const SpaceTimeCoefficients interp = interpolate_spacetime(prob, tmesh, xmesh);
  const ErrorReport ierr = error_norms(interp, prob, tmesh, xmesh, cfg.quad);
  cell.l2 = err.l2_error;
  cell.seminorm = err.seminorm_error;
  cell.interp_l2 = ierr.l2_error;
  cell.interp_seminorm = ierr.seminorm_error;

  const CflPrediction pred = cfl_check(tmesh, xmesh, cfg.c_inverse);
  cell.ratio = pred.ratio;
  cell.predicted_stable = pred.predicted_stable;
  const StabilityVerdict verdict =
      classify_stability(err.seminorm_error, ierr.seminorm_error, tmesh, xmesh, cfg.c_inverse);
  cell.observed_stable = verdict.classification == StabilityVerdict::Classification::stable;

  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

std::vector<CellResult> run_cells(const ExperimentConfig& cfg,
                                  const std::function<CellResult(int, int)>& work) {
  const int ns = static_cast<int>(cfg.spatial_levels.size());
  const int na = static_cast<int>(cfg.temporal_levels.size());
  std::vector<CellResult> cells(ns * na);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= ns * na) return;
      try {
        cells[idx] = work(cfg.spatial_levels[idx / na], cfg.temporal_levels[idx % na]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (cfg.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return cells;
}

std::pair<std::vector<double>, std::vector<double>> grid_h(const ExperimentConfig& cfg) {
  std::vector<double> hx, ht;
  for (int n : cfg.spatial_levels) hx.push_back(std::sqrt(1.0 / (2.0 * n * n)));
  for (int a : cfg.temporal_levels) ht.push_back(cfg.terminal_time / (5.0 * (1 << a)));
  return {hx, ht};
}

}  // namespace

CellResult solve_cell(const ExperimentConfig& cfg, int n, int alpha) {
  return convergence_cell(cfg, n, alpha);
}

StudyResult run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  StudyResult result;
  result.cells = run_cells(cfg, [&](int n, int a) { return convergence_cell(cfg, n, a); });

  auto [hx, ht] = grid_h(cfg);
  std::vector<double> semi, l2, verdicts;
  for (const auto& c : result.cells) {
    semi.push_back(c.seminorm);
    l2.push_back(c.l2);
    verdicts.push_back(c.observed_stable ? 1.0 : 0.0);
  }
  const auto dir = fs::path(cfg.out_dir);
  for (auto [name, data] :
       {std::pair{"seminorm.csv", &semi}, {"l2.csv", &l2}, {"verdicts.csv", &verdicts}}) {
    const std::string path = (dir / name).string();
    write_atomic(path, table_csv(hx, ht, *data));
    result.files_written.push_back(path);
  }
  write_meta(cfg, "convergence", result.cells, result);
  return result;
}

StudyResult run_cfl_study(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.method != Method::GP)
    throw ConfigError("cfl-study: requires method = GP (the CFL condition is a GP property)");
  fs::create_directories(cfg.out_dir);
  StudyResult result;
  result.cells = run_cells(cfg, [&](int n, int a) { return convergence_cell(cfg, n, a); });

  std::ostringstream out;
  out << "h_t,h_x,ratio,predicted,observed\n";
  for (const auto& c : result.cells) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%s,%s\n", c.h_t, c.h_x, c.ratio,
                  c.predicted_stable ? "stable" : "unstable",
                  c.observed_stable ? "stable" : "unstable");
    out << buf;
  }
  const std::string path = (fs::path(cfg.out_dir) / "cfl.csv").string();
  write_atomic(path, out.str());
  result.files_written.push_back(path);
  write_meta(cfg, "cfl-study", result.cells, result);
  return result;
}

StudyResult run_interp(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  StudyResult result;
  result.cells = run_cells(cfg, [&](int n, int alpha) {
    const auto t0 = std::chrono::steady_clock::now();
    CellResult cell;
    cell.n = n;
    cell.alpha = alpha;
    const TriMesh xmesh = build_unit_square_mesh(n);
    const TemporalMesh tmesh = build_uniform_temporal_mesh(cfg.terminal_time, alpha);
    const ManufacturedProblem prob = manufactured();
    cell.h_x = xmesh.h_max();
    cell.h_t = tmesh.h_max();
    const SpaceTimeCoefficients interp = interpolate_spacetime(prob, tmesh, xmesh);
    const ErrorReport ierr = error_norms(interp, prob, tmesh, xmesh, cfg.quad);
    cell.interp_l2 = cell.l2 = ierr.l2_error;
    cell.interp_seminorm = cell.seminorm = ierr.seminorm_error;
    cell.unknowns = static_cast<long>(ierr.nx_interior) * ierr.nt;
    const CflPrediction pred = cfl_check(tmesh, xmesh, cfg.c_inverse);
    cell.ratio = pred.ratio;
    cell.predicted_stable = pred.predicted_stable;
    cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cell;
  });

  auto [hx, ht] = grid_h(cfg);
  std::vector<double> semi, l2;
  for (const auto& c : result.cells) {
    semi.push_back(c.seminorm);
    l2.push_back(c.l2);
  }
  const auto dir = fs::path(cfg.out_dir);
  for (auto [name, data] :
       {std::pair{"interp_seminorm.csv", &semi}, {"interp_l2.csv", &l2}}) {
    const std::string path = (dir / name).string();
    write_atomic(path, table_csv(hx, ht, *data));
    result.files_written.push_back(path);
  }
  write_meta(cfg, "interp", result.cells, result);
  return result;
}

StudyResult run_slice(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);

  ExperimentConfig cell_cfg = cfg;
  cell_cfg.spatial_levels = {cfg.slice_spatial_n};
  cell_cfg.temporal_levels = {cfg.slice_temporal_alpha};

  const TriMesh xmesh = build_unit_square_mesh(cfg.slice_spatial_n);
  const TemporalMesh tmesh =
      build_uniform_temporal_mesh(cfg.terminal_time, cfg.slice_temporal_alpha);
  const MaterialData mat = MaterialData::identity(xmesh);
  const ManufacturedProblem prob = manufactured();
  const SpaceTimeOperator op =
      assemble_operator(cfg.method, tmesh, xmesh, mat, cfg.truncation);
  const ProjectedSource src =
      cfg.projection == ProjectionKind::P0
          ? project_P0(prob.source, tmesh, xmesh, cfg.source_quad)
          : project_RT1(prob.source, tmesh, xmesh, cfg.source_quad);
  const Eigen::MatrixXd load = build_load(src, cfg.method, tmesh, xmesh, cfg.truncation);
  SolveInfo sinfo;
  SpaceTimeCoefficients coeffs;
  if (cfg.method == Method::GP && !cfg.iterative)
    coeffs = march_two_step(op, load, &sinfo);
  else
    coeffs = solve(op, load, {}, &sinfo);

  const double t = cfg.slice_time < 0.0 ? cfg.terminal_time : cfg.slice_time;
  const SliceField field = slice_difference(coeffs, prob, tmesh, xmesh, t, cfg.slice_resolution);

  std::ostringstream out;
  out << "x,y,magnitude\n";
  for (std::size_t i = 0; i < field.x.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.8f,%.8f,%.10e\n", field.x[i], field.y[i],
                  field.magnitude[i]);
    out << buf;
  }
  StudyResult result;
  const std::string path = (fs::path(cfg.out_dir) / "slice.csv").string();
  write_atomic(path, out.str());
  result.files_written.push_back(path);

  CellResult cell;
  cell.n = cfg.slice_spatial_n;
  cell.alpha = cfg.slice_temporal_alpha;
  cell.h_x = xmesh.h_max();
  cell.h_t = tmesh.h_max();
  cell.solver_residual = sinfo.residual;
  cell.unknowns = op.unknowns();
  result.cells.push_back(cell);
  write_meta(cfg, "slice", result.cells, result);
  return result;
}

}  // namespace stfem
