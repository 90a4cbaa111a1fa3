// Experiment driver: reproduces the convergence tables, the CFL sharpness
// study, the interpolation baselines and the terminal-slice dumps from
// declarative configs.
//
// Exit codes: 0 success, 2 config error, 3 resource refusal, 4 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "stfem/common.hpp"
#include "stfem/experiment.hpp"
#include "stfem/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool iterative = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file")->required();
  cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
  cmd->add_option("--threads", flags.threads, "cells solved in parallel");
  cmd->add_flag("--iterative", flags.iterative, "use the Krylov path instead of direct solves");
}

stfem::ExperimentConfig load_config(const CommonFlags& flags) {
  stfem::ExperimentConfig cfg = stfem::parse_config_file(flags.config_path);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.threads > 0) cfg.threads = flags.threads;
  if (flags.iterative) cfg.iterative = true;
  cfg.validate();
  return cfg;
}

void print_files(const stfem::StudyResult& result) {
  for (const auto& f : result.files_written) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conforming space-time FEM studies for the 2D vectorial wave equation"};
  app.set_version_flag("--version", std::string(stfem::build_version));
  app.require_subcommand(1);

  CommonFlags conv_flags, cfl_flags, interp_flags, slice_flags;
  CLI::App* conv = app.add_subcommand("convergence", "error tables over a (n, alpha) grid");
  add_common(conv, conv_flags);
  CLI::App* cfl = app.add_subcommand("cfl-study", "CFL prediction vs observed stability (GP)");
  add_common(cfl, cfl_flags);
  CLI::App* interp = app.add_subcommand("interp", "interpolation error tables");
  add_common(interp, interp_flags);
  CLI::App* slice = app.add_subcommand("slice", "terminal-time |A - A_h| lattice dump");
  add_common(slice, slice_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) print_files(stfem::run_convergence(load_config(conv_flags)));
    if (cfl->parsed()) print_files(stfem::run_cfl_study(load_config(cfl_flags)));
    if (interp->parsed()) print_files(stfem::run_interp(load_config(interp_flags)));
    if (slice->parsed()) print_files(stfem::run_slice(load_config(slice_flags)));
  } catch (const stfem::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const stfem::ResourceError& e) {
    std::fprintf(stderr, "resource refusal: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  }
  return 0;
}
