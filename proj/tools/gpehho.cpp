#include "gpehho/error.hpp"
#include "gpehho/gradient_flow.hpp"
#include "gpehho/study.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

namespace {

enum ExitCode { ok = 0, failure = 1, invalid_config = 2, stagnation = 3, infeasible = 4 };

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool dump_mesh = false;
};

gpehho::ExperimentConfig load(const Options& o) {
  gpehho::ExperimentConfig c = gpehho::load_config(o.config);
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.has_seed) c.potential.seed = o.seed;
  return c;
}

void print_solve(const gpehho::SolveReport& r) {
  const gpehho::GroundState& s = r.result.state;
  std::printf("level %d  h %.6g  dofs %zu\n", r.level, r.h, r.dofs);
  std::printf("E = %.17g\nlambda = %.17g\niterations %d  residual %.3e\n", s.energy, s.lambda, s.iterations,
              s.residual);
  if (s.certificate)
    std::printf("certificate: sigma %.6g  h %.6g  slack %.6g (%s)\n", s.certificate->sigma, s.certificate->h,
                s.certificate->slack, s.certificate->valid() ? "valid" : "INVALID");
}

void print_convergence(const gpehho::ConvergenceStudy& s) {
  std::printf("reference: level %d, k %d, E %.17g, lambda %.17g\n", s.reference_level, s.reference_k,
              s.reference_energy, s.reference_lambda);
  std::printf("%5s %10s %12s %12s %12s %12s %7s %7s %7s\n", "level", "h", "err_L2rec", "err_H1rec", "err_E",
              "err_lam", "eocL2", "eocH1", "eocE");
  for (const auto& r : s.rows) {
    const auto e = [](const std::optional<double>& v) { return v ? *v : 0.0; };
    std::printf("%5d %10.4g %12.4e %12.4e %12.4e %12.4e %7.3f %7.3f %7.3f\n", r.level, r.h, r.err_l2_rec,
                r.err_h1_rec, r.err_energy, r.err_lambda, e(r.eoc_l2_rec), e(r.eoc_h1_rec), e(r.eoc_energy));
  }
}

void print_bounds(const gpehho::BoundStudy& s) {
  std::printf("E_upper %.17g\n", s.e_upper);
  std::printf("%5s %10s %10s %20s %12s %20s %12s\n", "level", "h", "sigma", "E_h^0", "slack", "E_ref", "gap");
  for (const auto& r : s.rows) {
    if (r.feasible)
      std::printf("%5d %10.4g %10.6f %20.15g %12.4e %20.15g %12.4e\n", r.level, r.h, r.sigma, r.energy, r.slack,
                  r.e_ref, r.gap);
    else
      std::printf("%5d %10.4g %10s\n", r.level, r.h, "infeasible");
  }
}

void print_mesh_info(const std::vector<gpehho::MeshInfoRow>& rows) {
  std::printf("%5s %10s %10s %10s %10s %12s %10s\n", "level", "vertices", "cells", "faces", "h", "max_diam", "dofs");
  for (const auto& r : rows)
    std::printf("%5d %10zu %10zu %10zu %10.4g %12.6g %10zu\n", r.level, r.vertices, r.cells, r.faces, r.h,
                r.max_diameter, r.dofs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HHO ground states of the Gross-Pitaevskii energy with guaranteed lower energy bounds"};
  app.require_subcommand(1);
  Options opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides output_dir)");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { opt.seed = s, opt.has_seed = true; }, "potential seed override");
    sub->add_flag("--dump-mesh", opt.dump_mesh, "write node and element files of the meshes used");
  };
  CLI::App* solve = app.add_subcommand("solve", "compute one ground state");
  CLI::App* convergence = app.add_subcommand("convergence", "errors and EOCs against a finer reference");
  CLI::App* bound = app.add_subcommand("lower-bound", "guaranteed lower energy bounds of the modified scheme");
  CLI::App* info = app.add_subcommand("mesh-info", "mesh statistics per level");
  for (CLI::App* sub : {solve, convergence, bound, info}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid_config;
  }

  try {
    const gpehho::ExperimentConfig config = load(opt);
    if (solve->parsed()) {
      print_solve(gpehho::run_solve(config, opt.dump_mesh));
    } else if (convergence->parsed()) {
      print_convergence(gpehho::run_convergence(config));
    } else if (bound->parsed()) {
      const gpehho::BoundStudy s = gpehho::run_lowerbound(config);
      print_bounds(s);
      for (const auto& r : s.rows)
        if (r.feasible && r.slack < 0.0) {
          std::fprintf(stderr, "error: negative certificate slack at level %d\n", r.level);
          return failure;
        }
    } else if (info->parsed()) {
      print_mesh_info(gpehho::run_mesh_info(config, opt.dump_mesh));
    }
    std::printf("outputs written to %s\n", config.output_dir.string().c_str());
    return ok;
  } catch (const gpehho::StagnationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return stagnation;
  } catch (const gpehho::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case gpehho::ErrorKind::config:
      case gpehho::ErrorKind::invalid_grid: return invalid_config;
      case gpehho::ErrorKind::stagnation: return stagnation;
      case gpehho::ErrorKind::no_admissible_sigma: return infeasible;
      default: return failure;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return failure;
  }
}
