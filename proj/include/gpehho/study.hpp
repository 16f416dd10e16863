#pragma once

#include "gpehho/gpe.hpp"
#include "gpehho/gradient_flow.hpp"
#include "gpehho/mesh.hpp"
#include "gpehho/potential.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gpehho {

enum class EUpperSource { analytic, reference_run };

/// Which mesh size enters the lower-bound certificate.
enum class HConvention { square, diameter };

struct ProjectionSpec {
  double cell_size = 0.25;
  ProjectionMode mode = ProjectionMode::min;
};

struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  /// Grid cell size of the disorder potential.
  double cell_size = 1.0;
  std::uint64_t seed = 0;
  /// JSON potential table, relative paths resolved against the config file.
  std::filesystem::path table_path;
  /// Optional piecewise-constant projection applied before discretization.
  std::optional<ProjectionSpec> projection;
  /// Sample count per direction for sampled minima.
  int min_samples = 32;
};

struct ExperimentConfig {
  Rect domain{-8.0, 8.0, -8.0, 8.0};
  PotentialSpec potential;
  double kappa = 0.0;
  Mode mode = Mode::standard;
  int k = 1;
  /// Empty means "auto" (lower-bound pipeline only).
  std::optional<double> sigma = 1.0;
  EUpperSource e_upper_source = EUpperSource::reference_run;
  double e_upper_value = 0.0;
  /// Relative margin added to a reference-run energy.
  double e_upper_margin = 0.01;
  double sigma_safety = 1.0;
  HConvention h_convention = HConvention::square;
  int level_min = 3;
  int level_max = 3;
  int reference_extra_levels = 2;
  /// Reference degree; defaults to k + 1.
  std::optional<int> reference_k;
  int potential_oversampling = 4;
  FlowOptions solver;
  std::filesystem::path output_dir = "out";

  int ref_k() const { return reference_k.value_or(k + 1); }
  /// Throws config errors on inconsistent settings.
  void validate() const;
};

/// Parses a config document; unknown keys are rejected. Relative table
/// paths are resolved against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& file);

Potential build_potential(const ExperimentConfig& config);
GpProblem make_problem(const ExperimentConfig& config, const Potential& potential, Mode mode, int k, double sigma);

/// Mesh size entering the certificate.
double certificate_h(const TriMesh& mesh, HConvention convention);

struct SolveReport {
  int level = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  FlowResult result;
};

/// Ground state at config.level_max; writes summary.json and trace.csv.
/// On stagnation the trace is written before the error propagates.
SolveReport run_solve(const ExperimentConfig& config, bool dump_mesh = false);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  double energy = 0.0;
  double lambda = 0.0;
  /// Mode-appropriate quartic term, so that lambda = 2 E + kappa / 2 * quartic.
  double quartic = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double err_l2_bulk = 0.0;
  double err_l2_rec = 0.0;
  double err_h1_rec = 0.0;
  double err_energy = 0.0;
  double err_lambda = 0.0;
  std::optional<double> eoc_l2_bulk, eoc_l2_rec, eoc_h1_rec, eoc_energy, eoc_lambda;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  int reference_level = 0;
  int reference_k = 0;
  double reference_energy = 0.0;
  double reference_lambda = 0.0;
};

/// log2(coarse / fine), empty unless both are positive.
std::optional<double> eoc(double coarse, double fine);
void fill_eoc(std::vector<ConvergenceRow>& rows);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

/// Errors against an in-family reference two levels finer; writes
/// convergence.csv, convergence.svg and summary.json.
ConvergenceStudy run_convergence(const ExperimentConfig& config);

struct BoundRow {
  int level = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  bool feasible = false;
  double sigma = 0.0;
  double c_tr = 0.0;
  double energy = 0.0;
  double lambda = 0.0;
  /// Modified quartic, so that lambda = 2 E + kappa / 2 * quartic.
  double quartic = 0.0;
  double slack = 0.0;
  double e_ref = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct BoundStudy {
  std::vector<BoundRow> rows;
  double e_upper = 0.0;
};

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

/// Modified-scheme energies with automatic sigma per level; writes
/// bounds.csv, bounds.svg and summary.json. Throws no-admissible-sigma
/// (after writing the outputs) when no level admits a sigma.
BoundStudy run_lowerbound(const ExperimentConfig& config);

struct MeshInfoRow {
  int level = 0;
  std::size_t vertices = 0;
  std::size_t cells = 0;
  std::size_t faces = 0;
  std::size_t interior_faces = 0;
  double h = 0.0;
  double max_diameter = 0.0;
  std::size_t dofs = 0;
};

/// Mesh statistics for every configured level; writes summary.json.
std::vector<MeshInfoRow> run_mesh_info(const ExperimentConfig& config, bool dump_mesh = false);

}  // namespace gpehho
