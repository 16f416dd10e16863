#pragma once

#include "gpehho/hho.hpp"
#include "gpehho/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gpehho {

enum class Mode { standard, modified };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

struct GpProblem {
  Rect domain{-8.0, 8.0, -8.0, 8.0};
  double kappa = 0.0;
  Potential potential = Potential::zero();
  /// How a grid potential is reduced on mesh cells that overlap several grid cells.
  ProjectionMode cell_reduction = ProjectionMode::min;
  /// Extra quadrature degree for non-polynomial potentials.
  int potential_oversampling = 4;
  Mode mode = Mode::standard;
  int k = 1;
  double sigma = 1.0;
};

/// Checkable hypothesis of the guaranteed lower energy bound.
struct LowerBoundCertificate {
  double h = 0.0;
  double sigma = 0.0;
  double energy = 0.0;
  int d = 2;
  double c_tr = 0.0;
  double slack = 0.0;

  bool valid() const { return slack >= 0.0; }
};

/// C_tr = 1/pi^2 + 2/(d pi).
double trace_constant(int d);

LowerBoundCertificate certify(double h, double sigma, double energy, int d = 2);

/// Largest admissible sigma for the given upper energy estimate, times `safety`.
double auto_sigma(double h, double energy_upper, int d = 2, double safety = 1.0);

struct GroundState {
  HybridVector u;
  double energy = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double energy_decrement = 0.0;
  std::optional<LowerBoundCertificate> certificate;
};

/// The discrete Gross-Pitaevskii energy on one HHO space: forms, gradient,
/// metric blocks and residuals. The potential enters as per-cell matrices
/// (V phi_i, phi_j)_T, or per-cell constants for piecewise-constant V.
class GpDiscretization {
public:
  GpDiscretization(const TriMesh& mesh, const GpProblem& problem, Exec exec = Exec::parallel);

  const HhoSpace& space() const { return space_; }
  const GpProblem& problem() const { return problem_; }
  Exec exec() const { return exec_; }
  int potential_quadrature_degree() const { return potential_degree_; }
  bool potential_is_cellwise_constant() const { return !v_const_.empty(); }
  /// Per-cell constants (only for piecewise-constant potentials).
  const std::vector<double>& potential_constants() const { return v_const_; }

  /// (V v_T, v_T).
  double potential_term(const HybridVector& v) const;
  /// a_h(v, v) + (V v_T, v_T).
  double quadratic(const HybridVector& v) const;
  /// Mode-appropriate quartic: (|v_T|^2 v_T, v_T) or ((Pi0 v_T)^2 v_T, v_T).
  double quartic(const HybridVector& v) const;
  double quartic_standard(const HybridVector& v) const;
  double quartic_modified(const HybridVector& v) const;
  /// E_h or E_h^0.
  double energy(const HybridVector& v) const;
  /// Rounding level of relative_residual at v: machine epsilon times the
  /// residual evaluated with all operator entries and coefficients replaced
  /// by their absolute values.
  double residual_floor(const HybridVector& v, double lambda) const;
  /// E(v) - E(u) for bulk-normalized u and v, expanded around u with
  /// d = v - u: (r, d) - lambda/2 |d_T|^2 + the exact second and higher order
  /// terms, where r = E'(u) - lambda M u. The normalization identity
  /// (u_T, d_T) = -|d_T|^2 / 2 removes the rounding noise of the constraint,
  /// so the sign stays meaningful when both energies agree to machine precision.
  double energy_change(const HybridVector& u, const Eigen::VectorXd& residual, double lambda,
                       const HybridVector& v) const;
  /// Derivative of the energy: the dual vector (A + M_V) v + kappa N(v).
  Eigen::VectorXd gradient(const HybridVector& v) const;
  /// lambda = v^T gradient(v) for a normalized v.
  double rayleigh(const HybridVector& v) const;
  /// 2 E + (kappa/2) Q.
  double lambda_from_state(const HybridVector& v) const;
  /// r = gradient(v) - lambda M v; throws invalid-state unless ||v_T|| = 1.
  Eigen::VectorXd eigenvalue_residual(const HybridVector& v, double lambda) const;
  /// ||r|| / (lambda ||M v||).
  double relative_residual(const HybridVector& v, double lambda) const;

  /// Cell block of the metric: (K_T + S_T)_cc + (V phi, phi)_T + kappa W_T(u).
  Eigen::MatrixXd metric_cell_block(std::size_t cell, const HybridVector& u) const;
  /// (V phi_i, phi_j)_T.
  Eigen::MatrixXd potential_block(std::size_t cell) const;

  /// W_T(u) = (|u_T|^2 phi_i, phi_j)_T (standard). In modified mode the
  /// frozen form of n_h, u0^2/(2|T|) I + |c|^2/(2|T|) e0 e0^T, so that
  /// W_T(u) u_T reproduces the modified nonlinear term.
  Eigen::MatrixXd nonlinear_weight(std::size_t cell, const Eigen::VectorXd& u_cell) const;

private:
  Eigen::VectorXd cell_cubic(std::size_t cell, const Eigen::VectorXd& c) const;

  GpProblem problem_;
  HhoSpace space_;
  Exec exec_;
  int potential_degree_ = 0;
  std::vector<double> v_const_;
  /// nc x (nc * num_cells) when V is not cellwise constant.
  Eigen::MatrixXd v_blocks_;
  CellTabulation quartic_tab_;
};

}  // namespace gpehho
