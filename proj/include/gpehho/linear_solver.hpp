#pragma once

#include "gpehho/hho.hpp"

#include <Eigen/CholmodSupport>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gpehho {

/// direct: CHOLMOD on the full hybrid system.
/// condensed: cell unknowns eliminated element by element, CHOLMOD on the
///   face system.
/// pcg: conjugate gradients on the face system, preconditioned by a
///   Cholesky factor that is refreshed only when convergence slows down.
/// automatic: direct up to `direct_limit` dofs, pcg beyond.
enum class LinearSolverKind { automatic, direct, condensed, pcg };

std::string to_string(LinearSolverKind kind);
LinearSolverKind parse_linear_solver(const std::string& name);

struct SpdOptions {
  LinearSolverKind kind = LinearSolverKind::direct;
  double rel_tol = 1e-13;
  int max_iter = 10000;
};

/// Solves A x = b for a symmetric positive definite A; `pcg` here uses a
/// Jacobi preconditioner. Non-SPD input or PCG breakdown raise solver errors.
Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SpdOptions& options = {});

/// Repeated solves with the hybrid metric B = sum_T P_T^T B_T P_T, where only
/// the cell-cell block of B_T varies between solves and the remaining
/// blocks are those of a_h.
class MetricSolver {
public:
  using CellBlock = std::function<Eigen::MatrixXd(std::size_t)>;

  MetricSolver(const HhoSpace& space, LinearSolverKind kind, Exec exec = Exec::parallel,
               std::size_t direct_limit = 300000, double pcg_tol = 1e-13);
  ~MetricSolver();
  MetricSolver(const MetricSolver&) = delete;
  MetricSolver& operator=(const MetricSolver&) = delete;

  /// Solves B x = rhs with the cell blocks supplied by `cell_block`.
  Eigen::VectorXd solve(const CellBlock& cell_block, const Eigen::VectorXd& rhs);

  LinearSolverKind kind() const { return kind_; }
  /// PCG iterations of the last solve (0 for direct solves).
  int last_iterations() const { return last_iterations_; }
  int factorizations() const { return factorizations_; }

private:
  using Cholmod = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;

  void build_pattern(SparseMatrix& m, std::vector<std::int32_t>& positions, bool faces_only) const;
  void factorize(const SparseMatrix& m);
  Eigen::VectorXd solve_direct(const CellBlock& cell_block, const Eigen::VectorXd& rhs);
  Eigen::VectorXd solve_condensed(const CellBlock& cell_block, const Eigen::VectorXd& rhs);

  const HhoSpace* space_;
  LinearSolverKind kind_;
  Exec exec_;
  double pcg_tol_;
  SparseMatrix matrix_;
  /// Value index in matrix_ of each local entry (cell-major, -1 if dropped).
  std::vector<std::int32_t> positions_;
  std::unique_ptr<Cholmod> factor_;
  bool analyzed_ = false;
  bool refresh_ = true;
  int last_iterations_ = 0;
  int factorizations_ = 0;
};

}  // namespace gpehho
