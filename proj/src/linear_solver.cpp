#include "gpehho/linear_solver.hpp"

#include "gpehho/error.hpp"

#include <algorithm>
#include <cmath>

namespace gpehho {

namespace {

struct PcgResult {
  int iterations = 0;
  bool converged = false;
};

// Preconditioned CG from x = 0; `apply_m` applies the inverse preconditioner.
template <class Precond>
PcgResult pcg(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x, const Precond& apply_m,
              double rel_tol, int max_iter) {
  PcgResult res;
  x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  // lower triangle only: use the selfadjoint view
  const auto op = a.selfadjointView<Eigen::Lower>();
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = apply_m(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd ap = op * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw Error(ErrorKind::solver, "conjugate gradients broke down: matrix not positive definite");
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    res.iterations = it;
    if (r.norm() <= rel_tol * bnorm) {
      res.converged = true;
      return res;
    }
    z = apply_m(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

// Index of entry (row, col) in the value array of a compressed column matrix.
std::int32_t value_index(const SparseMatrix& m, int row, int col) {
  const int* begin = m.innerIndexPtr() + m.outerIndexPtr()[col];
  const int* end = m.innerIndexPtr() + m.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(begin, end, row);
  if (it == end || *it != row) throw Error(ErrorKind::solver, "sparsity pattern is missing an entry");
  return static_cast<std::int32_t>(it - m.innerIndexPtr());
}

}  // namespace

std::string to_string(LinearSolverKind kind) {
  switch (kind) {
    case LinearSolverKind::automatic: return "automatic";
    case LinearSolverKind::direct: return "direct";
    case LinearSolverKind::condensed: return "condensed";
    case LinearSolverKind::pcg: return "pcg";
  }
  return "unknown";
}

LinearSolverKind parse_linear_solver(const std::string& name) {
  if (name == "automatic") return LinearSolverKind::automatic;
  if (name == "direct") return LinearSolverKind::direct;
  if (name == "condensed") return LinearSolverKind::condensed;
  if (name == "pcg") return LinearSolverKind::pcg;
  throw Error(ErrorKind::config, "unknown linear solver '" + name + "'");
}

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SpdOptions& options) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw Error(ErrorKind::solver, "dimension mismatch in solve_spd");
  if (options.kind == LinearSolverKind::pcg) {
    const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
    if (!inv_diag.allFinite() || (a.diagonal().array() <= 0.0).any())
      throw Error(ErrorKind::solver, "matrix has a non-positive diagonal entry");
    const SparseMatrix lower = a.triangularView<Eigen::Lower>();
    Eigen::VectorXd x;
    const PcgResult res = pcg(
        lower, b, x, [&](const Eigen::VectorXd& r) -> Eigen::VectorXd { return inv_diag.cwiseProduct(r); },
        options.rel_tol, options.max_iter);
    if (!res.converged)
      throw Error(ErrorKind::solver, "conjugate gradients did not converge in " + std::to_string(options.max_iter) +
                                         " iterations");
    return x;
  }
  Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
  llt.compute(a);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::solver, "Cholesky factorization failed: matrix not SPD");
  Eigen::VectorXd x = llt.solve(b);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::solver, "Cholesky solve failed");
  return x;
}

MetricSolver::MetricSolver(const HhoSpace& space, LinearSolverKind kind, Exec exec, std::size_t direct_limit,
                           double pcg_tol)
    : space_(&space), kind_(kind), exec_(exec), pcg_tol_(pcg_tol) {
  if (kind_ == LinearSolverKind::automatic)
    kind_ = space.num_dofs() <= direct_limit ? LinearSolverKind::direct : LinearSolverKind::pcg;
  build_pattern(matrix_, positions_, kind_ != LinearSolverKind::direct);
}

MetricSolver::~MetricSolver() = default;

void MetricSolver::build_pattern(SparseMatrix& m, std::vector<std::int32_t>& positions, bool faces_only) const {
  const HhoSpace& s = *space_;
  const int nc = s.cell_block();
  const int nloc = s.local_size();
  const int first = faces_only ? nc : 0;
  const int width = nloc - first;
  const auto offset = static_cast<std::int32_t>(faces_only ? s.cell_dofs() : 0);
  const auto n = static_cast<Eigen::Index>(s.num_dofs() - static_cast<std::size_t>(offset));

  auto dof = [&](std::size_t c, int i) {
    const std::int32_t g = s.global_dof(c, first + i);
    return g < 0 ? -1 : g - offset;
  };
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(s.num_cells() * static_cast<std::size_t>(width * (width + 1) / 2));
  for (std::size_t c = 0; c < s.num_cells(); ++c)
    for (int j = 0; j < width; ++j)
      for (int i = 0; i < width; ++i) {
        const std::int32_t gi = dof(c, i), gj = dof(c, j);
        if (gi >= 0 && gj >= 0 && gi >= gj) triplets.emplace_back(gi, gj, 0.0);
      }
  m.resize(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  triplets.clear();
  triplets.shrink_to_fit();

  positions.assign(s.num_cells() * static_cast<std::size_t>(width * width), -1);
  for (std::size_t c = 0; c < s.num_cells(); ++c)
    for (int j = 0; j < width; ++j)
      for (int i = 0; i < width; ++i) {
        const std::int32_t gi = dof(c, i), gj = dof(c, j);
        if (gi >= 0 && gj >= 0 && gi >= gj)
          positions[c * static_cast<std::size_t>(width * width) + static_cast<std::size_t>(j * width + i)] =
              value_index(m, gi, gj);
      }
}

void MetricSolver::factorize(const SparseMatrix& m) {
  if (!factor_) factor_ = std::make_unique<Cholmod>();
  if (!analyzed_) {
    factor_->analyzePattern(m);
    analyzed_ = true;
  }
  factor_->factorize(m);
  if (factor_->info() != Eigen::Success)
    throw Error(ErrorKind::solver, "Cholesky factorization of the metric failed: matrix not SPD");
  ++factorizations_;
}

Eigen::VectorXd MetricSolver::solve(const CellBlock& cell_block, const Eigen::VectorXd& rhs) {
  if (rhs.size() != static_cast<Eigen::Index>(space_->num_dofs()))
    throw Error(ErrorKind::solver, "right-hand side has the wrong size");
  return kind_ == LinearSolverKind::direct ? solve_direct(cell_block, rhs) : solve_condensed(cell_block, rhs);
}

Eigen::VectorXd MetricSolver::solve_direct(const CellBlock& cell_block, const Eigen::VectorXd& rhs) {
  const HhoSpace& s = *space_;
  const int nc = s.cell_block();
  const int nloc = s.local_size();
  const auto area = static_cast<std::size_t>(nloc * nloc);
  std::vector<Eigen::MatrixXd> blocks(s.num_cells());
  for_each_index(s.num_cells(), exec_, [&](std::size_t c) {
    Eigen::MatrixXd b = s.local_matrix(c);
    b.topLeftCorner(nc, nc) = cell_block(c);
    blocks[c] = std::move(b);
  });
  double* values = matrix_.valuePtr();
  std::fill(values, values + matrix_.nonZeros(), 0.0);
  for (std::size_t c = 0; c < s.num_cells(); ++c) {
    const std::int32_t* pos = positions_.data() + c * area;
    const double* b = blocks[c].data();
    for (std::size_t e = 0; e < area; ++e)
      if (pos[e] >= 0) values[pos[e]] += b[e];
  }
  factorize(matrix_);
  last_iterations_ = 0;
  Eigen::VectorXd x = factor_->solve(rhs);
  if (factor_->info() != Eigen::Success) throw Error(ErrorKind::solver, "Cholesky solve failed");
  return x;
}

Eigen::VectorXd MetricSolver::solve_condensed(const CellBlock& cell_block, const Eigen::VectorXd& rhs) {
  const HhoSpace& s = *space_;
  const int nc = s.cell_block();
  const int nloc = s.local_size();
  const int nfl = nloc - nc;
  const std::size_t ncell = s.num_cells();
  const auto cell_dofs = static_cast<Eigen::Index>(s.cell_dofs());

  // Per cell: B_cc^{-1} B_cf, B_cc^{-1} b_c, and the local Schur complement.
  std::vector<Eigen::MatrixXd> y(ncell), schur(ncell);
  std::vector<Eigen::VectorXd> z(ncell);
  for_each_index(ncell, exec_, [&](std::size_t c) {
    const Eigen::MatrixXd& k = s.local_matrix(c);
    const Eigen::LLT<Eigen::MatrixXd> llt(cell_block(c));
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::solver, "cell block of the metric is not SPD on cell " + std::to_string(c));
    y[c] = llt.solve(k.topRightCorner(nc, nfl));
    z[c] = llt.solve(rhs.segment(static_cast<Eigen::Index>(c) * nc, nc));
    Eigen::MatrixXd sc = k.bottomRightCorner(nfl, nfl) - k.bottomLeftCorner(nfl, nc) * y[c];
    schur[c] = 0.5 * (sc + sc.transpose());
  });

  Eigen::VectorXd face_rhs = rhs.tail(rhs.size() - cell_dofs);
  double* values = matrix_.valuePtr();
  std::fill(values, values + matrix_.nonZeros(), 0.0);
  const auto area = static_cast<std::size_t>(nfl * nfl);
  for (std::size_t c = 0; c < ncell; ++c) {
    const std::int32_t* pos = positions_.data() + c * area;
    const double* b = schur[c].data();
    for (std::size_t e = 0; e < area; ++e)
      if (pos[e] >= 0) values[pos[e]] += b[e];
    const Eigen::VectorXd g = s.local_matrix(c).bottomLeftCorner(nfl, nc) * z[c];
    for (int i = 0; i < nfl; ++i) {
      const std::int32_t gi = s.global_dof(c, nc + i);
      if (gi >= 0) face_rhs[gi - cell_dofs] -= g[i];
    }
  }
  schur.clear();

  Eigen::VectorXd xf;
  if (kind_ == LinearSolverKind::condensed || refresh_) {
    factorize(matrix_);
    refresh_ = false;
  }
  if (kind_ == LinearSolverKind::condensed) {
    xf = factor_->solve(face_rhs);
    last_iterations_ = 0;
  } else {
    const PcgResult res = pcg(
        matrix_, face_rhs, xf, [&](const Eigen::VectorXd& r) -> Eigen::VectorXd { return factor_->solve(r); },
        pcg_tol_, 200);
    last_iterations_ = res.iterations;
    if (!res.converged) {
      factorize(matrix_);
      xf = factor_->solve(face_rhs);
    } else if (res.iterations > 12) {
      refresh_ = true;
    }
  }

  Eigen::VectorXd x(rhs.size());
  x.tail(xf.size()) = xf;
  for_each_index(ncell, exec_, [&](std::size_t c) {
    Eigen::VectorXd xfl(nfl);
    for (int i = 0; i < nfl; ++i) {
      const std::int32_t gi = s.global_dof(c, nc + i);
      xfl[i] = gi < 0 ? 0.0 : xf[gi - cell_dofs];
    }
    x.segment(static_cast<Eigen::Index>(c) * nc, nc) = z[c] - y[c] * xfl;
  });
  return x;
}

}  // namespace gpehho
