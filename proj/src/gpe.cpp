#include "gpehho/gpe.hpp"

#include "gpehho/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gpehho {

namespace {

constexpr double pi = 3.14159265358979323846;

double serial_sum(const std::vector<double>& parts) { return std::accumulate(parts.begin(), parts.end(), 0.0); }

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::standard ? "standard" : "modified"; }

Mode parse_mode(const std::string& name) {
  if (name == "standard") return Mode::standard;
  if (name == "modified") return Mode::modified;
  throw Error(ErrorKind::config, "unknown mode '" + name + "'");
}

double trace_constant(int d) { return 1.0 / (pi * pi) + 2.0 / (d * pi); }

LowerBoundCertificate certify(double h, double sigma, double energy, int d) {
  if (!(h > 0.0) || !(sigma > 0.0) || (d != 2 && d != 3))
    throw Error(ErrorKind::invalid_parameter, "certificate needs h > 0, sigma > 0 and d in {2, 3}");
  LowerBoundCertificate c;
  c.h = h;
  c.sigma = sigma;
  c.energy = energy;
  c.d = d;
  c.c_tr = trace_constant(d);
  c.slack = 1.0 - sigma * (1.0 / (pi * pi) + c.c_tr) - 4.0 * h * h * energy / (pi * pi);
  return c;
}

double auto_sigma(double h, double energy_upper, int d, double safety) {
  if (!(h > 0.0) || (d != 2 && d != 3) || !(safety > 0.0) || safety > 1.0)
    throw Error(ErrorKind::invalid_parameter, "auto sigma needs h > 0, d in {2, 3} and safety in (0, 1]");
  const double budget = 1.0 - 4.0 * h * h * energy_upper / (pi * pi);
  if (!(budget > 0.0))
    throw Error(ErrorKind::no_admissible_sigma,
                "no admissible sigma: 4 h^2 E / pi^2 = " + std::to_string(1.0 - budget) + " >= 1");
  return safety * budget / (1.0 / (pi * pi) + trace_constant(d));
}

GpDiscretization::GpDiscretization(const TriMesh& mesh, const GpProblem& problem, Exec exec)
    : problem_(problem), space_(mesh, problem.k, problem.sigma, exec), exec_(exec) {
  if (problem.mode == Mode::modified && problem.k != 0)
    throw Error(ErrorKind::invalid_mode, "the modified scheme is defined for k = 0 only");
  if (!(problem.kappa >= 0.0)) throw Error(ErrorKind::invalid_parameter, "kappa must be >= 0");
  const int k = problem.k;
  const int nc = space_.cell_block();
  quartic_tab_ = tabulate(space_.reference().cell_basis,
                          make_quadrature(Shape::triangle, std::min(4 * (k + 1), max_quadrature_degree)));

  const Potential& v = problem.potential;
  if (v.kind() == PotentialKind::zero) {
    v_const_.assign(mesh.num_cells(), 0.0);
  } else if (const PotentialTable* t = v.grid()) {
    v_const_ = mesh_cell_constants(*t, mesh, problem.cell_reduction);
  } else {
    const int pdeg = v.polynomial_degree();
    potential_degree_ =
        std::min(2 * (k + 1) + (pdeg >= 0 ? pdeg : problem.potential_oversampling), max_quadrature_degree);
    const CellTabulation tab = tabulate(space_.reference().cell_basis, make_quadrature(Shape::triangle, potential_degree_));
    v_blocks_.resize(nc, nc * static_cast<Eigen::Index>(mesh.num_cells()));
    for_each_index(mesh.num_cells(), exec, [&](std::size_t c) {
      const CellFrame fr = space_.frame(c);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nc, nc);
      for (std::size_t q = 0; q < tab.rule.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        const double vq = v(fr.to_physical(tab.rule.xi(q), tab.rule.eta(q)));
        m.noalias() += (tab.rule.weights[q] * vq) * tab.values.row(qi).transpose() * tab.values.row(qi);
      }
      v_blocks_.middleCols(static_cast<Eigen::Index>(c) * nc, nc) = 0.5 * (m + m.transpose());
    });
  }
}

Eigen::MatrixXd GpDiscretization::potential_block(std::size_t cell) const {
  const int nc = space_.cell_block();
  if (!v_const_.empty()) return v_const_[cell] * Eigen::MatrixXd::Identity(nc, nc);
  return v_blocks_.middleCols(static_cast<Eigen::Index>(cell) * nc, nc);
}

double GpDiscretization::potential_term(const HybridVector& v) const {
  std::vector<double> parts(space_.num_cells());
  const int nc = space_.cell_block();
  for_each_index(parts.size(), exec_, [&](std::size_t c) {
    const auto vc = v.cell(c);
    if (!v_const_.empty())
      parts[c] = v_const_[c] * vc.squaredNorm();
    else
      parts[c] = vc.dot(v_blocks_.middleCols(static_cast<Eigen::Index>(c) * nc, nc) * vc);
  });
  return serial_sum(parts);
}

double GpDiscretization::quadratic(const HybridVector& v) const {
  std::vector<double> parts(space_.num_cells());
  for_each_index(parts.size(), exec_, [&](std::size_t c) {
    const Eigen::VectorXd loc = space_.gather(v, c);
    parts[c] = loc.dot(space_.local_matrix(c) * loc);
  });
  return serial_sum(parts) + potential_term(v);
}

Eigen::VectorXd GpDiscretization::cell_cubic(std::size_t cell, const Eigen::VectorXd& c) const {
  const double area = space_.geometry().cells[cell].area;
  if (problem_.mode == Mode::modified) {
    // n_h(v, phi_i) = 1/2 (Pi0 v)^2 (v, phi_i) + 1/2 (v^2, 1) Pi0 v Pi0 phi_i
    Eigen::VectorXd r = (0.5 * c[0] * c[0] / area) * c;
    r[0] += 0.5 * c.squaredNorm() * c[0] / area;
    return r;
  }
  const Eigen::VectorXd uq = quartic_tab_.values * c;
  Eigen::VectorXd w(uq.size());
  for (Eigen::Index q = 0; q < uq.size(); ++q)
    w[q] = quartic_tab_.rule.weights[static_cast<std::size_t>(q)] * uq[q] * uq[q] * uq[q];
  return quartic_tab_.values.transpose() * w / (2.0 * area);
}

double GpDiscretization::quartic_standard(const HybridVector& v) const {
  std::vector<double> parts(space_.num_cells());
  for_each_index(parts.size(), exec_, [&](std::size_t c) {
    const Eigen::VectorXd uq = quartic_tab_.values * v.cell(c);
    double s = 0.0;
    for (std::size_t q = 0; q < quartic_tab_.rule.size(); ++q)
      s += quartic_tab_.rule.weights[q] * std::pow(uq[static_cast<Eigen::Index>(q)], 4);
    parts[c] = s / (2.0 * space_.geometry().cells[c].area);
  });
  return serial_sum(parts);
}

double GpDiscretization::quartic_modified(const HybridVector& v) const {
  std::vector<double> parts(space_.num_cells());
  for_each_index(parts.size(), exec_, [&](std::size_t c) {
    const auto vc = v.cell(c);
    parts[c] = vc[0] * vc[0] / space_.geometry().cells[c].area * vc.squaredNorm();
  });
  return serial_sum(parts);
}

double GpDiscretization::quartic(const HybridVector& v) const {
  return problem_.mode == Mode::modified ? quartic_modified(v) : quartic_standard(v);
}

double GpDiscretization::energy(const HybridVector& v) const {
  return 0.5 * quadratic(v) + 0.25 * problem_.kappa * quartic(v);
}

double GpDiscretization::energy_change(const HybridVector& u, const Eigen::VectorXd& residual, double lambda,
                                       const HybridVector& v) const {
  const int nc = space_.cell_block();
  const bool modified = problem_.mode == Mode::modified;
  const Eigen::VectorXd d = v.values - u.values;
  HybridVector dv = u;
  dv.values = d;
  std::vector<double> parts(space_.num_cells());
  for_each_index(parts.size(), exec_, [&](std::size_t c) {
    const Eigen::VectorXd ld = space_.gather(dv, c);
    double q = ld.dot(space_.local_matrix(c) * ld);
    const Eigen::VectorXd dc = ld.head(nc);
    if (!v_const_.empty())
      q += v_const_[c] * dc.squaredNorm();
    else
      q += dc.dot(v_blocks_.middleCols(static_cast<Eigen::Index>(c) * nc, nc) * dc);
    double quart = 0.0;
    if (problem_.kappa != 0.0) {
      const double area = space_.geometry().cells[c].area;
      const auto uc = u.cell(c);
      if (modified) {
        const double u0 = uc[0];
        const double d0 = dc[0];
        const double ud = uc.dot(dc);
        const double dd = dc.squaredNorm();
        quart = (u0 * u0 * dd + 2.0 * u0 * d0 * (2.0 * ud + dd) + d0 * d0 * (uc.squaredNorm() + 2.0 * ud + dd)) / area;
      } else {
        const Eigen::VectorXd uq = quartic_tab_.values * uc;
        const Eigen::VectorXd dq = quartic_tab_.values * dc;
        for (std::size_t i = 0; i < quartic_tab_.rule.size(); ++i) {
          const auto qi = static_cast<Eigen::Index>(i);
          const double x = uq[qi];
          const double y = dq[qi];
          quart += quartic_tab_.rule.weights[i] * y * y * (6.0 * x * x + 4.0 * x * y + y * y);
        }
        quart /= 2.0 * area;
      }
    }
    parts[c] = 0.5 * q + 0.25 * problem_.kappa * quart;
  });
  const double dT = d.head(static_cast<Eigen::Index>(u.cell_dofs())).squaredNorm();
  return residual.dot(d) - 0.5 * lambda * dT + serial_sum(parts);
}

Eigen::VectorXd GpDiscretization::gradient(const HybridVector& v) const {
  const std::size_t ncell = space_.num_cells();
  const int nc = space_.cell_block();
  const int nloc = space_.local_size();
  Eigen::MatrixXd local(nloc, static_cast<Eigen::Index>(ncell));
  for_each_index(ncell, exec_, [&](std::size_t c) {
    const Eigen::VectorXd loc = space_.gather(v, c);
    Eigen::VectorXd g = space_.local_matrix(c) * loc;
    const Eigen::VectorXd vc = v.cell(c);
    if (!v_const_.empty())
      g.head(nc) += v_const_[c] * vc;
    else
      g.head(nc) += v_blocks_.middleCols(static_cast<Eigen::Index>(c) * nc, nc) * vc;
    if (problem_.kappa != 0.0) g.head(nc) += problem_.kappa * cell_cubic(c, vc);
    local.col(static_cast<Eigen::Index>(c)) = g;
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.values.size());
  for (std::size_t c = 0; c < ncell; ++c) {
    for (int i = 0; i < nloc; ++i) {
      const std::int32_t gi = space_.global_dof(c, i);
      if (gi >= 0) out[gi] += local(i, static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

double GpDiscretization::rayleigh(const HybridVector& v) const { return v.values.dot(gradient(v)); }

double GpDiscretization::lambda_from_state(const HybridVector& v) const {
  return 2.0 * energy(v) + 0.5 * problem_.kappa * quartic(v);
}

Eigen::VectorXd GpDiscretization::eigenvalue_residual(const HybridVector& v, double lambda) const {
  const double norm = v.bulk_norm();
  if (!(std::abs(norm - 1.0) <= 1e-10))
    throw Error(ErrorKind::invalid_state, "state is not L2-normalized (||u_T|| = " + std::to_string(norm) + ")");
  Eigen::VectorXd r = gradient(v);
  r.head(static_cast<Eigen::Index>(v.cell_dofs())) -= lambda * v.cells();
  return r;
}

double GpDiscretization::relative_residual(const HybridVector& v, double lambda) const {
  return eigenvalue_residual(v, lambda).norm() / (std::abs(lambda) * v.bulk_norm());
}

double GpDiscretization::residual_floor(const HybridVector& v, double lambda) const {
  const std::size_t ncell = space_.num_cells();
  const int nc = space_.cell_block();
  const int nloc = space_.local_size();
  Eigen::MatrixXd local(nloc, static_cast<Eigen::Index>(ncell));
  for_each_index(ncell, exec_, [&](std::size_t c) {
    const Eigen::VectorXd loc = space_.gather(v, c).cwiseAbs();
    Eigen::VectorXd g = space_.local_matrix(c).cwiseAbs() * loc;
    const Eigen::VectorXd vc = loc.head(nc);
    g.head(nc) += potential_block(c).cwiseAbs() * vc + std::abs(lambda) * vc;
    if (problem_.kappa != 0.0) g.head(nc) += problem_.kappa * nonlinear_weight(c, v.cell(c)).cwiseAbs() * vc;
    local.col(static_cast<Eigen::Index>(c)) = g;
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.values.size());
  for (std::size_t c = 0; c < ncell; ++c) {
    for (int i = 0; i < nloc; ++i) {
      const std::int32_t gi = space_.global_dof(c, i);
      if (gi >= 0) out[gi] += local(i, static_cast<Eigen::Index>(c));
    }
  }
  return std::numeric_limits<double>::epsilon() * out.norm() / (std::abs(lambda) * v.bulk_norm());
}

Eigen::MatrixXd GpDiscretization::nonlinear_weight(std::size_t cell, const Eigen::VectorXd& u_cell) const {
  const int nc = space_.cell_block();
  const double area = space_.geometry().cells[cell].area;
  if (problem_.mode == Mode::modified) {
    // n_h(u; v, w) = 1/2 ((Pi0 u)^2 v, w) + 1/2 (u^2 Pi0 v, Pi0 w)
    Eigen::MatrixXd m = (0.5 * u_cell[0] * u_cell[0] / area) * Eigen::MatrixXd::Identity(nc, nc);
    m(0, 0) += 0.5 * u_cell.squaredNorm() / area;
    return m;
  }
  const Eigen::VectorXd uq = quartic_tab_.values * u_cell;
  Eigen::VectorXd w(uq.size());
  for (Eigen::Index q = 0; q < uq.size(); ++q)
    w[q] = quartic_tab_.rule.weights[static_cast<std::size_t>(q)] * uq[q] * uq[q] / (2.0 * area);
  const Eigen::MatrixXd m = quartic_tab_.values.transpose() * w.asDiagonal() * quartic_tab_.values;
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd GpDiscretization::metric_cell_block(std::size_t cell, const HybridVector& u) const {
  const int nc = space_.cell_block();
  Eigen::MatrixXd b = space_.local_matrix(cell).topLeftCorner(nc, nc);
  if (!v_const_.empty())
    b.diagonal().array() += v_const_[cell];
  else
    b += v_blocks_.middleCols(static_cast<Eigen::Index>(cell) * nc, nc);
  if (problem_.kappa != 0.0) b += problem_.kappa * nonlinear_weight(cell, u.cell(cell));
  return b;
}

}  // namespace gpehho
