#include "gpehho/transfer.hpp"

#include "gpehho/error.hpp"

#include <numeric>

namespace gpehho {

CellField raise_degree(const CellField& field, int degree) {
  if (degree < field.degree) throw Error(ErrorKind::invalid_parameter, "cannot lower the degree of a field");
  CellField out;
  out.degree = degree;
  const int from = field.block();
  const int to = cell_dim(degree);
  const auto n = static_cast<Eigen::Index>(field.coeffs.size() / from);
  out.coeffs = Eigen::VectorXd::Zero(n * to);
  for (Eigen::Index c = 0; c < n; ++c) out.coeffs.segment(c * to, from) = field.coeffs.segment(c * from, from);
  return out;
}

CellField transfer_to_fine(const std::vector<const TriMesh*>& chain, const CellField& field, int degree, Exec exec) {
  if (chain.empty()) throw Error(ErrorKind::invalid_parameter, "empty mesh chain");
  if (degree < field.degree) throw Error(ErrorKind::invalid_parameter, "target degree below field degree");
  const TriMesh& coarse = *chain.front();
  const TriMesh& fine = *chain.back();
  const int levels = static_cast<int>(chain.size()) - 1;
  const GeometryCache cgeo = compute_geometry(coarse);
  const GeometryCache fgeo = compute_geometry(fine);
  const ReferenceCellBasis from_basis(field.degree);
  const ReferenceCellBasis to_basis(degree);
  const CellTabulation tab = tabulate(to_basis, make_quadrature(Shape::triangle, 2 * degree));
  const int nt = to_basis.size();

  CellField out;
  out.degree = degree;
  out.coeffs.resize(static_cast<Eigen::Index>(fine.num_cells()) * nt);
  for_each_index(fine.num_cells(), exec, [&](std::size_t f) {
    const auto c = static_cast<std::size_t>(ancestor(chain, static_cast<std::int32_t>(f), levels));
    const CellFrame cf{&cgeo.cells[c]};
    const CellFrame ff{&fgeo.cells[f]};
    const Eigen::VectorXd pc = field.cell(c);
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(nt);
    // (p, phi_i)_T = 2|T| sum_q w_q p(x_q) scale phi_i(xi_q), and scale^2 2|T| = 1.
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Point x = ff.to_physical(tab.rule.xi(q), tab.rule.eta(q));
      const double p = eval_cell(cf, from_basis, pc, x);
      coeffs += (tab.rule.weights[q] * p) * tab.values.row(static_cast<Eigen::Index>(q)).transpose();
    }
    out.coeffs.segment(static_cast<Eigen::Index>(f) * nt, nt) = coeffs / ff.scale();
  });
  return out;
}

FieldDistance field_distance(const TriMesh& mesh, const GeometryCache& geo, const CellField& a, const CellField& b,
                             Exec exec) {
  const int degree = std::max(a.degree, b.degree);
  const CellField pa = raise_degree(a, degree);
  const CellField pb = raise_degree(b, degree);
  const int n = cell_dim(degree);
  if (pa.coeffs.size() != pb.coeffs.size() || pa.coeffs.size() != static_cast<Eigen::Index>(mesh.num_cells()) * n)
    throw Error(ErrorKind::invalid_parameter, "fields live on different meshes");
  const ReferenceCellBasis basis(degree);
  const CellTabulation tab = tabulate(basis, make_quadrature(Shape::triangle, std::max(2 * degree - 2, 0)));

  std::vector<double> l2(mesh.num_cells());
  std::vector<double> h1(mesh.num_cells());
  for_each_index(mesh.num_cells(), exec, [&](std::size_t c) {
    const Eigen::VectorXd d = pa.cell(c) - pb.cell(c);
    l2[c] = d.squaredNorm();
    const Eigen::Matrix2d g = geo.cells[c].jacobian_inv * geo.cells[c].jacobian_inv.transpose();
    double s = 0.0;
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Eigen::Vector2d grad(tab.d_xi.row(qi).dot(d), tab.d_eta.row(qi).dot(d));
      s += tab.rule.weights[q] * grad.dot(g * grad);
    }
    h1[c] = s;
  });
  FieldDistance out;
  out.l2 = std::sqrt(std::accumulate(l2.begin(), l2.end(), 0.0));
  out.h1 = std::sqrt(std::accumulate(h1.begin(), h1.end(), 0.0));
  return out;
}

double integral_of_square(const TriMesh& mesh, const GeometryCache& geo, const CellField& field) {
  const ReferenceCellBasis basis(field.degree);
  const QuadratureRule rule = make_quadrature(Shape::triangle, 2 * field.degree);
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const CellFrame fr{&geo.cells[c]};
    const Eigen::VectorXd pc = field.cell(c);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double p = eval_cell(fr, basis, pc, fr.to_physical(rule.xi(q), rule.eta(q)));
      s += rule.weights[q] * p * p;
    }
    sum += 2.0 * geo.cells[c].area * s;
  }
  return sum;
}

}  // namespace gpehho
