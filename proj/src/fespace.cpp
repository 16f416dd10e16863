#include "gpehho/fespace.hpp"

#include <cmath>

namespace gpehho {

Eigen::VectorXd cell_basis_values(const CellFrame& frame, const ReferenceCellBasis& basis, const Point& x) {
  const Point r = frame.to_reference(x);
  return frame.scale() * basis.values(r.x(), r.y());
}

Eigen::MatrixX2d cell_basis_gradients(const CellFrame& frame, const ReferenceCellBasis& basis, const Point& x) {
  const Point r = frame.to_reference(x);
  // grad_x = J^{-T} grad_xi, row-wise: g_x^T = g_xi^T J^{-1}.
  return frame.scale() * (basis.gradients(r.x(), r.y()) * frame.geo->jacobian_inv);
}

double eval_cell(const CellFrame& frame, const ReferenceCellBasis& basis, const Eigen::VectorXd& coeffs,
                 const Point& x) {
  return cell_basis_values(frame, basis, x).dot(coeffs);
}

Eigen::VectorXd project_cell(const ScalarField& f, const ReferenceCellBasis& basis, const CellFrame& frame,
                             int quad_degree) {
  const QuadratureRule rule = make_quadrature(Shape::triangle, quad_degree);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  const double jac = 2.0 * frame.geo->area;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = frame.to_physical(rule.xi(q), rule.eta(q));
    c += (rule.weights[q] * jac * f(x) * frame.scale()) * basis.values(rule.xi(q), rule.eta(q));
  }
  return c;
}

Eigen::VectorXd project_face(const ScalarField& f, const ReferenceFaceBasis& basis, const Point& a, const Point& b,
                             int quad_degree) {
  const QuadratureRule rule = make_quadrature(Shape::segment, quad_degree);
  const double len = (b - a).norm();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.xi(q);
    const Point x = a + s * (b - a);
    // sum w * |F| * f * psihat / sqrt|F|
    c += (rule.weights[q] * std::sqrt(len) * f(x)) * basis.values(s);
  }
  return c;
}

double l2_error_cell(const ScalarField& f, const ReferenceCellBasis& basis, const CellFrame& frame,
                     const Eigen::VectorXd& coeffs, int quad_degree) {
  const QuadratureRule rule = make_quadrature(Shape::triangle, quad_degree);
  const double jac = 2.0 * frame.geo->area;
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = frame.to_physical(rule.xi(q), rule.eta(q));
    const double p = frame.scale() * basis.values(rule.xi(q), rule.eta(q)).dot(coeffs);
    const double d = f(x) - p;
    sum += rule.weights[q] * jac * d * d;
  }
  return std::sqrt(sum);
}

double l2_norm_cell(const ScalarField& f, const CellFrame& frame, int quad_degree) {
  const QuadratureRule rule = make_quadrature(Shape::triangle, quad_degree);
  const double jac = 2.0 * frame.geo->area;
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = f(frame.to_physical(rule.xi(q), rule.eta(q)));
    sum += rule.weights[q] * jac * v * v;
  }
  return std::sqrt(sum);
}

}  // namespace gpehho
