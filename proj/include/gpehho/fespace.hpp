#pragma once

#include "gpehho/basis.hpp"
#include "gpehho/mesh.hpp"
#include "gpehho/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace gpehho {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// Physical evaluation of the orthonormal cell basis on one cell.
struct CellFrame {
  const GeometryCache::Cell* geo = nullptr;

  /// (2|T|)^{-1/2}: maps reference-orthonormal to cell-orthonormal.
  double scale() const { return 1.0 / std::sqrt(2.0 * geo->area); }
  Point to_reference(const Point& x) const { return geo->jacobian_inv * (x - geo->origin); }
  Point to_physical(double xi, double eta) const { return geo->origin + geo->jacobian * Point(xi, eta); }
  /// J^{-1} J^{-T}; reference gradients g map to physical ones with
  /// grad_x phi . grad_x psi = g_phi^T metric g_psi (times scale^2).
  Eigen::Matrix2d metric() const { return geo->jacobian_inv * geo->jacobian_inv.transpose(); }
};

/// Values of all cell basis functions at a physical point.
Eigen::VectorXd cell_basis_values(const CellFrame& frame, const ReferenceCellBasis& basis, const Point& x);

/// Physical gradients of all cell basis functions at a physical point (n x 2).
Eigen::MatrixX2d cell_basis_gradients(const CellFrame& frame, const ReferenceCellBasis& basis, const Point& x);

/// Evaluates the polynomial with the given coefficients at x.
double eval_cell(const CellFrame& frame, const ReferenceCellBasis& basis, const Eigen::VectorXd& coeffs,
                 const Point& x);

/// Coefficients of the L2(T) projection of f onto P^l(T), by quadrature of
/// the given exactness degree.
Eigen::VectorXd project_cell(const ScalarField& f, const ReferenceCellBasis& basis, const CellFrame& frame,
                             int quad_degree);

/// Coefficients of the L2(F) projection of f onto P^k(F); F runs from a to b.
Eigen::VectorXd project_face(const ScalarField& f, const ReferenceFaceBasis& basis, const Point& a, const Point& b,
                             int quad_degree);

/// Pi^0 of a cell polynomial given in the orthonormal basis.
inline double cell_mean(const Eigen::VectorXd& coeffs, double area) { return coeffs[0] / std::sqrt(area); }

/// ||f - p||_{L2(T)} by quadrature; p given by coefficients.
double l2_error_cell(const ScalarField& f, const ReferenceCellBasis& basis, const CellFrame& frame,
                     const Eigen::VectorXd& coeffs, int quad_degree);

/// ||f||_{L2(T)} by quadrature.
double l2_norm_cell(const ScalarField& f, const CellFrame& frame, int quad_degree);

}  // namespace gpehho
