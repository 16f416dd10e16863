#pragma once

#include "gpehho/quadrature.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace gpehho {

inline constexpr int cell_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }
inline constexpr int face_dim(int degree) { return degree + 1; }

/// L2-orthonormal basis of P^l on the reference triangle, obtained by
/// Cholesky orthonormalization of the monomials x^a y^b ordered by total
/// degree. The first function is the constant sqrt(2).
///
/// On a physical cell T with affine map F the functions
/// phi_i = (2|T|)^{-1/2} * phihat_i o F^{-1} are L2(T)-orthonormal, the first
/// one equals |T|^{-1/2} and the others have zero mean.
class ReferenceCellBasis {
public:
  explicit ReferenceCellBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(powers_.size()); }
  const std::vector<std::pair<int, int>>& powers() const { return powers_; }
  /// Row i holds the monomial coefficients of basis function i.
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }

  Eigen::VectorXd values(double xi, double eta) const;
  /// Columns: d/dxi, d/deta.
  Eigen::MatrixX2d gradients(double xi, double eta) const;
  /// Columns: d2/dxi2, d2/dxideta, d2/deta2.
  Eigen::MatrixX3d hessians(double xi, double eta) const;

private:
  int degree_;
  std::vector<std::pair<int, int>> powers_;
  Eigen::MatrixXd coeffs_;
};

/// Orthonormal Legendre basis of P^k on [0,1]: sqrt(2a+1) P_a(2s-1).
/// On a face of length |F| the functions are scaled by |F|^{-1/2}.
class ReferenceFaceBasis {
public:
  explicit ReferenceFaceBasis(int degree) : degree_(degree) {}
  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  Eigen::VectorXd values(double s) const;

private:
  int degree_;
};

/// Basis values and derivatives tabulated at the nodes of a triangle rule.
struct CellTabulation {
  QuadratureRule rule;
  Eigen::MatrixXd values;   // nq x n
  Eigen::MatrixXd d_xi;     // nq x n
  Eigen::MatrixXd d_eta;    // nq x n
  Eigen::MatrixXd d_xixi;   // nq x n
  Eigen::MatrixXd d_xieta;  // nq x n
  Eigen::MatrixXd d_etaeta; // nq x n
};

CellTabulation tabulate(const ReferenceCellBasis& basis, const QuadratureRule& rule);

}  // namespace gpehho
