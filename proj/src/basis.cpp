#include "gpehho/basis.hpp"

#include "gpehho/error.hpp"

#include <cmath>

namespace gpehho {

namespace {

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

long double factorial(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
long double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

ReferenceCellBasis::ReferenceCellBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 8) throw Error(ErrorKind::unsupported_degree, "cell basis degree outside [0, 8]");
  for (int d = 0; d <= degree; ++d)
    for (int j = 0; j <= d; ++j) powers_.emplace_back(d - j, j);
  const auto n = static_cast<Eigen::Index>(powers_.size());

  MatrixXld gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      gram(i, j) = monomial_integral(powers_[i].first + powers_[j].first, powers_[i].second + powers_[j].second);

  // Gram = L L^T  =>  rows of L^{-1} are orthonormal coefficient vectors.
  // A second pass against the exact Gram removes the residual loss of
  // orthogonality from the first factorization.
  MatrixXld coeffs = MatrixXld::Identity(n, n);
  for (int pass = 0; pass < 2; ++pass) {
    const MatrixXld g = coeffs * gram * coeffs.transpose();
    Eigen::LLT<MatrixXld> llt(g);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::assembly, "monomial Gram matrix not SPD");
    const MatrixXld linv = llt.matrixL().solve(MatrixXld::Identity(n, n));
    coeffs = linv * coeffs;
  }
  coeffs_ = coeffs.cast<double>();
}

Eigen::VectorXd ReferenceCellBasis::values(double xi, double eta) const {
  Eigen::VectorXd mono(size());
  for (int i = 0; i < size(); ++i) mono[i] = ipow(xi, powers_[i].first) * ipow(eta, powers_[i].second);
  return coeffs_ * mono;
}

Eigen::MatrixX2d ReferenceCellBasis::gradients(double xi, double eta) const {
  Eigen::MatrixX2d mono(size(), 2);
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = powers_[i];
    mono(i, 0) = a > 0 ? a * ipow(xi, a - 1) * ipow(eta, b) : 0.0;
    mono(i, 1) = b > 0 ? b * ipow(xi, a) * ipow(eta, b - 1) : 0.0;
  }
  return coeffs_ * mono;
}

Eigen::MatrixX3d ReferenceCellBasis::hessians(double xi, double eta) const {
  Eigen::MatrixX3d mono(size(), 3);
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = powers_[i];
    mono(i, 0) = a > 1 ? a * (a - 1) * ipow(xi, a - 2) * ipow(eta, b) : 0.0;
    mono(i, 1) = (a > 0 && b > 0) ? a * b * ipow(xi, a - 1) * ipow(eta, b - 1) : 0.0;
    mono(i, 2) = b > 1 ? b * (b - 1) * ipow(xi, a) * ipow(eta, b - 2) : 0.0;
  }
  return coeffs_ * mono;
}

Eigen::VectorXd ReferenceFaceBasis::values(double s) const {
  Eigen::VectorXd v(size());
  const double x = 2.0 * s - 1.0;
  double p0 = 1.0, p1 = x;
  for (int a = 0; a <= degree_; ++a) {
    double pa;
    if (a == 0) {
      pa = 1.0;
    } else if (a == 1) {
      pa = x;
    } else {
      pa = ((2.0 * a - 1.0) * x * p1 - (a - 1.0) * p0) / a;
      p0 = p1;
      p1 = pa;
    }
    v[a] = std::sqrt(2.0 * a + 1.0) * pa;
  }
  return v;
}

CellTabulation tabulate(const ReferenceCellBasis& basis, const QuadratureRule& rule) {
  CellTabulation t;
  t.rule = rule;
  const auto nq = static_cast<Eigen::Index>(rule.size());
  const int n = basis.size();
  t.values.resize(nq, n);
  t.d_xi.resize(nq, n);
  t.d_eta.resize(nq, n);
  t.d_xixi.resize(nq, n);
  t.d_xieta.resize(nq, n);
  t.d_etaeta.resize(nq, n);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double xi = rule.xi(static_cast<std::size_t>(q));
    const double eta = rule.eta(static_cast<std::size_t>(q));
    t.values.row(q) = basis.values(xi, eta).transpose();
    const Eigen::MatrixX2d g = basis.gradients(xi, eta);
    t.d_xi.row(q) = g.col(0).transpose();
    t.d_eta.row(q) = g.col(1).transpose();
    const Eigen::MatrixX3d h = basis.hessians(xi, eta);
    t.d_xixi.row(q) = h.col(0).transpose();
    t.d_xieta.row(q) = h.col(1).transpose();
    t.d_etaeta.row(q) = h.col(2).transpose();
  }
  return t;
}

}  // namespace gpehho
