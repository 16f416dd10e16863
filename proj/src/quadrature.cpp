#include "gpehho/quadrature.hpp"

#include "gpehho/error.hpp"

#include <cmath>
#include <numbers>

namespace gpehho {

void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-type guess.
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const long double p2 = ((2.0L * j - 1.0L) * x * p1 - (j - 1.0L) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0L;
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    long double p0 = 1.0L, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const long double p2 = ((2.0L * j - 1.0L) * x * p1 - (j - 1.0L) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0L;
    dp = n * (x * p1 - p0) / (x * x - 1.0L);
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    // Map [-1,1] -> [0,1], ascending.
    const auto idx = static_cast<std::size_t>(n - 1 - i);
    nodes[idx] = static_cast<double>(0.5L * (x + 1.0L));
    weights[idx] = static_cast<double>(0.5L * w);
  }
}

QuadratureRule make_quadrature(Shape shape, int degree) {
  if (degree < 0 || degree > max_quadrature_degree)
    throw Error(ErrorKind::unsupported_degree,
                "quadrature degree " + std::to_string(degree) + " outside [0, 20]");
  QuadratureRule rule;
  rule.shape = shape;
  rule.degree = degree;
  if (shape == Shape::segment) {
    std::vector<double> x, w;
    gauss_legendre01(degree / 2 + 1, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.barycentric.push_back({1.0 - x[i], x[i], 0.0});
      rule.weights.push_back(w[i]);
    }
    return rule;
  }
  // x^a y^b on the triangle becomes u^a v^b (1-u)^(b+1) under
  // (u, v) -> (u, v(1-u)): degree <= degree+1 in u, <= degree in v.
  const int nu = (degree + 2 + 1) / 2;
  const int nv = (degree + 1 + 1) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre01(nu, xu, wu);
  gauss_legendre01(nv, xv, wv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double u = xu[static_cast<std::size_t>(i)];
      const double v = xv[static_cast<std::size_t>(j)] * (1.0 - u);
      rule.barycentric.push_back({1.0 - u - v, u, v});
      rule.weights.push_back(wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)] * (1.0 - u));
    }
  }
  return rule;
}

}  // namespace gpehho
