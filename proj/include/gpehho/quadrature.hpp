#pragma once

#include <array>
#include <vector>

namespace gpehho {

enum class Shape { triangle, segment };

/// Quadrature on the reference simplex: the triangle (0,0),(1,0),(0,1)
/// (weights sum to 1/2) or the segment [0,1] (weights sum to 1).
struct QuadratureRule {
  Shape shape = Shape::triangle;
  int degree = 0;
  /// Barycentric coordinates (l0, l1, l2) for triangles; (1-s, s) in the
  /// first two slots for segments. Reference coordinates are (l1, l2)
  /// resp. s = l1.
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double xi(std::size_t q) const { return barycentric[q][1]; }
  double eta(std::size_t q) const { return barycentric[q][2]; }
};

inline constexpr int max_quadrature_degree = 20;

/// Rule exact for polynomials of total degree <= `degree` (0..20).
/// Triangles use the collapsed (Duffy) tensor product of Gauss-Legendre
/// rules, segments plain Gauss-Legendre.
QuadratureRule make_quadrature(Shape shape, int degree);

/// n-point Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace gpehho
