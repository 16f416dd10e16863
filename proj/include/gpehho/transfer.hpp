#pragma once

#include "gpehho/hho.hpp"
#include "gpehho/mesh.hpp"
#include "gpehho/parallel.hpp"

#include <vector>

namespace gpehho {

/// Pads a field with zero coefficients up to `degree`. Exact because the
/// cell bases are hierarchical.
CellField raise_degree(const CellField& field, int degree);

/// Restricts a broken polynomial on chain.front() to the cells of
/// chain.back(), expanded in the fine cell basis of `degree` >= field.degree.
/// `chain` lists consecutive red refinements; the restriction is exact.
CellField transfer_to_fine(const std::vector<const TriMesh*>& chain, const CellField& field, int degree,
                           Exec exec = Exec::parallel);

struct FieldDistance {
  double l2 = 0.0;
  double h1 = 0.0;  // broken H1 seminorm
};

/// ||a - b|| on one mesh; the fields may have different degrees.
FieldDistance field_distance(const TriMesh& mesh, const GeometryCache& geo, const CellField& a,
                             const CellField& b, Exec exec = Exec::parallel);

/// sum_T int_T p^2, by quadrature in physical space (independent of the
/// orthonormality of the basis).
double integral_of_square(const TriMesh& mesh, const GeometryCache& geo, const CellField& field);

}  // namespace gpehho
