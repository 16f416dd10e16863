#pragma once

#include "gpehho/basis.hpp"
#include "gpehho/fespace.hpp"
#include "gpehho/mesh.hpp"
#include "gpehho/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <vector>

namespace gpehho {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Reference-element data shared by all cells: bases and tabulations of the
/// cell basis at cell and face quadrature nodes.
struct HhoReference {
  explicit HhoReference(int k);

  int k;
  ReferenceCellBasis cell_basis;  // degree k+1
  ReferenceFaceBasis face_basis;  // degree k
  CellTabulation cell_tab;        // exactness 2(k+1)
  QuadratureRule face_rule;       // exactness 2(k+1)
  /// Face basis values at face_rule nodes: nq x (k+1).
  Eigen::MatrixXd face_values;
  /// Cell basis tabulated on reference edge i, traversed forwards
  /// (orientation 0) or backwards (orientation 1) as [i][orientation].
  std::array<std::array<CellTabulation, 2>, 3> edge_tab;
};

/// Per-cell operators in local dof order [cell (nc) | face 0 | face 1 | face 2],
/// each face block of size k+1 in the face's global orientation.
struct LocalOperators {
  Eigen::MatrixXd reconstruction;  // nc x nloc
  Eigen::MatrixXd stiffness;       // K_T = R^T (grad phi, grad phi) R, nloc x nloc
  Eigen::MatrixXd stabilization;   // S_T, nloc x nloc
};

/// Gradient stiffness (grad phi_i, grad phi_j)_T of the cell basis.
Eigen::MatrixXd cell_gradient_stiffness(const HhoReference& ref, const GeometryCache::Cell& geo);

/// R_T solving the gradient-matching system on zero-mean modes and the
/// mean condition on the constant mode.
Eigen::MatrixXd local_reconstruction(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                                     std::size_t cell);

/// S_T = sigma [h_T^{-2} D_T^T D_T + sum_F l_{T,F}^{-1} D_F^T D_F].
Eigen::MatrixXd local_stabilization(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                                    std::size_t cell, const Eigen::MatrixXd& reconstruction, double sigma);

LocalOperators local_operators(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                               std::size_t cell, double sigma);

/// Member of V_h restricted to U_h: cell blocks first, then one block per
/// interior face. Boundary faces carry no unknowns.
struct HybridVector {
  Eigen::VectorXd values;
  int cell_block = 0;
  int face_block = 0;
  std::size_t num_cells = 0;

  std::size_t cell_dofs() const { return num_cells * static_cast<std::size_t>(cell_block); }
  auto cell(std::size_t c) { return values.segment(static_cast<Eigen::Index>(c) * cell_block, cell_block); }
  auto cell(std::size_t c) const { return values.segment(static_cast<Eigen::Index>(c) * cell_block, cell_block); }
  auto cells() { return values.head(static_cast<Eigen::Index>(cell_dofs())); }
  auto cells() const { return values.head(static_cast<Eigen::Index>(cell_dofs())); }
  /// ||v_T||_{L2(Omega)}: Euclidean norm of the cell block (orthonormal basis).
  double bulk_norm() const { return cells().norm(); }
};

/// Broken polynomial field on the mesh, `degree` per cell, orthonormal basis.
struct CellField {
  int degree = 0;
  Eigen::VectorXd coeffs;

  int block() const { return cell_dim(degree); }
  auto cell(std::size_t c) const { return coeffs.segment(static_cast<Eigen::Index>(c) * block(), block()); }
};

/// The HHO discretization of one mesh: dof map, local operators and the
/// assembled matrix of a_h. Immutable after construction.
class HhoSpace {
public:
  HhoSpace(const TriMesh& mesh, int k, double sigma, Exec exec = Exec::parallel);

  const TriMesh& mesh() const { return *mesh_; }
  const GeometryCache& geometry() const { return geo_; }
  const HhoReference& reference() const { return ref_; }
  int k() const { return ref_.k; }
  double sigma() const { return sigma_; }

  int cell_block() const { return cell_dim(ref_.k + 1); }
  int face_block() const { return face_dim(ref_.k); }
  int local_size() const { return cell_block() + 3 * face_block(); }
  std::size_t num_cells() const { return mesh_->num_cells(); }
  std::size_t num_interior_faces() const { return num_interior_faces_; }
  std::size_t cell_dofs() const { return num_cells() * static_cast<std::size_t>(cell_block()); }
  std::size_t num_dofs() const { return cell_dofs() + num_interior_faces_ * static_cast<std::size_t>(face_block()); }

  /// Block index of a face in the face part of the dof vector, -1 on the boundary.
  std::int32_t face_index(std::size_t face) const { return face_index_[face]; }
  /// Global dof of local dof `i` of `cell`, -1 for boundary-face dofs.
  std::int32_t global_dof(std::size_t cell, int i) const;

  CellFrame frame(std::size_t cell) const { return CellFrame{&geo_.cells[cell]}; }

  const Eigen::MatrixXd& reconstruction(std::size_t cell) const { return reconstruction_[cell_class_[cell]]; }
  /// K_T + S_T, nloc x nloc.
  const Eigen::MatrixXd& local_matrix(std::size_t cell) const { return local_matrix_[cell_class_[cell]]; }
  /// Cells with equal Jacobian and face orientations share local operators.
  std::size_t num_cell_classes() const { return reconstruction_.size(); }

  /// Assembled matrix of a_h on U_h.
  SparseMatrix matrix() const;

  HybridVector zero_vector() const;
  /// Local dof vector of a cell (boundary faces zero).
  Eigen::VectorXd gather(const HybridVector& v, std::size_t cell) const;

  /// I_h f = (Pi^{k+1} f, Pi^k f); boundary faces are dropped.
  HybridVector interpolate(const ScalarField& f, int quad_degree) const;

  /// R_h v as a degree-(k+1) cell field.
  CellField reconstruct(const HybridVector& v, Exec exec = Exec::parallel) const;

  /// G_h f from f and its gradient.
  CellField elliptic_projection(const ScalarField& f, const VectorField& grad_f, int quad_degree) const;

  /// Cell part of a hybrid vector as a cell field.
  CellField bulk(const HybridVector& v) const;

  /// a_h(v, w), evaluated cell by cell.
  double a_h(const HybridVector& v, const HybridVector& w) const;

private:
  const TriMesh* mesh_;
  GeometryCache geo_;
  HhoReference ref_;
  double sigma_;
  std::vector<std::int32_t> face_index_;
  std::size_t num_interior_faces_ = 0;
  std::vector<std::size_t> cell_class_;
  std::vector<Eigen::MatrixXd> reconstruction_;
  std::vector<Eigen::MatrixXd> local_matrix_;
};

/// ||a - b||_{L2} for two cell fields of equal degree on the same mesh.
double l2_distance(const HhoSpace& space, const CellField& a, const CellField& b);

}  // namespace gpehho
