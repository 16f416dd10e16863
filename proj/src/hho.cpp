#include "gpehho/hho.hpp"

#include "gpehho/error.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace gpehho {

namespace {

const std::array<Point, 3> reference_vertices = {Point(0.0, 0.0), Point(1.0, 0.0), Point(0.0, 1.0)};

// Face quadrature nodes mapped onto reference edge i.
QuadratureRule edge_rule(const QuadratureRule& face_rule, int edge, bool backwards) {
  Point a = reference_vertices[static_cast<std::size_t>((edge + 1) % 3)];
  Point b = reference_vertices[static_cast<std::size_t>((edge + 2) % 3)];
  if (backwards) std::swap(a, b);
  QuadratureRule r;
  r.shape = Shape::triangle;
  r.degree = face_rule.degree;
  for (std::size_t q = 0; q < face_rule.size(); ++q) {
    const Point x = a + face_rule.xi(q) * (b - a);
    r.barycentric.push_back({1.0 - x.x() - x.y(), x.x(), x.y()});
    r.weights.push_back(face_rule.weights[q]);
  }
  return r;
}

// Outward normal derivative data of the cell basis on local face i:
// returns (face basis a, cell basis j) -> (psi_a, d_n phi_j)_F and
// (psi_a, phi_j)_F.
struct FaceCoupling {
  Eigen::MatrixXd normal_derivative;  // nf x nc
  Eigen::MatrixXd trace;              // nf x nc
};

FaceCoupling face_coupling(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                           std::size_t cell, int i) {
  const auto& gc = geo.cells[cell];
  const CellFace cf = mesh.cell_faces[cell][static_cast<std::size_t>(i)];
  const auto& gf = geo.faces[static_cast<std::size_t>(cf.face)];
  const CellTabulation& tab = ref.edge_tab[static_cast<std::size_t>(i)][cf.sign > 0 ? 0 : 1];
  const double scale = 1.0 / std::sqrt(2.0 * gc.area);
  const Point n_out = static_cast<double>(cf.sign) * gf.normal;
  // d_n phi = scale * (J^{-T} grad_xi phi) . n = scale * grad_xi phi . (J^{-1} n)
  const Point m = gc.jacobian_inv * n_out;
  const double face_scale = std::sqrt(gf.length);  // w |F| psihat / sqrt|F|
  const int nc = ref.cell_basis.size();
  const int nf = ref.face_basis.size();
  FaceCoupling out{Eigen::MatrixXd::Zero(nf, nc), Eigen::MatrixXd::Zero(nf, nc)};
  for (std::size_t q = 0; q < ref.face_rule.size(); ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    const double w = ref.face_rule.weights[q] * face_scale * scale;
    const Eigen::RowVectorXd dn = m.x() * tab.d_xi.row(qi) + m.y() * tab.d_eta.row(qi);
    out.normal_derivative += w * ref.face_values.row(qi).transpose() * dn;
    out.trace += w * ref.face_values.row(qi).transpose() * tab.values.row(qi);
  }
  return out;
}

}  // namespace

HhoReference::HhoReference(int k_)
    : k(k_), cell_basis(k_ + 1), face_basis(k_),
      cell_tab(tabulate(cell_basis, make_quadrature(Shape::triangle, 2 * (k_ + 1)))),
      face_rule(make_quadrature(Shape::segment, 2 * (k_ + 1))) {
  if (k_ < 0) throw Error(ErrorKind::unsupported_degree, "HHO degree must be >= 0");
  face_values.resize(static_cast<Eigen::Index>(face_rule.size()), face_basis.size());
  for (std::size_t q = 0; q < face_rule.size(); ++q)
    face_values.row(static_cast<Eigen::Index>(q)) = face_basis.values(face_rule.xi(q)).transpose();
  for (int e = 0; e < 3; ++e)
    for (int o = 0; o < 2; ++o)
      edge_tab[static_cast<std::size_t>(e)][static_cast<std::size_t>(o)] =
          tabulate(cell_basis, edge_rule(face_rule, e, o == 1));
}

Eigen::MatrixXd cell_gradient_stiffness(const HhoReference& ref, const GeometryCache::Cell& geo) {
  const Eigen::Matrix2d g = geo.jacobian_inv * geo.jacobian_inv.transpose();
  const auto& t = ref.cell_tab;
  const int nc = ref.cell_basis.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nc, nc);
  // scale^2 * 2|T| = 1, so only reference weights remain.
  for (std::size_t q = 0; q < t.rule.size(); ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    Eigen::MatrixX2d grad(nc, 2);
    grad.col(0) = t.d_xi.row(qi).transpose();
    grad.col(1) = t.d_eta.row(qi).transpose();
    k.noalias() += t.rule.weights[q] * grad * g * grad.transpose();
  }
  return 0.5 * (k + k.transpose());
}

Eigen::MatrixXd local_reconstruction(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                                     std::size_t cell) {
  const auto& gc = geo.cells[cell];
  const int nc = ref.cell_basis.size();
  const int nf = ref.face_basis.size();
  const int nloc = nc + 3 * nf;
  const Eigen::Matrix2d g = gc.jacobian_inv * gc.jacobian_inv.transpose();

  // rhs(i, :) = -(v_T, Lap phi_i)_T + sum_F (v_F, d_n phi_i)_F
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nc, nloc);
  const auto& t = ref.cell_tab;
  for (std::size_t q = 0; q < t.rule.size(); ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    const Eigen::RowVectorXd lap =
        t.d_xixi.row(qi) * g(0, 0) + 2.0 * t.d_xieta.row(qi) * g(0, 1) + t.d_etaeta.row(qi) * g(1, 1);
    rhs.leftCols(nc).noalias() -= t.rule.weights[q] * lap.transpose() * t.values.row(qi);
  }
  for (int i = 0; i < 3; ++i) {
    const FaceCoupling fc = face_coupling(ref, mesh, geo, cell, i);
    rhs.middleCols(nc + i * nf, nf) += fc.normal_derivative.transpose();
  }

  const Eigen::MatrixXd k = cell_gradient_stiffness(ref, gc);
  Eigen::LLT<Eigen::MatrixXd> llt(k.bottomRightCorner(nc - 1, nc - 1));
  if (nc > 1 && llt.info() != Eigen::Success)
    throw Error(ErrorKind::assembly, "singular reconstruction system on cell " + std::to_string(cell));

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nc, nloc);
  r(0, 0) = 1.0;  // (R v, 1)_T = (v_T, 1)_T
  if (nc > 1) r.bottomRows(nc - 1) = llt.solve(rhs.bottomRows(nc - 1));
  return r;
}

Eigen::MatrixXd local_stabilization(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                                    std::size_t cell, const Eigen::MatrixXd& reconstruction, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::invalid_parameter, "stabilization parameter must be positive");
  const auto& gc = geo.cells[cell];
  const int nc = ref.cell_basis.size();
  const int nf = ref.face_basis.size();

  Eigen::MatrixXd d_cell = -reconstruction;
  d_cell.leftCols(nc) += Eigen::MatrixXd::Identity(nc, nc);
  Eigen::MatrixXd s = (1.0 / (gc.diameter * gc.diameter)) * (d_cell.transpose() * d_cell);

  for (int i = 0; i < 3; ++i) {
    const FaceCoupling fc = face_coupling(ref, mesh, geo, cell, i);
    Eigen::MatrixXd d_face = -fc.trace * reconstruction;  // nf x nloc
    d_face.middleCols(nc + i * nf, nf) += Eigen::MatrixXd::Identity(nf, nf);
    s.noalias() += (1.0 / gc.ell[static_cast<std::size_t>(i)]) * (d_face.transpose() * d_face);
  }
  s *= sigma;
  return 0.5 * (s + s.transpose());
}

LocalOperators local_operators(const HhoReference& ref, const TriMesh& mesh, const GeometryCache& geo,
                               std::size_t cell, double sigma) {
  LocalOperators op;
  op.reconstruction = local_reconstruction(ref, mesh, geo, cell);
  const Eigen::MatrixXd k = cell_gradient_stiffness(ref, geo.cells[cell]);
  op.stiffness = op.reconstruction.transpose() * k * op.reconstruction;
  op.stiffness = 0.5 * (op.stiffness + op.stiffness.transpose());
  op.stabilization = local_stabilization(ref, mesh, geo, cell, op.reconstruction, sigma);
  return op;
}

HhoSpace::HhoSpace(const TriMesh& mesh, int k, double sigma, Exec exec)
    : mesh_(&mesh), geo_(compute_geometry(mesh)), ref_(k), sigma_(sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::invalid_parameter, "stabilization parameter must be positive");
  face_index_.assign(mesh.num_faces(), -1);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f)
    if (!mesh.boundary_face[f]) face_index_[f] = static_cast<std::int32_t>(num_interior_faces_++);

  const std::size_t nc = num_cells();
  // Local operators depend on the cell only through its Jacobian and the
  // orientation of its faces.
  using ClassKey = std::tuple<double, double, double, double, int, int, int>;
  std::map<ClassKey, std::size_t> classes;
  std::vector<std::size_t> representative;
  cell_class_.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const Eigen::Matrix2d& j = geo_.cells[c].jacobian;
    const auto& cf = mesh.cell_faces[c];
    const ClassKey key{j(0, 0), j(1, 0), j(0, 1), j(1, 1), cf[0].sign, cf[1].sign, cf[2].sign};
    auto [it, inserted] = classes.try_emplace(key, representative.size());
    if (inserted) representative.push_back(c);
    cell_class_[c] = it->second;
  }
  reconstruction_.resize(representative.size());
  local_matrix_.resize(representative.size());
  for_each_index(representative.size(), exec, [&](std::size_t i) {
    LocalOperators op = local_operators(ref_, mesh, geo_, representative[i], sigma_);
    reconstruction_[i] = std::move(op.reconstruction);
    local_matrix_[i] = op.stiffness + op.stabilization;
  });
}

std::int32_t HhoSpace::global_dof(std::size_t cell, int i) const {
  const int nc = cell_block();
  if (i < nc) return static_cast<std::int32_t>(cell * static_cast<std::size_t>(nc)) + i;
  const int nf = face_block();
  const int local_face = (i - nc) / nf;
  const std::int32_t fi = face_index_[static_cast<std::size_t>(mesh_->cell_faces[cell][local_face].face)];
  if (fi < 0) return -1;
  return static_cast<std::int32_t>(cell_dofs()) + fi * nf + (i - nc) % nf;
}

SparseMatrix HhoSpace::matrix() const {
  const int nloc = local_size();
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(num_cells() * static_cast<std::size_t>(nloc * nloc));
  for (std::size_t c = 0; c < num_cells(); ++c) {
    for (int i = 0; i < nloc; ++i) {
      const std::int32_t gi = global_dof(c, i);
      if (gi < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const std::int32_t gj = global_dof(c, j);
        if (gj < 0) continue;
        triplets.emplace_back(gi, gj, local_matrix(c)(i, j));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(num_dofs());
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

double HhoSpace::a_h(const HybridVector& v, const HybridVector& w) const {
  double s = 0.0;
  for (std::size_t c = 0; c < num_cells(); ++c) s += gather(v, c).dot(local_matrix(c) * gather(w, c));
  return s;
}

HybridVector HhoSpace::zero_vector() const {
  HybridVector v;
  v.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_dofs()));
  v.cell_block = cell_block();
  v.face_block = face_block();
  v.num_cells = num_cells();
  return v;
}

Eigen::VectorXd HhoSpace::gather(const HybridVector& v, std::size_t cell) const {
  const int nloc = local_size();
  Eigen::VectorXd out(nloc);
  for (int i = 0; i < nloc; ++i) {
    const std::int32_t g = global_dof(cell, i);
    out[i] = g < 0 ? 0.0 : v.values[g];
  }
  return out;
}

HybridVector HhoSpace::interpolate(const ScalarField& f, int quad_degree) const {
  HybridVector v = zero_vector();
  for (std::size_t c = 0; c < num_cells(); ++c) v.cell(c) = project_cell(f, ref_.cell_basis, frame(c), quad_degree);
  const auto nf = static_cast<Eigen::Index>(face_block());
  for (std::size_t face = 0; face < mesh_->num_faces(); ++face) {
    const std::int32_t fi = face_index_[face];
    if (fi < 0) continue;
    const Point& a = mesh_->vertices[mesh_->faces[face][0]];
    const Point& b = mesh_->vertices[mesh_->faces[face][1]];
    v.values.segment(static_cast<Eigen::Index>(cell_dofs()) + fi * nf, nf) =
        project_face(f, ref_.face_basis, a, b, quad_degree);
  }
  return v;
}

CellField HhoSpace::reconstruct(const HybridVector& v, Exec exec) const {
  CellField out;
  out.degree = ref_.k + 1;
  out.coeffs.resize(static_cast<Eigen::Index>(cell_dofs()));
  const int nc = cell_block();
  for_each_index(num_cells(), exec, [&](std::size_t c) {
    out.coeffs.segment(static_cast<Eigen::Index>(c) * nc, nc) = reconstruction(c) * gather(v, c);
  });
  return out;
}

CellField HhoSpace::elliptic_projection(const ScalarField& f, const VectorField& grad_f, int quad_degree) const {
  CellField out;
  out.degree = ref_.k + 1;
  const int nc = cell_block();
  out.coeffs.resize(static_cast<Eigen::Index>(cell_dofs()));
  const QuadratureRule rule = make_quadrature(Shape::triangle, quad_degree);
  for (std::size_t c = 0; c < num_cells(); ++c) {
    const CellFrame fr = frame(c);
    const double jac = 2.0 * fr.geo->area;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc);
    double mean = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = fr.to_physical(rule.xi(q), rule.eta(q));
      const Eigen::MatrixX2d grads = cell_basis_gradients(fr, ref_.cell_basis, x);
      rhs.noalias() += rule.weights[q] * jac * (grads * grad_f(x));
      mean += rule.weights[q] * jac * f(x);
    }
    const Eigen::MatrixXd k = cell_gradient_stiffness(ref_, geo_.cells[c]);
    auto block = out.coeffs.segment(static_cast<Eigen::Index>(c) * nc, nc);
    block[0] = mean / std::sqrt(fr.geo->area);
    if (nc > 1) block.tail(nc - 1) = k.bottomRightCorner(nc - 1, nc - 1).llt().solve(rhs.tail(nc - 1));
  }
  return out;
}

CellField HhoSpace::bulk(const HybridVector& v) const {
  return CellField{ref_.k + 1, v.cells()};
}

double l2_distance(const HhoSpace& space, const CellField& a, const CellField& b) {
  (void)space;
  if (a.degree != b.degree) throw Error(ErrorKind::invalid_parameter, "cell fields of different degree");
  return (a.coeffs - b.coeffs).norm();
}

}  // namespace gpehho
