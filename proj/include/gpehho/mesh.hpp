#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace gpehho {

using Point = Eigen::Vector2d;

/// Axis-aligned rectangle (xmin, xmax) x (ymin, ymax).
struct Rect {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

/// One face as seen from a cell. Local face i is opposite local vertex i,
/// i.e. it joins vertices (i+1)%3 and (i+2)%3.
struct CellFace {
  std::int32_t face = -1;
  /// +1 when the stored face orientation (a -> b) runs counter-clockwise
  /// around the cell, so the face's global normal points outward.
  std::int8_t sign = 1;
};

/// 2D simplicial mesh with face connectivity and refinement ancestry.
///
/// Faces are stored with a global orientation a < b; the global unit normal
/// of face (a, b) is the tangent rotated clockwise.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<std::int32_t, 3>> cells;
  std::vector<std::array<std::int32_t, 2>> faces;
  std::vector<std::array<CellFace, 3>> cell_faces;
  /// Adjacent cells of each face; second entry is -1 on the boundary.
  std::vector<std::array<std::int32_t, 2>> face_cells;
  std::vector<bool> boundary_face;
  /// Index of the parent cell in the next coarser mesh (-1 at the root).
  std::vector<std::int32_t> parent;
  int level = 0;
  /// Set only for meshes built by friedrichs_keller + red_refine.
  std::optional<Rect> fk_domain;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return cells.size(); }
  std::size_t num_faces() const { return faces.size(); }
  std::size_t num_boundary_faces() const;

  double signed_area(std::size_t cell) const;
  Point barycenter(std::size_t cell) const;
};

/// Mesh from an explicit cell list. Negatively oriented cells are
/// reordered; degenerate cells raise invalid-domain.
TriMesh from_cells(std::vector<Point> vertices, std::vector<std::array<std::int32_t, 3>> cells);

/// Two-cell mesh of a rectangle, split along the lower-left to upper-right
/// diagonal.
TriMesh friedrichs_keller(const Rect& rect);

/// Uniform red refinement; coarse vertex coordinates are kept bit-exactly
/// and come first in the refined vertex list.
TriMesh red_refine(const TriMesh& mesh);

/// friedrichs_keller followed by `level` red refinements.
TriMesh friedrichs_keller_level(const Rect& rect, int level);

/// Side length of the squares formed by pairs of triangles,
/// i.e. domain width / 2^level.
double square_side_h(const TriMesh& mesh);

struct GeometryCache {
  struct Cell {
    double diameter = 0.0;
    double area = 0.0;
    Point barycenter = Point::Zero();
    /// Affine map x = origin + jacobian * xi from the reference triangle.
    Point origin = Point::Zero();
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d jacobian_inv = Eigen::Matrix2d::Zero();
    /// |T_F| for local face i, T_F = conv{x_T, F}.
    std::array<double, 3> sub_area{};
    /// l_{T,F} = |F| h_T^2 / |T_F| for local face i.
    std::array<double, 3> ell{};
  };
  struct Face {
    double length = 0.0;
    Point normal = Point::Zero();
    Point midpoint = Point::Zero();
  };

  std::vector<Cell> cells;
  std::vector<Face> faces;

  double max_diameter() const;
};

GeometryCache compute_geometry(const TriMesh& mesh);

/// Walks parent links from a cell of `fine` up to its ancestor in a mesh
/// `levels_up` refinements coarser. `chain` holds the intermediate meshes
/// with chain.back() == fine.
std::int32_t ancestor(const std::vector<const TriMesh*>& chain, std::int32_t fine_cell,
                      int levels_up);

/// Plain-text dump: one "x y" line per vertex to `nodes`, one "i j k" line
/// per cell (0-based vertex indices) to `elements`.
void write_mesh_dump(std::ostream& nodes, std::ostream& elements, const TriMesh& mesh);

}  // namespace gpehho
