#include "gpehho/mesh.hpp"

#include "gpehho/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <string>
#include <utility>

namespace gpehho {

namespace {

// Builds faces, cell_faces, face_cells and boundary flags from cells.
// Faces are numbered in order of first appearance while scanning cells.
void build_faces(TriMesh& mesh) {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> index;
  mesh.faces.clear();
  mesh.face_cells.clear();
  mesh.cell_faces.assign(mesh.cells.size(), {});
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& v = mesh.cells[c];
    for (int i = 0; i < 3; ++i) {
      const std::int32_t p = v[(i + 1) % 3];
      const std::int32_t q = v[(i + 2) % 3];
      const auto key = std::minmax(p, q);
      auto [it, inserted] = index.try_emplace({key.first, key.second},
                                              static_cast<std::int32_t>(mesh.faces.size()));
      if (inserted) {
        mesh.faces.push_back({key.first, key.second});
        mesh.face_cells.push_back({static_cast<std::int32_t>(c), -1});
      } else {
        auto& adj = mesh.face_cells[it->second];
        if (adj[1] != -1) throw Error(ErrorKind::invalid_domain, "face shared by more than two cells");
        adj[1] = static_cast<std::int32_t>(c);
      }
      mesh.cell_faces[c][i] = CellFace{it->second, static_cast<std::int8_t>(p < q ? 1 : -1)};
    }
  }
  mesh.boundary_face.resize(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) mesh.boundary_face[f] = mesh.face_cells[f][1] == -1;
}

}  // namespace

std::size_t TriMesh::num_boundary_faces() const {
  return static_cast<std::size_t>(std::count(boundary_face.begin(), boundary_face.end(), true));
}

double TriMesh::signed_area(std::size_t cell) const {
  const auto& v = cells[cell];
  const Point e1 = vertices[v[1]] - vertices[v[0]];
  const Point e2 = vertices[v[2]] - vertices[v[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

Point TriMesh::barycenter(std::size_t cell) const {
  const auto& v = cells[cell];
  return (vertices[v[0]] + vertices[v[1]] + vertices[v[2]]) / 3.0;
}

TriMesh from_cells(std::vector<Point> vertices, std::vector<std::array<std::int32_t, 3>> cells) {
  TriMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (std::int32_t v : mesh.cells[c])
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size())
        throw Error(ErrorKind::invalid_domain, "cell references a missing vertex");
    const double a = mesh.signed_area(c);
    if (a == 0.0) throw Error(ErrorKind::invalid_domain, "degenerate cell " + std::to_string(c));
    if (a < 0.0) std::swap(mesh.cells[c][1], mesh.cells[c][2]);
  }
  mesh.parent.assign(mesh.cells.size(), -1);
  build_faces(mesh);
  return mesh;
}

TriMesh friedrichs_keller(const Rect& rect) {
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
    throw Error(ErrorKind::invalid_domain, "rectangle must have positive width and height");
  TriMesh mesh;
  mesh.vertices = {Point(rect.xmin, rect.ymin), Point(rect.xmax, rect.ymin),
                   Point(rect.xmax, rect.ymax), Point(rect.xmin, rect.ymax)};
  mesh.cells = {{0, 1, 2}, {0, 2, 3}};
  mesh.parent = {-1, -1};
  mesh.level = 0;
  mesh.fk_domain = rect;
  build_faces(mesh);
  return mesh;
}

TriMesh red_refine(const TriMesh& mesh) {
  TriMesh fine;
  fine.vertices = mesh.vertices;
  fine.vertices.reserve(mesh.vertices.size() + mesh.faces.size());
  // Midpoint of coarse face f gets vertex index nv + f.
  const auto nv = static_cast<std::int32_t>(mesh.vertices.size());
  for (const auto& f : mesh.faces) fine.vertices.push_back(0.5 * (mesh.vertices[f[0]] + mesh.vertices[f[1]]));

  fine.cells.reserve(4 * mesh.cells.size());
  fine.parent.reserve(4 * mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& v = mesh.cells[c];
    const auto& cf = mesh.cell_faces[c];
    // m[i] is the midpoint of local face i (opposite vertex i).
    const std::int32_t m0 = nv + cf[0].face;
    const std::int32_t m1 = nv + cf[1].face;
    const std::int32_t m2 = nv + cf[2].face;
    fine.cells.push_back({v[0], m2, m1});
    fine.cells.push_back({m2, v[1], m0});
    fine.cells.push_back({m1, m0, v[2]});
    fine.cells.push_back({m0, m1, m2});
    for (int i = 0; i < 4; ++i) fine.parent.push_back(static_cast<std::int32_t>(c));
  }
  fine.level = mesh.level + 1;
  fine.fk_domain = mesh.fk_domain;
  build_faces(fine);
  return fine;
}

TriMesh friedrichs_keller_level(const Rect& rect, int level) {
  if (level < 0) throw Error(ErrorKind::invalid_parameter, "mesh level must be >= 0");
  TriMesh mesh = friedrichs_keller(rect);
  for (int l = 0; l < level; ++l) mesh = red_refine(mesh);
  return mesh;
}

double square_side_h(const TriMesh& mesh) {
  if (!mesh.fk_domain)
    throw Error(ErrorKind::unsupported_mesh, "mesh was not built by friedrichs_keller + red_refine");
  return mesh.fk_domain->width() / std::ldexp(1.0, mesh.level);
}

double GeometryCache::max_diameter() const {
  double h = 0.0;
  for (const auto& c : cells) h = std::max(h, c.diameter);
  return h;
}

GeometryCache compute_geometry(const TriMesh& mesh) {
  GeometryCache geo;
  geo.faces.resize(mesh.num_faces());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Point& a = mesh.vertices[mesh.faces[f][0]];
    const Point& b = mesh.vertices[mesh.faces[f][1]];
    const Point t = b - a;
    auto& gf = geo.faces[f];
    gf.length = t.norm();
    gf.normal = Point(t.y(), -t.x()) / gf.length;
    gf.midpoint = 0.5 * (a + b);
  }

  geo.cells.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cells[c];
    const Point& p0 = mesh.vertices[v[0]];
    const Point& p1 = mesh.vertices[v[1]];
    const Point& p2 = mesh.vertices[v[2]];
    auto& gc = geo.cells[c];
    gc.origin = p0;
    gc.jacobian.col(0) = p1 - p0;
    gc.jacobian.col(1) = p2 - p0;
    gc.jacobian_inv = gc.jacobian.inverse();
    gc.area = 0.5 * gc.jacobian.determinant();
    gc.barycenter = (p0 + p1 + p2) / 3.0;
    gc.diameter = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    for (int i = 0; i < 3; ++i) {
      const Point& a = mesh.vertices[v[(i + 1) % 3]];
      const Point& b = mesh.vertices[v[(i + 2) % 3]];
      const Point e1 = a - gc.barycenter;
      const Point e2 = b - gc.barycenter;
      gc.sub_area[i] = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
      const double len = geo.faces[mesh.cell_faces[c][i].face].length;
      gc.ell[i] = len * gc.diameter * gc.diameter / gc.sub_area[i];
    }
  }
  return geo;
}

std::int32_t ancestor(const std::vector<const TriMesh*>& chain, std::int32_t fine_cell, int levels_up) {
  if (levels_up < 0 || static_cast<std::size_t>(levels_up) + 1 > chain.size())
    throw Error(ErrorKind::unsupported_mesh, "ancestor request beyond the mesh chain");
  std::int32_t cell = fine_cell;
  for (int l = 0; l < levels_up; ++l) {
    const TriMesh* m = chain[chain.size() - 1 - static_cast<std::size_t>(l)];
    cell = m->parent.at(static_cast<std::size_t>(cell));
    if (cell < 0) throw Error(ErrorKind::unsupported_mesh, "non-nested meshes");
  }
  return cell;
}

void write_mesh_dump(std::ostream& nodes, std::ostream& elements, const TriMesh& mesh) {
  nodes << std::setprecision(17);
  for (const auto& p : mesh.vertices) nodes << p.x() << ' ' << p.y() << '\n';
  for (const auto& c : mesh.cells) elements << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
}

}  // namespace gpehho
