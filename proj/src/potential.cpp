#include "gpehho/potential.hpp"

#include "gpehho/error.hpp"
#include "gpehho/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpehho {

namespace {

constexpr double pi = 3.14159265358979323846;

double harmonic_value(const Point& x) { return 0.5 * x.squaredNorm(); }

double lattice_value(const Point& x) {
  return harmonic_value(x) + 15.0 * (1.0 + std::sin(0.5 * pi * x.x()) * std::sin(0.5 * pi * x.y()));
}

// Mean of t^2 over [a, b].
double mean_square(double a, double b) { return (a * a + a * b + b * b) / 3.0; }

// Mean of sin(pi t / 2) over [a, b].
double mean_sine(double a, double b) { return (std::cos(0.5 * pi * a) - std::cos(0.5 * pi * b)) / (0.5 * pi * (b - a)); }

int grid_count(double length, double cell_size) {
  const double n = length / cell_size;
  const double r = std::round(n);
  if (!(r >= 1.0) || std::abs(n - r) > 1e-12 * std::max(1.0, r))
    throw Error(ErrorKind::invalid_grid, "grid cell size does not tile the domain");
  return static_cast<int>(r);
}

Rect intersect(const Rect& a, const Rect& b) {
  return {std::max(a.xmin, b.xmin), std::min(a.xmax, b.xmax), std::max(a.ymin, b.ymin), std::min(a.ymax, b.ymax)};
}

// Index range of grid cells meeting [lo, hi] along one axis.
std::pair<int, int> cell_range(double lo, double hi, double origin, double h, int n) {
  const int i0 = std::clamp(static_cast<int>(std::floor((lo - origin) / h)), 0, n - 1);
  const int i1 = std::clamp(static_cast<int>(std::ceil((hi - origin) / h)) - 1, 0, n - 1);
  return {i0, std::max(i0, i1)};
}

using Polygon = std::vector<Point>;

// Sutherland-Hodgman clip against the half plane s * (x[axis] - c) >= 0.
Polygon clip(const Polygon& poly, int axis, double c, double s) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    const double dp = s * (p[axis] - c);
    const double dq = s * (q[axis] - c);
    if (dp >= 0.0) out.push_back(p);
    if ((dp >= 0.0) != (dq >= 0.0)) {
      const double t = dp / (dp - dq);
      Point x = p + t * (q - p);
      x[axis] = c;
      out.push_back(x);
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - p.y() * q.x();
  }
  return 0.5 * std::abs(a);
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::lattice: return "lattice";
    case PotentialKind::disorder: return "disorder";
    case PotentialKind::table: return "table";
    case PotentialKind::custom: return "custom";
  }
  return "unknown";
}

std::string to_string(ProjectionMode mode) { return mode == ProjectionMode::mean ? "mean" : "min"; }

ProjectionMode parse_projection_mode(const std::string& name) {
  if (name == "mean") return ProjectionMode::mean;
  if (name == "min") return ProjectionMode::min;
  throw Error(ErrorKind::config, "unknown projection mode '" + name + "'");
}

Rect PotentialTable::extent() const {
  return {origin.x(), origin.x() + nx * cell_size, origin.y(), origin.y() + ny * cell_size};
}

Rect PotentialTable::cell_rect(int ix, int iy) const {
  return {origin.x() + ix * cell_size, origin.x() + (ix + 1) * cell_size, origin.y() + iy * cell_size,
          origin.y() + (iy + 1) * cell_size};
}

double PotentialTable::at(const Point& x) const {
  const int ix = std::clamp(static_cast<int>(std::floor((x.x() - origin.x()) / cell_size)), 0, nx - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((x.y() - origin.y()) / cell_size)), 0, ny - 1);
  return value(ix, iy);
}

void PotentialTable::check_tiles(const Rect& domain) const {
  const Rect e = extent();
  const double tol = 1e-12 * std::max({1.0, std::abs(domain.width()), std::abs(domain.height())});
  if (std::abs(e.xmin - domain.xmin) > tol || std::abs(e.xmax - domain.xmax) > tol ||
      std::abs(e.ymin - domain.ymin) > tol || std::abs(e.ymax - domain.ymax) > tol)
    throw Error(ErrorKind::invalid_grid, "potential grid does not tile the domain");
}

PotentialTable read_table_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    PotentialTable t;
    const auto origin = j.at("grid_origin").get<std::vector<double>>();
    if (origin.size() != 2) throw Error(ErrorKind::invalid_grid, "grid_origin must have two entries");
    t.origin = Point(origin[0], origin[1]);
    t.cell_size = j.at("cell_size").get<double>();
    t.nx = j.at("nx").get<int>();
    t.ny = j.at("ny").get<int>();
    t.values = j.at("values").get<std::vector<double>>();
    if (!(t.cell_size > 0.0) || t.nx <= 0 || t.ny <= 0)
      throw Error(ErrorKind::invalid_grid, "grid needs positive cell_size, nx and ny");
    if (t.values.size() != static_cast<std::size_t>(t.nx) * static_cast<std::size_t>(t.ny))
      throw Error(ErrorKind::invalid_grid, "values must hold nx * ny entries");
    for (double v : t.values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::invalid_grid, "potential values must be finite and >= 0");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("potential table: ") + e.what());
  }
}

void write_table_json(std::ostream& out, const PotentialTable& t) {
  nlohmann::json j;
  j["grid_origin"] = {t.origin.x(), t.origin.y()};
  j["cell_size"] = t.cell_size;
  j["nx"] = t.nx;
  j["ny"] = t.ny;
  j["values"] = t.values;
  out << j.dump(2) << '\n';
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Potential Potential::zero() { return Potential{}; }

Potential Potential::harmonic() {
  Potential p;
  p.kind_ = PotentialKind::harmonic;
  return p;
}

Potential Potential::lattice() {
  Potential p;
  p.kind_ = PotentialKind::lattice;
  return p;
}

Potential Potential::disorder(const Rect& domain, double cell_size, std::uint64_t seed) {
  if (!(cell_size > 0.0)) throw Error(ErrorKind::invalid_grid, "disorder cell size must be positive");
  PotentialTable t;
  t.origin = Point(domain.xmin, domain.ymin);
  t.cell_size = cell_size;
  t.nx = grid_count(domain.width(), cell_size);
  t.ny = grid_count(domain.height(), cell_size);
  t.values.resize(static_cast<std::size_t>(t.nx) * static_cast<std::size_t>(t.ny));
  std::uint64_t counter = 0;
  for (int ix = 0; ix < t.nx; ++ix)
    for (int iy = 0; iy < t.ny; ++iy)
      t.values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(t.nx) + static_cast<std::size_t>(ix)] =
          (splitmix64(seed, counter++) >> 63) == 0 ? 10.0 : 50.0;
  Potential p;
  p.kind_ = PotentialKind::disorder;
  p.table_ = std::move(t);
  return p;
}

Potential Potential::table(PotentialTable table) {
  Potential p;
  p.kind_ = PotentialKind::table;
  p.table_ = std::move(table);
  return p;
}

Potential Potential::custom(ScalarField f, int polynomial_degree) {
  Potential p;
  p.kind_ = PotentialKind::custom;
  p.custom_ = std::move(f);
  p.custom_degree_ = polynomial_degree;
  return p;
}

double Potential::operator()(const Point& x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::harmonic: return harmonic_value(x);
    case PotentialKind::lattice: return lattice_value(x);
    case PotentialKind::disorder:
    case PotentialKind::table: return table_->at(x);
    case PotentialKind::custom: return custom_(x);
  }
  return 0.0;
}

int Potential::polynomial_degree() const {
  switch (kind_) {
    case PotentialKind::zero:
    case PotentialKind::disorder:
    case PotentialKind::table: return 0;
    case PotentialKind::harmonic: return 2;
    case PotentialKind::lattice: return -1;
    case PotentialKind::custom: return custom_degree_;
  }
  return -1;
}

double Potential::min_on(const Rect& r, int samples) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::harmonic:
      return harmonic_value(Point(std::clamp(0.0, r.xmin, r.xmax), std::clamp(0.0, r.ymin, r.ymax)));
    case PotentialKind::disorder:
    case PotentialKind::table: {
      const auto& t = *table_;
      const auto [ix0, ix1] = cell_range(r.xmin, r.xmax, t.origin.x(), t.cell_size, t.nx);
      const auto [iy0, iy1] = cell_range(r.ymin, r.ymax, t.origin.y(), t.cell_size, t.ny);
      double m = std::numeric_limits<double>::infinity();
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
          const Rect o = intersect(r, t.cell_rect(ix, iy));
          if (o.width() > 0.0 && o.height() > 0.0) m = std::min(m, t.value(ix, iy));
        }
      return m;
    }
    case PotentialKind::lattice:
    case PotentialKind::custom: {
      if (samples < 2) throw Error(ErrorKind::invalid_parameter, "min sampling needs at least 2 nodes per axis");
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
          const double x = r.xmin + r.width() * i / (samples - 1);
          const double y = r.ymin + r.height() * j / (samples - 1);
          m = std::min(m, (*this)(Point(x, y)));
        }
      return m;
    }
  }
  return 0.0;
}

double Potential::mean_on(const Rect& r, int quad_points) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::harmonic: return 0.5 * (mean_square(r.xmin, r.xmax) + mean_square(r.ymin, r.ymax));
    case PotentialKind::lattice:
      return 0.5 * (mean_square(r.xmin, r.xmax) + mean_square(r.ymin, r.ymax)) +
             15.0 * (1.0 + mean_sine(r.xmin, r.xmax) * mean_sine(r.ymin, r.ymax));
    case PotentialKind::disorder:
    case PotentialKind::table: {
      const auto& t = *table_;
      const auto [ix0, ix1] = cell_range(r.xmin, r.xmax, t.origin.x(), t.cell_size, t.nx);
      const auto [iy0, iy1] = cell_range(r.ymin, r.ymax, t.origin.y(), t.cell_size, t.ny);
      if (ix0 == ix1 && iy0 == iy1) return t.value(ix0, iy0);
      double s = 0.0;
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
          const Rect o = intersect(r, t.cell_rect(ix, iy));
          if (o.width() > 0.0 && o.height() > 0.0) s += o.area() * t.value(ix, iy);
        }
      return s / r.area();
    }
    case PotentialKind::custom: {
      std::vector<double> nodes, weights;
      gauss_legendre01(quad_points, nodes, weights);
      double s = 0.0;
      for (int i = 0; i < quad_points; ++i)
        for (int j = 0; j < quad_points; ++j) {
          const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
          s += weights[ii] * weights[jj] *
               custom_(Point(r.xmin + r.width() * nodes[ii], r.ymin + r.height() * nodes[jj]));
        }
      return s;
    }
  }
  return 0.0;
}

PotentialTable project_potential_p0(const Potential& v, const Rect& domain, double cell_size, ProjectionMode mode,
                                    int samples) {
  if (!(cell_size > 0.0)) throw Error(ErrorKind::invalid_grid, "grid cell size must be positive");
  PotentialTable t;
  t.origin = Point(domain.xmin, domain.ymin);
  t.cell_size = cell_size;
  t.nx = grid_count(domain.width(), cell_size);
  t.ny = grid_count(domain.height(), cell_size);
  t.values.resize(static_cast<std::size_t>(t.nx) * static_cast<std::size_t>(t.ny));
  for (int iy = 0; iy < t.ny; ++iy)
    for (int ix = 0; ix < t.nx; ++ix) {
      const Rect r = t.cell_rect(ix, iy);
      t.values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(t.nx) + static_cast<std::size_t>(ix)] =
          mode == ProjectionMode::min ? v.min_on(r, samples) : v.mean_on(r, 16);
    }
  return t;
}

double clipped_area(const Point& a, const Point& b, const Point& c, const Rect& r) {
  Polygon poly{a, b, c};
  poly = clip(poly, 0, r.xmin, 1.0);
  if (!poly.empty()) poly = clip(poly, 0, r.xmax, -1.0);
  if (!poly.empty()) poly = clip(poly, 1, r.ymin, 1.0);
  if (!poly.empty()) poly = clip(poly, 1, r.ymax, -1.0);
  return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

std::vector<double> mesh_cell_constants(const PotentialTable& table, const TriMesh& mesh, ProjectionMode mode) {
  std::vector<double> out(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cv = mesh.cells[c];
    const Point& a = mesh.vertices[cv[0]];
    const Point& b = mesh.vertices[cv[1]];
    const Point& p = mesh.vertices[cv[2]];
    const double xmin = std::min({a.x(), b.x(), p.x()}), xmax = std::max({a.x(), b.x(), p.x()});
    const double ymin = std::min({a.y(), b.y(), p.y()}), ymax = std::max({a.y(), b.y(), p.y()});
    const auto [ix0, ix1] = cell_range(xmin, xmax, table.origin.x(), table.cell_size, table.nx);
    const auto [iy0, iy1] = cell_range(ymin, ymax, table.origin.y(), table.cell_size, table.ny);
    if (ix0 == ix1 && iy0 == iy1) {
      out[c] = table.value(ix0, iy0);
      continue;
    }
    const double area = std::abs(mesh.signed_area(c));
    double sum = 0.0;
    double weight = 0.0;
    double m = std::numeric_limits<double>::infinity();
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy) {
        const double o = clipped_area(a, b, p, table.cell_rect(ix, iy));
        if (o <= 1e-12 * area) continue;
        sum += o * table.value(ix, iy);
        weight += o;
        m = std::min(m, table.value(ix, iy));
      }
    out[c] = mode == ProjectionMode::min ? m : sum / weight;
  }
  return out;
}

}  // namespace gpehho
