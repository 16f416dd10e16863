#pragma once

#include "gpehho/fespace.hpp"
#include "gpehho/mesh.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gpehho {

enum class PotentialKind { zero, harmonic, lattice, disorder, table, custom };
enum class ProjectionMode { mean, min };

std::string to_string(PotentialKind kind);
std::string to_string(ProjectionMode mode);
ProjectionMode parse_projection_mode(const std::string& name);

/// Piecewise-constant values on a uniform Cartesian grid; values are stored
/// row-major, values[iy * nx + ix].
struct PotentialTable {
  Point origin{0.0, 0.0};
  double cell_size = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  Rect extent() const;
  Rect cell_rect(int ix, int iy) const;
  double value(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix)]; }
  /// Value of the cell containing x; points on grid lines belong to the
  /// cell above/right, points outside are clamped to the grid.
  double at(const Point& x) const;
  /// Throws invalid-grid unless the grid exactly tiles `domain`.
  void check_tiles(const Rect& domain) const;
};

PotentialTable read_table_json(std::istream& in);
void write_table_json(std::ostream& out, const PotentialTable& table);

/// Counter-based SplitMix64 draw number `counter` of stream `seed`.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter);

/// Trapping potential V >= 0.
class Potential {
public:
  static Potential zero();
  /// V(x) = |x|^2 / 2.
  static Potential harmonic();
  /// V(x) = |x|^2 / 2 + 15 (1 + sin(pi x1 / 2) sin(pi x2 / 2)).
  static Potential lattice();
  /// Coin-toss values in {10, 50} on a grid of the given cell size.
  static Potential disorder(const Rect& domain, double cell_size, std::uint64_t seed);
  static Potential table(PotentialTable table);
  /// `polynomial_degree` < 0 marks a non-polynomial field.
  static Potential custom(ScalarField f, int polynomial_degree = -1);

  PotentialKind kind() const { return kind_; }
  double operator()(const Point& x) const;
  /// Grid data for disorder and table potentials.
  const PotentialTable* grid() const { return table_ ? &*table_ : nullptr; }
  bool piecewise_constant() const { return kind_ == PotentialKind::zero || table_.has_value(); }
  /// Total degree for polynomial kinds, -1 otherwise.
  int polynomial_degree() const;
  /// Minimum of V over a closed rectangle: exact for zero, harmonic and grid
  /// kinds, sampled on samples x samples equispaced nodes otherwise.
  double min_on(const Rect& r, int samples) const;
  /// Mean of V over a rectangle: exact for zero, harmonic and grid kinds,
  /// tensor Gauss-Legendre with `quad_points` per direction otherwise.
  double mean_on(const Rect& r, int quad_points) const;

private:
  PotentialKind kind_ = PotentialKind::zero;
  std::optional<PotentialTable> table_;
  ScalarField custom_;
  int custom_degree_ = -1;
};

/// Piecewise-constant projection of V onto the grid of the given cell size
/// covering `domain`.
PotentialTable project_potential_p0(const Potential& v, const Rect& domain, double cell_size, ProjectionMode mode,
                                    int samples = 32);

/// One constant per mesh cell for a grid potential. A cell inside a single
/// grid cell takes its value; a cell overlapping several grid cells takes
/// the minimum (min mode) or the area-weighted mean (mean mode) over the
/// overlaps.
std::vector<double> mesh_cell_constants(const PotentialTable& table, const TriMesh& mesh, ProjectionMode mode);

/// Area of the intersection of a triangle with a rectangle.
double clipped_area(const Point& a, const Point& b, const Point& c, const Rect& r);

}  // namespace gpehho
