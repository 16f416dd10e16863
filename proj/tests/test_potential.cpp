#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpehho/error.hpp"
#include "gpehho/potential.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace gpehho;

namespace {

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("harmonic and lattice values") {
  const Potential v1 = Potential::harmonic();
  CHECK(v1(Point(0, 0)) == 0.0);
  CHECK(v1(Point(3, -4)) == doctest::Approx(12.5));
  const Potential v2 = Potential::lattice();
  CHECK(v2(Point(0, 0)) == doctest::Approx(15.0));
  CHECK(v2(Point(1, 1)) == doctest::Approx(1.0 + 30.0));
  CHECK(v2(Point(1, -1)) == doctest::Approx(1.0));
  CHECK(v1.polynomial_degree() == 2);
  CHECK(v2.polynomial_degree() == -1);
}

TEST_CASE("P0 projection of V1 on [0,1/4]^2") {
  const Rect cell{0.0, 0.25, 0.0, 0.25};
  const PotentialTable tmin = project_potential_p0(Potential::harmonic(), cell, 0.25, ProjectionMode::min);
  REQUIRE(tmin.values.size() == 1);
  CHECK(tmin.values[0] == 0.0);
  const PotentialTable tmean = project_potential_p0(Potential::harmonic(), cell, 0.25, ProjectionMode::mean);
  CHECK(tmean.values[0] == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
}

TEST_CASE("min projection of V1 is the value at the point nearest the origin") {
  const Rect domain{-2.0, 2.0, -2.0, 2.0};
  const PotentialTable t = project_potential_p0(Potential::harmonic(), domain, 0.5, ProjectionMode::min);
  CHECK(t.nx == 8);
  CHECK(t.ny == 8);
  for (int iy = 0; iy < t.ny; ++iy)
    for (int ix = 0; ix < t.nx; ++ix) {
      const Rect r = t.cell_rect(ix, iy);
      const double x = std::min(std::abs(r.xmin), std::abs(r.xmax));
      const double y = std::min(std::abs(r.ymin), std::abs(r.ymax));
      CHECK(t.value(ix, iy) == doctest::Approx(0.5 * (x * x + y * y)));
    }
}

TEST_CASE("lattice mean matches tensor quadrature, sampled min bounds the samples") {
  const Potential v2 = Potential::lattice();
  const Potential v2c = Potential::custom([&](const Point& x) { return v2(x); });
  const Rect r{0.3, 1.1, -0.7, 0.2};
  CHECK(v2.mean_on(r, 0) == doctest::Approx(v2c.mean_on(r, 20)).epsilon(1e-13));
  const double m = v2.min_on(r, 32);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(r.xmin, r.xmax), uy(r.ymin, r.ymax);
  double lowest = 1e300;
  for (int i = 0; i < 2000; ++i) lowest = std::min(lowest, v2(Point(ux(rng), uy(rng))));
  // 32 x 32 sampling resolves the minimum up to the curvature over one sample spacing.
  CHECK(m <= lowest + 1e-2);
  CHECK(m >= 0.0);
}

TEST_CASE("disorder potential values, determinism and seed sensitivity") {
  const Rect domain{-8.0, 8.0, -8.0, 8.0};
  const Potential a = Potential::disorder(domain, 1.0, 42);
  const Potential b = Potential::disorder(domain, 1.0, 42);
  const Potential c = Potential::disorder(domain, 1.0, 43);
  REQUIRE(a.grid() != nullptr);
  CHECK(a.grid()->nx == 16);
  CHECK(a.grid()->values == b.grid()->values);
  CHECK(a.grid()->values != c.grid()->values);
  int tens = 0;
  for (double v : a.grid()->values) {
    CHECK((v == 10.0 || v == 50.0));
    tens += v == 10.0;
  }
  CHECK(tens > 64);
  CHECK(tens < 192);
  // Cells are drawn in lexicographic (ix, iy) order.
  const PotentialTable& t = *a.grid();
  CHECK(t.value(0, 1) == ((splitmix64(42, 1) >> 63) == 0 ? 10.0 : 50.0));
  CHECK(t.value(1, 0) == ((splitmix64(42, 16) >> 63) == 0 ? 10.0 : 50.0));
}

TEST_CASE("projection of a disorder potential at its own grid size is the identity") {
  const Rect domain{-4.0, 4.0, -4.0, 4.0};
  const Potential d = Potential::disorder(domain, 1.0, 7);
  for (ProjectionMode mode : {ProjectionMode::min, ProjectionMode::mean}) {
    const PotentialTable t = project_potential_p0(d, domain, 1.0, mode);
    CHECK(t.values == d.grid()->values);
  }
}

TEST_CASE("table lookup on grid lines belongs to the upper/right cell") {
  PotentialTable t;
  t.origin = Point(0, 0);
  t.cell_size = 1.0;
  t.nx = 2;
  t.ny = 2;
  t.values = {1.0, 2.0, 3.0, 4.0};
  const Potential p = Potential::table(t);
  CHECK(p(Point(0.5, 0.5)) == 1.0);
  CHECK(p(Point(1.0, 0.5)) == 2.0);
  CHECK(p(Point(0.5, 1.0)) == 3.0);
  CHECK(p(Point(2.0, 2.0)) == 4.0);
  CHECK(p.min_on(Rect{0.5, 1.5, 0.5, 1.5}, 2) == 1.0);
  CHECK(p.mean_on(Rect{0.5, 1.5, 0.5, 1.5}, 2) == doctest::Approx(2.5));
}

TEST_CASE("table JSON round trip and validation") {
  const Potential d = Potential::disorder(Rect{0, 2, 0, 3}, 0.5, 3);
  std::stringstream ss;
  write_table_json(ss, *d.grid());
  const PotentialTable back = read_table_json(ss);
  CHECK(back.nx == 4);
  CHECK(back.ny == 6);
  CHECK(back.values == d.grid()->values);
  CHECK(back.cell_size == 0.5);

  std::istringstream bad_count(R"({"grid_origin":[0,0],"cell_size":1,"nx":2,"ny":2,"values":[1,2,3]})");
  CHECK(error_kind([&] { read_table_json(bad_count); }) == ErrorKind::invalid_grid);
  std::istringstream negative(R"({"grid_origin":[0,0],"cell_size":1,"nx":1,"ny":1,"values":[-1]})");
  CHECK(error_kind([&] { read_table_json(negative); }) == ErrorKind::invalid_grid);
  std::istringstream missing(R"({"cell_size":1,"nx":1,"ny":1,"values":[1]})");
  CHECK(error_kind([&] { read_table_json(missing); }) == ErrorKind::config);
}

TEST_CASE("grids that do not tile the domain are rejected") {
  const Rect domain{-8.0, 8.0, -8.0, 8.0};
  CHECK(error_kind([&] { project_potential_p0(Potential::harmonic(), domain, 0.3, ProjectionMode::min); }) ==
        ErrorKind::invalid_grid);
  CHECK(error_kind([&] { Potential::disorder(domain, 3.0, 1); }) == ErrorKind::invalid_grid);
  CHECK(error_kind([&] { Potential::disorder(domain, 0.0, 1); }) == ErrorKind::invalid_grid);
  PotentialTable t = project_potential_p0(Potential::harmonic(), domain, 1.0, ProjectionMode::min);
  t.check_tiles(domain);
  CHECK(error_kind([&] { t.check_tiles(Rect{-8.0, 9.0, -8.0, 8.0}); }) == ErrorKind::invalid_grid);
}

TEST_CASE("mesh cell constants") {
  const Rect domain{-8.0, 8.0, -8.0, 8.0};
  const PotentialTable t = project_potential_p0(Potential::harmonic(), domain, 0.25, ProjectionMode::min);
  // Level 7: mesh squares of side 1/8 nest in the 1/4 grid.
  const TriMesh fine = friedrichs_keller_level(domain, 7);
  const std::vector<double> vc = mesh_cell_constants(t, fine, ProjectionMode::min);
  for (std::size_t c = 0; c < fine.num_cells(); c += 97) CHECK(vc[c] == t.at(fine.barycenter(c)));

  // Level 5: each mesh cell overlaps several grid cells.
  const TriMesh coarse = friedrichs_keller_level(domain, 5);
  const std::vector<double> vmin = mesh_cell_constants(t, coarse, ProjectionMode::min);
  const std::vector<double> vmean = mesh_cell_constants(t, coarse, ProjectionMode::mean);
  for (std::size_t c = 0; c < coarse.num_cells(); ++c) {
    const auto& cv = coarse.cells[c];
    double m = 1e300;
    for (int i = 0; i < 3; ++i) m = std::min(m, Potential::harmonic()(coarse.vertices[static_cast<std::size_t>(cv[i])]));
    CHECK(vmin[c] <= m);
    CHECK(vmin[c] <= vmean[c]);
  }
}

TEST_CASE("clipped area") {
  const Point a(0, 0), b(1, 0), c(0, 1);
  CHECK(clipped_area(a, b, c, Rect{-1, 2, -1, 2}) == doctest::Approx(0.5));
  CHECK(clipped_area(a, b, c, Rect{0, 0.5, 0, 0.5}) == doctest::Approx(0.25));
  CHECK(clipped_area(a, b, c, Rect{0.5, 1, 0.5, 1}) == doctest::Approx(0.0));
  CHECK(clipped_area(a, b, c, Rect{0.25, 0.75, 0, 1}) == doctest::Approx(0.5 * (0.75 * 0.75 - 0.25 * 0.25)));
}
