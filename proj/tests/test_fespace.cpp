#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpehho/basis.hpp"
#include "gpehho/error.hpp"
#include "gpehho/fespace.hpp"
#include "gpehho/quadrature.hpp"

#include <cmath>
#include <random>

using namespace gpehho;

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Closed form of the integral of x^a y^b over the reference triangle.
double dirichlet(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

GeometryCache one_cell(const Point& a, const Point& b, const Point& c) {
  return compute_geometry(from_cells({a, b, c}, {{0, 1, 2}}));
}

}  // namespace

TEST_CASE("quadrature closed-form checks") {
  const QuadratureRule t1 = make_quadrature(Shape::triangle, 1);
  double sum = 0.0;
  for (double w : t1.weights) sum += w;
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-15));

  const QuadratureRule t4 = make_quadrature(Shape::triangle, 4);
  double x2y2 = 0.0;
  for (std::size_t q = 0; q < t4.size(); ++q) x2y2 += t4.weights[q] * std::pow(t4.xi(q) * t4.eta(q), 2);
  CHECK(x2y2 == doctest::Approx(1.0 / 180.0).epsilon(1e-14));

  const QuadratureRule s3 = make_quadrature(Shape::segment, 3);
  double x3 = 0.0;
  for (std::size_t q = 0; q < s3.size(); ++q) x3 += s3.weights[q] * std::pow(s3.xi(q), 3);
  CHECK(x3 == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("quadrature exactness against the Dirichlet formula for every degree") {
  for (int deg = 0; deg <= max_quadrature_degree; ++deg) {
    const QuadratureRule rule = make_quadrature(Shape::triangle, deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
          s += rule.weights[q] * std::pow(rule.xi(q), a) * std::pow(rule.eta(q), b);
        const double exact = dirichlet(a, b);
        CHECK(std::abs(s - exact) <= 1e-13 * exact);
      }
    }
    const QuadratureRule seg = make_quadrature(Shape::segment, deg);
    for (int a = 0; a <= deg; ++a) {
      double s = 0.0;
      for (std::size_t q = 0; q < seg.size(); ++q) s += seg.weights[q] * std::pow(seg.xi(q), a);
      CHECK(std::abs(s - 1.0 / (a + 1)) <= 1e-13 / (a + 1));
    }
  }
}

TEST_CASE("unsupported quadrature degree") {
  try {
    make_quadrature(Shape::triangle, 21);
    FAIL("expected unsupported-degree");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_degree);
  }
}

TEST_CASE("cell basis is orthonormal on physical cells") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int l = 0; l <= 4; ++l) {
    const ReferenceCellBasis basis(l);
    CHECK(basis.size() == cell_dim(l));
    for (int trial = 0; trial < 5; ++trial) {
      const GeometryCache geo = one_cell(Point(u(rng), u(rng)), Point(2 + u(rng), u(rng)), Point(u(rng), 2 + u(rng)));
      const CellFrame frame{&geo.cells[0]};
      const QuadratureRule rule = make_quadrature(Shape::triangle, 2 * l);
      Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(basis.size(), basis.size());
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(basis.size());
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = frame.to_physical(rule.xi(q), rule.eta(q));
        const Eigen::VectorXd phi = cell_basis_values(frame, basis, x);
        const double w = rule.weights[q] * 2.0 * geo.cells[0].area;
        mass += w * phi * phi.transpose();
        mean += w * phi;
      }
      CHECK((mass - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(mean[0] == doctest::Approx(std::sqrt(geo.cells[0].area)).epsilon(1e-12));
      for (int i = 1; i < basis.size(); ++i) CHECK(std::abs(mean[i]) <= 1e-12);
      const Eigen::VectorXd at_origin = cell_basis_values(frame, basis, geo.cells[0].barycenter);
      CHECK(at_origin[0] == doctest::Approx(1.0 / std::sqrt(geo.cells[0].area)).epsilon(1e-13));
    }
  }
}

TEST_CASE("basis gradients match finite differences") {
  const ReferenceCellBasis basis(3);
  const GeometryCache geo = one_cell(Point(0.1, 0.2), Point(1.3, -0.1), Point(0.4, 0.9));
  const CellFrame frame{&geo.cells[0]};
  const Point x(0.5, 0.3);
  const double eps = 1e-6;
  const Eigen::MatrixX2d g = cell_basis_gradients(frame, basis, x);
  const Eigen::VectorXd dx =
      (cell_basis_values(frame, basis, x + Point(eps, 0)) - cell_basis_values(frame, basis, x - Point(eps, 0))) /
      (2 * eps);
  const Eigen::VectorXd dy =
      (cell_basis_values(frame, basis, x + Point(0, eps)) - cell_basis_values(frame, basis, x - Point(0, eps))) /
      (2 * eps);
  CHECK((g.col(0) - dx).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((g.col(1) - dy).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("face basis is orthonormal") {
  for (int k = 0; k <= 3; ++k) {
    const ReferenceFaceBasis basis(k);
    const Point a(0.3, 0.1), b(1.1, 0.7);
    const double len = (b - a).norm();
    const QuadratureRule rule = make_quadrature(Shape::segment, 2 * k);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd psi = basis.values(rule.xi(q)) / std::sqrt(len);
      mass += rule.weights[q] * len * psi * psi.transpose();
    }
    CHECK((mass - Eigen::MatrixXd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("project_cell examples") {
  const GeometryCache geo = one_cell(Point(0, 0), Point(1, 0), Point(0, 1));
  const CellFrame frame{&geo.cells[0]};
  const ReferenceCellBasis p0(0);
  const Eigen::VectorXd c = project_cell([](const Point& x) { return x.x(); }, p0, frame, 2);
  CHECK(cell_mean(c, geo.cells[0].area) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(eval_cell(frame, p0, c, Point(0.2, 0.2)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const ReferenceCellBasis p1(1);
  const Eigen::VectorXd c1 = project_cell([](const Point& x) { return x.x(); }, p1, frame, 2);
  CHECK(cell_mean(c1, geo.cells[0].area) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(eval_cell(frame, p1, c1, Point(0.7, 0.1)) == doctest::Approx(0.7).epsilon(1e-13));

  const Eigen::VectorXd cc = project_cell([](const Point&) { return 2.5; }, p1, frame, 2);
  CHECK(cell_mean(cc, geo.cells[0].area) == doctest::Approx(2.5).epsilon(1e-14));
  Eigen::VectorXd zero_mean = Eigen::VectorXd::Zero(3);
  zero_mean[2] = 1.0;
  CHECK(cell_mean(zero_mean, geo.cells[0].area) == 0.0);
}

TEST_CASE("polynomial reproduction, idempotence, contraction and commutation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GeometryCache geo = one_cell(Point(-0.3, 0.1), Point(0.8, -0.2), Point(0.2, 0.9));
  const CellFrame frame{&geo.cells[0]};
  for (int l = 0; l <= 4; ++l) {
    const ReferenceCellBasis basis(l);
    // random polynomial of degree l in monomial form
    std::vector<double> coef(static_cast<std::size_t>((l + 1) * (l + 1)));
    for (double& c : coef) c = u(rng);
    const ScalarField p = [&](const Point& x) {
      double s = 0.0;
      for (int a = 0; a <= l; ++a)
        for (int b = 0; a + b <= l; ++b)
          s += coef[static_cast<std::size_t>(a * (l + 1) + b)] * std::pow(x.x(), a) * std::pow(x.y(), b);
      return s;
    };
    const Eigen::VectorXd c = project_cell(p, basis, frame, 2 * l);
    CHECK(l2_error_cell(p, basis, frame, c, 2 * l + 2) <= 1e-12 * (1.0 + l2_norm_cell(p, frame, 2 * l)));

    const ScalarField f = [&](const Point& x) { return std::exp(x.x()) * std::sin(3 * x.y() + coef[0]); };
    const Eigen::VectorXd pf = project_cell(f, basis, frame, 20);
    const ScalarField pf_field = [&](const Point& x) { return eval_cell(frame, basis, pf, x); };
    const Eigen::VectorXd ppf = project_cell(pf_field, basis, frame, 2 * l);
    CHECK((ppf - pf).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + pf.norm()));
    CHECK(pf.norm() <= l2_norm_cell(f, frame, 20) + 1e-12);

    const ReferenceCellBasis b0(0);
    const Eigen::VectorXd p0_of_pf = project_cell(pf_field, b0, frame, l);
    const Eigen::VectorXd p0_of_f = project_cell(f, b0, frame, 20);
    CHECK(std::abs(p0_of_pf[0] - p0_of_f[0]) <= 1e-13);
    CHECK(std::abs(cell_mean(pf, geo.cells[0].area) - cell_mean(p0_of_f, geo.cells[0].area)) <= 1e-13);
  }
}

TEST_CASE("projection error decreases with degree for sin") {
  const GeometryCache geo = one_cell(Point(0, 0), Point(1, 0), Point(0, 1));
  const CellFrame frame{&geo.cells[0]};
  const ScalarField f = [](const Point& x) { return std::sin(x.x()); };
  double prev = 1e300;
  for (int l = 0; l <= 5; ++l) {
    const ReferenceCellBasis basis(l);
    const double err = l2_error_cell(f, basis, frame, project_cell(f, basis, frame, 20), 20);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("project_face examples and Pythagoras") {
  const ReferenceFaceBasis b0(0);
  const Eigen::VectorXd c = project_face([](const Point& x) { return x.x(); }, b0, Point(0, 0), Point(1, 0), 2);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k <= 3; ++k) {
    const ReferenceFaceBasis basis(k);
    const Point a(u(rng), u(rng)), b(2 + u(rng), 1 + u(rng));
    const double len = (b - a).norm();
    const double w1 = u(rng), w2 = u(rng);
    // polynomial of degree k along the face is reproduced
    const ScalarField p = [&](const Point& x) { return std::pow(w1 + (x - a).norm(), k); };
    const Eigen::VectorXd cp = project_face(p, basis, a, b, 2 * k);
    const QuadratureRule rule = make_quadrature(Shape::segment, 20);
    double err = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s = rule.xi(q);
      const double d = p(a + s * (b - a)) - basis.values(s).dot(cp) / std::sqrt(len);
      err += rule.weights[q] * len * d * d;
    }
    CHECK(std::sqrt(err) <= 1e-12);

    const ScalarField f = [&](const Point& x) { return std::cos(2 * x.x() + w2) * std::exp(x.y()); };
    const Eigen::VectorXd cf = project_face(f, basis, a, b, 20);
    double norm2 = 0.0, rest2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s = rule.xi(q);
      const double fv = f(a + s * (b - a));
      const double d = fv - basis.values(s).dot(cf) / std::sqrt(len);
      norm2 += rule.weights[q] * len * fv * fv;
      rest2 += rule.weights[q] * len * d * d;
    }
    CHECK(std::abs(norm2 - (cf.squaredNorm() + rest2)) <= 1e-12 * norm2);
  }
}
