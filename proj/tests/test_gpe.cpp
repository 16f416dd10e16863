#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpehho/error.hpp"
#include "gpehho/gpe.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace gpehho;

namespace {

constexpr double pi = 3.14159265358979323846;

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

TriMesh random_triangle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Point a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    const double dmax = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (area > 0.05 * dmax * dmax) return from_cells({a, b, c}, {{0, 1, 2}});
  }
}

HybridVector random_state(const HhoSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HybridVector v = space.zero_vector();
  for (Eigen::Index i = 0; i < v.values.size(); ++i) v.values[i] = u(rng);
  v.values /= v.bulk_norm();
  return v;
}

// Polynomial in monomials centred at a point.
struct Monomials {
  int degree;
  Point center;
  std::vector<double> c;
  double operator()(const Point& x) const {
    double s = 0.0;
    std::size_t i = 0;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) s += c[i++] * std::pow(x.x() - center.x(), a) * std::pow(x.y() - center.y(), b);
    return s;
  }
};

// int_T p^power on the single cell of `mesh`, exact for the integrand.
double integrate_power(const TriMesh& mesh, const Monomials& p, int power) {
  const Point a = mesh.vertices[static_cast<std::size_t>(mesh.cells[0][0])];
  const Point b = mesh.vertices[static_cast<std::size_t>(mesh.cells[0][1])];
  const Point c = mesh.vertices[static_cast<std::size_t>(mesh.cells[0][2])];
  const double jac = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  const QuadratureRule rule = make_quadrature(Shape::triangle, std::min(power * p.degree, max_quadrature_degree));
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = a + rule.xi(q) * (b - a) + rule.eta(q) * (c - a);
    s += rule.weights[q] * jac * std::pow(p(x), power);
  }
  return s;
}

GpProblem problem_on(const Rect& domain, Mode mode, int k, double kappa, Potential v = Potential::zero()) {
  GpProblem p;
  p.domain = domain;
  p.mode = mode;
  p.k = k;
  p.kappa = kappa;
  p.potential = std::move(v);
  return p;
}

}  // namespace

TEST_CASE("certificate constants") {
  CHECK(trace_constant(2) == doctest::Approx(1.0 / (pi * pi) + 1.0 / pi).epsilon(1e-15));
  CHECK(1.0 / (pi * pi) + trace_constant(2) == doctest::Approx(0.5209523).epsilon(1e-7));
  CHECK(trace_constant(3) == doctest::Approx(1.0 / (pi * pi) + 2.0 / (3.0 * pi)));

  const LowerBoundCertificate ok = certify(1.0 / 8.0, 0.5, 10.0, 2);
  CHECK(ok.slack == doctest::Approx(1.0 - 0.5 * 0.5209523 - 4.0 / 64.0 * 10.0 / (pi * pi)).epsilon(1e-7));
  CHECK(ok.slack == doctest::Approx(0.676).epsilon(1e-3));
  CHECK(ok.valid());
  CHECK(!certify(1.0 / 8.0, 2.0, 10.0, 2).valid());
  CHECK(error_kind([] { certify(0.0, 1.0, 1.0, 2); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([] { certify(1.0, 0.0, 1.0, 2); }) == ErrorKind::invalid_parameter);
  CHECK(error_kind([] { certify(1.0, 1.0, 1.0, 4); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("auto sigma") {
  CHECK(auto_sigma(1.0 / 8.0, 10.0, 2, 1.0) == doctest::Approx((1.0 - 0.0633257) / 0.5209523).epsilon(1e-6));
  CHECK(auto_sigma(1.0 / 8.0, 10.0, 2, 1.0) == doctest::Approx(1.79791).epsilon(1e-4));
  CHECK(auto_sigma(1.0, 0.0, 2, 1.0) == doctest::Approx(1.91956).epsilon(1e-5));
  CHECK(auto_sigma(1.0, 0.0, 2, 0.5) == doctest::Approx(0.5 * 1.91956).epsilon(1e-5));
  // By construction the certificate slack vanishes at the upper estimate.
  const double s = auto_sigma(0.25, 3.0, 2, 1.0);
  CHECK(std::abs(certify(0.25, s, 3.0, 2).slack) <= 1e-15);
  CHECK(certify(0.25, s, 2.9, 2).slack > 0.0);
  CHECK(error_kind([] { auto_sigma(2.0, 10.0, 2, 1.0); }) == ErrorKind::no_admissible_sigma);
  CHECK(error_kind([] { auto_sigma(1.0, 1.0, 2, 1.5); }) == ErrorKind::invalid_parameter);
}

TEST_CASE("Jensen chain on random polynomials") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int degree = 0; degree <= 4; ++degree)
    for (int trial = 0; trial < 200; ++trial) {
      const TriMesh mesh = random_triangle(rng);
      Monomials p{degree, mesh.barycenter(0), std::vector<double>(static_cast<std::size_t>(cell_dim(degree)))};
      for (double& c : p.c) c = u(rng);
      const double area = std::abs(mesh.signed_area(0));
      const double mean = integrate_power(mesh, p, 1) / area;
      const double l2 = integrate_power(mesh, p, 2);
      const double l4 = integrate_power(mesh, p, 4);
      CHECK(mean * mean * l2 <= l4 + 1e-12);
    }
}

TEST_CASE("modified and standard quartic terms against quadrature") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const TriMesh mesh = random_triangle(rng);
    const GpDiscretization disc(mesh, problem_on(Rect{}, Mode::modified, 0, 1.0));
    const HhoSpace& space = disc.space();
    HybridVector v = random_state(space, rng);
    const CellFrame fr = space.frame(0);
    const auto& basis = space.reference().cell_basis;
    const Eigen::VectorXd c = v.cell(0);
    const ScalarField vt = [&](const Point& x) { return eval_cell(fr, basis, c, x); };
    const double area = std::abs(mesh.signed_area(0));
    double quartic = 0.0;
    const QuadratureRule rule = make_quadrature(Shape::triangle, 8);
    for (std::size_t q = 0; q < rule.size(); ++q)
      quartic += rule.weights[q] * 2.0 * area * std::pow(vt(fr.to_physical(rule.xi(q), rule.eta(q))), 4);
    const double mean = cell_mean(c, area);
    CHECK(disc.quartic_standard(v) == doctest::Approx(quartic).epsilon(1e-12));
    CHECK(disc.quartic_modified(v) == doctest::Approx(mean * mean * c.squaredNorm()).epsilon(1e-13));
    CHECK(disc.quartic_modified(v) <= disc.quartic_standard(v) + 1e-12);
    CHECK(disc.quartic(v) == disc.quartic_modified(v));
  }
}

TEST_CASE("modified quartic is below the standard quartic on a mesh") {
  std::mt19937_64 rng(13);
  const TriMesh mesh = friedrichs_keller_level(Rect{-1, 1, -1, 1}, 3);
  const GpDiscretization disc(mesh, problem_on(Rect{-1, 1, -1, 1}, Mode::modified, 0, 50.0));
  for (int trial = 0; trial < 20; ++trial) {
    const HybridVector v = random_state(disc.space(), rng);
    CHECK(disc.quartic_modified(v) <= disc.quartic_standard(v));
  }
}

TEST_CASE("energy collapses to a_h/2 without potential and interaction") {
  std::mt19937_64 rng(14);
  const Rect dom{-2, 2, -2, 2};
  const TriMesh mesh = friedrichs_keller_level(dom, 2);
  for (int k = 0; k <= 2; ++k) {
    const GpDiscretization disc(mesh, problem_on(dom, Mode::standard, k, 0.0));
    const HybridVector v = random_state(disc.space(), rng);
    CHECK(disc.energy(v) == doctest::Approx(0.5 * disc.space().a_h(v, v)).epsilon(1e-13));
    CHECK(disc.energy(disc.space().zero_vector()) == 0.0);
    CHECK(disc.lambda_from_state(v) == doctest::Approx(2.0 * disc.energy(v)).epsilon(1e-14));
  }
}

TEST_CASE("modified mode needs k = 0, kappa must be non-negative") {
  const Rect dom{-1, 1, -1, 1};
  const TriMesh mesh = friedrichs_keller_level(dom, 1);
  CHECK(error_kind([&] { GpDiscretization(mesh, problem_on(dom, Mode::modified, 1, 1.0)); }) == ErrorKind::invalid_mode);
  CHECK(error_kind([&] { GpDiscretization(mesh, problem_on(dom, Mode::standard, 1, -1.0)); }) ==
        ErrorKind::invalid_parameter);
  CHECK(parse_mode("modified") == Mode::modified);
  CHECK(error_kind([] { parse_mode("other"); }) == ErrorKind::config);
}

TEST_CASE("gradient matches finite differences of the energy") {
  std::mt19937_64 rng(15);
  const Rect dom{-3, 3, -3, 3};
  const TriMesh mesh = friedrichs_keller_level(dom, 2);
  for (Mode mode : {Mode::standard, Mode::modified}) {
    const int k = mode == Mode::modified ? 0 : 1;
    const GpDiscretization disc(mesh, problem_on(dom, mode, k, 10.0, Potential::harmonic()));
    const HybridVector v = random_state(disc.space(), rng);
    const HybridVector d = random_state(disc.space(), rng);
    const double eps = 1e-5;
    HybridVector vp = v, vm = v;
    vp.values += eps * d.values;
    vm.values -= eps * d.values;
    const double fd = (disc.energy(vp) - disc.energy(vm)) / (2.0 * eps);
    CHECK(disc.gradient(v).dot(d.values) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("lambda-energy identity for arbitrary normalized states") {
  std::mt19937_64 rng(16);
  const Rect dom{-3, 3, -3, 3};
  const TriMesh mesh = friedrichs_keller_level(dom, 2);
  for (Mode mode : {Mode::standard, Mode::modified}) {
    for (int k = 0; k <= (mode == Mode::modified ? 0 : 2); ++k) {
      const GpDiscretization disc(mesh, problem_on(dom, mode, k, 100.0, Potential::lattice()));
      for (int trial = 0; trial < 5; ++trial) {
        const HybridVector v = random_state(disc.space(), rng);
        const double lambda = disc.rayleigh(v);
        CHECK(std::abs(lambda - disc.lambda_from_state(v)) <= 1e-12 * std::abs(lambda));
        CHECK(std::abs(lambda - 2.0 * disc.energy(v) - 50.0 * disc.quartic(v)) <= 1e-12 * std::abs(lambda));
      }
    }
  }
}

TEST_CASE("eigenvalue residual of the linear pencil") {
  const Rect dom{0, 1, 0, 1};
  const TriMesh mesh = friedrichs_keller_level(dom, 4);
  const GpDiscretization disc(mesh, problem_on(dom, Mode::standard, 1, 0.0));
  const HhoSpace& space = disc.space();
  const Eigen::MatrixXd a = Eigen::MatrixXd(space.matrix());
  const auto nc = static_cast<Eigen::Index>(space.cell_dofs());
  const Eigen::Index nf = a.rows() - nc;
  // Eliminate the massless face unknowns, then solve the cell eigenproblem.
  const Eigen::MatrixXd aff_inv_afc = a.bottomRightCorner(nf, nf).llt().solve(a.bottomLeftCorner(nf, nc));
  const Eigen::MatrixXd schur = a.topLeftCorner(nc, nc) - a.topRightCorner(nc, nf) * aff_inv_afc;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (schur + schur.transpose()));
  HybridVector u = space.zero_vector();
  u.values.head(nc) = es.eigenvectors().col(0);
  u.values.tail(nf) = -aff_inv_afc * u.values.head(nc);
  const double lambda = es.eigenvalues()[0];
  CHECK(lambda == doctest::Approx(2.0 * pi * pi).epsilon(5e-3));
  CHECK(disc.eigenvalue_residual(u, lambda).norm() <= 1e-10 * lambda);
  CHECK(disc.relative_residual(u, lambda) <= 1e-10);

  const double delta = 0.25;
  Eigen::VectorXd diff = disc.eigenvalue_residual(u, lambda + delta) - disc.eigenvalue_residual(u, lambda);
  diff.head(nc) += delta * u.values.head(nc);
  CHECK(diff.cwiseAbs().maxCoeff() <= 1e-13);

  HybridVector twice = u;
  twice.values *= 2.0;
  CHECK(error_kind([&] { disc.eigenvalue_residual(twice, lambda); }) == ErrorKind::invalid_state);
}

TEST_CASE("energy_change agrees with the energy difference") {
  std::mt19937_64 rng(17);
  const Rect dom{-4, 4, -4, 4};
  const TriMesh mesh = friedrichs_keller_level(dom, 3);
  for (Mode mode : {Mode::standard, Mode::modified}) {
    const int k = mode == Mode::modified ? 0 : 1;
    const GpDiscretization disc(mesh, problem_on(dom, mode, k, 30.0, Potential::harmonic()));
    const HybridVector u = random_state(disc.space(), rng);
    const Eigen::VectorXd grad = disc.gradient(u);
    const double lambda = u.values.dot(grad);
    Eigen::VectorXd r = grad;
    r.head(static_cast<Eigen::Index>(u.cell_dofs())) -= lambda * u.cells();
    for (double t : {1e-1, 1e-2, 1e-3}) {
      HybridVector v = u;
      v.values += t * random_state(disc.space(), rng).values;
      v.values /= v.bulk_norm();
      const double exact = disc.energy(v) - disc.energy(u);
      CHECK(disc.energy_change(u, r, lambda, v) ==
            doctest::Approx(exact).epsilon(1e-9 * std::abs(disc.energy(u)) / std::abs(exact)));
    }
  }
}

TEST_CASE("residual floor is a small positive rounding scale") {
  std::mt19937_64 rng(18);
  const Rect dom{-4, 4, -4, 4};
  const TriMesh mesh = friedrichs_keller_level(dom, 3);
  const GpDiscretization disc(mesh, problem_on(dom, Mode::standard, 1, 10.0, Potential::harmonic()));
  const HybridVector v = random_state(disc.space(), rng);
  const double lambda = disc.rayleigh(v);
  const double floor = disc.residual_floor(v, lambda);
  CHECK(floor > 0.0);
  CHECK(floor < 1e-12);
}

TEST_CASE("piecewise-constant potential contracts under the cell projection") {
  std::mt19937_64 rng(19);
  const Rect dom{-2, 2, -2, 2};
  const Potential disorder = Potential::disorder(dom, 1.0, 5);
  const TriMesh mesh = friedrichs_keller_level(dom, 3);
  const GpDiscretization disc(mesh, problem_on(dom, Mode::standard, 1, 0.0, disorder));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const ScalarField f = [&](const Point& x) { return std::exp(a * x.x() + b * x.y()) * std::cos(c * x.x() * x.y()); };
    const HybridVector v = disc.space().interpolate(f, 16);
    // (V f, f) by quadrature with the grid value at each cell barycenter.
    double exact = 0.0;
    for (std::size_t cell = 0; cell < mesh.num_cells(); ++cell) {
      const double nrm = l2_norm_cell(f, disc.space().frame(cell), 20);
      exact += disorder(mesh.barycenter(cell)) * nrm * nrm;
    }
    CHECK(disc.potential_term(v) <= exact * (1.0 + 1e-14));
  }
}
