// Serial reference vs OpenMP element loops. The second argument selects the
// execution policy: 0 serial, 1 parallel.

#include "gpehho/gpe.hpp"
#include "gpehho/linear_solver.hpp"
#include "gpehho/transfer.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace gpehho;

namespace {

const Rect domain{-8, 8, -8, 8};

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

HybridVector random_state(const HhoSpace& space) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HybridVector v = space.zero_vector();
  for (Eigen::Index i = 0; i < v.values.size(); ++i) v.values[i] = u(rng);
  v.values /= v.bulk_norm();
  return v;
}

GpProblem nonlinear_problem() {
  GpProblem p;
  p.kappa = 100.0;
  p.potential = Potential::harmonic();
  return p;
}

void BM_SpaceAssembly(benchmark::State& state) {
  const TriMesh mesh = friedrichs_keller_level(domain, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    HhoSpace space(mesh, 1, 1.0, exec_of(state));
    benchmark::DoNotOptimize(space.matrix().nonZeros());
  }
  state.counters["cells"] = static_cast<double>(mesh.num_cells());
}

void BM_Reconstruct(benchmark::State& state) {
  const TriMesh mesh = friedrichs_keller_level(domain, static_cast<int>(state.range(0)));
  const HhoSpace space(mesh, 1, 1.0);
  const HybridVector v = random_state(space);
  for (auto _ : state) benchmark::DoNotOptimize(space.reconstruct(v, exec_of(state)).coeffs.data());
}

void BM_EnergyGradient(benchmark::State& state) {
  const TriMesh mesh = friedrichs_keller_level(domain, static_cast<int>(state.range(0)));
  const GpDiscretization disc(mesh, nonlinear_problem(), exec_of(state));
  const HybridVector v = random_state(disc.space());
  for (auto _ : state) {
    benchmark::DoNotOptimize(disc.energy(v));
    benchmark::DoNotOptimize(disc.gradient(v).data());
  }
}

void BM_MetricSolve(benchmark::State& state) {
  const TriMesh mesh = friedrichs_keller_level(domain, static_cast<int>(state.range(0)));
  const GpDiscretization disc(mesh, nonlinear_problem(), exec_of(state));
  const HybridVector u = random_state(disc.space());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(u.values.size());
  rhs.head(static_cast<Eigen::Index>(u.cell_dofs())) = u.cells();
  MetricSolver solver(disc.space(), LinearSolverKind::direct, exec_of(state));
  for (auto _ : state)
    benchmark::DoNotOptimize(solver.solve([&](std::size_t c) { return disc.metric_cell_block(c, u); }, rhs).data());
}

void BM_FieldDistance(benchmark::State& state) {
  const TriMesh mesh = friedrichs_keller_level(domain, static_cast<int>(state.range(0)));
  const GeometryCache geo = compute_geometry(mesh);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CellField a{2, Eigen::VectorXd(static_cast<Eigen::Index>(mesh.num_cells()) * cell_dim(2))};
  CellField b = a;
  for (Eigen::Index i = 0; i < a.coeffs.size(); ++i) {
    a.coeffs[i] = u(rng);
    b.coeffs[i] = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(field_distance(mesh, geo, a, b, exec_of(state)).l2);
}

void levels(benchmark::internal::Benchmark* b) {
  for (int level : {5, 6})
    for (int par : {0, 1}) b->Args({level, par});
  b->ArgNames({"level", "parallel"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_SpaceAssembly)->Apply(levels);
BENCHMARK(BM_Reconstruct)->Apply(levels);
BENCHMARK(BM_EnergyGradient)->Apply(levels);
BENCHMARK(BM_MetricSolve)->Apply(levels);
BENCHMARK(BM_FieldDistance)->Apply(levels);

BENCHMARK_MAIN();
