#include "gpehho/gradient_flow.hpp"

#include "gpehho/csv.hpp"

#include <cmath>
#include <limits>

namespace gpehho {

void FlowOptions::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw Error(ErrorKind::invalid_parameter, "tol must lie in (0, 1)");
  if (max_iter < 1) throw Error(ErrorKind::invalid_parameter, "max_iter must be >= 1");
  if (!(tau_min > 0.0 && tau_min < tau0 && tau0 <= tau_max))
    throw Error(ErrorKind::invalid_parameter, "step bounds must satisfy 0 < tau_min < tau0 <= tau_max");
  if (!(pcg_tol > 0.0 && pcg_tol < 1.0)) throw Error(ErrorKind::invalid_parameter, "pcg_tol must lie in (0, 1)");
  if (certificate_h && !(*certificate_h > 0.0)) throw Error(ErrorKind::invalid_parameter, "certificate h must be > 0");
}

void FlowTrace::write_csv(std::ostream& out) const {
  out << "iter,energy,lambda,residual,tau,rejections\n";
  for (const FlowRecord& r : records)
    out << r.iter << ',' << csv_number(r.energy) << ',' << csv_number(r.lambda) << ',' << csv_number(r.residual)
        << ',' << csv_number(r.tau) << ',' << r.rejections << '\n';
}

HybridVector initial_iterate(const HhoSpace& space) {
  HybridVector v = space.zero_vector();
  const auto& geo = space.geometry();
  for (std::size_t c = 0; c < space.num_cells(); ++c) v.cell(c)[0] = std::sqrt(geo.cells[c].area);
  const auto nf = static_cast<Eigen::Index>(space.face_block());
  const auto offset = static_cast<Eigen::Index>(space.cell_dofs());
  for (std::size_t f = 0; f < space.mesh().num_faces(); ++f) {
    const std::int32_t fi = space.face_index(f);
    if (fi >= 0) v.values[offset + fi * nf] = std::sqrt(geo.faces[f].length);
  }
  v.values /= v.bulk_norm();
  return v;
}

HybridVector sign_align(HybridVector u, double pairing) {
  if (pairing < 0.0) u.values = -u.values;
  return u;
}

HybridVector sign_align(HybridVector u, const CellField& reference) {
  const int n = std::min(u.cell_block, reference.block());
  double pairing = 0.0;
  for (std::size_t c = 0; c < u.num_cells; ++c) pairing += u.cell(c).head(n).dot(reference.cell(c).head(n));
  return sign_align(std::move(u), pairing);
}

double mean_pairing(const HhoSpace& space, const HybridVector& u) {
  double s = 0.0;
  for (std::size_t c = 0; c < space.num_cells(); ++c) s += u.cell(c)[0] * std::sqrt(space.geometry().cells[c].area);
  return s;
}

FlowResult gradient_flow(const GpDiscretization& disc, const FlowOptions& options, const HybridVector* initial) {
  options.validate();
  const HhoSpace& space = disc.space();
  MetricSolver solver(space, options.linear_solver, disc.exec(), options.direct_limit, options.pcg_tol);
  const auto cell_dofs = static_cast<Eigen::Index>(space.cell_dofs());

  FlowResult result;
  HybridVector u = initial ? *initial : initial_iterate(space);
  u.values /= u.bulk_norm();
  double energy = disc.energy(u);
  double decrement = std::numeric_limits<double>::infinity();
  double tau = options.tau0;
  double last_tau = 0.0;
  int last_rejections = 0;
  int iter = 0;
  double lambda = 0.0;
  double residual = 0.0;

  for (;;) {
    const Eigen::VectorXd grad = disc.gradient(u);
    lambda = u.values.dot(grad);
    Eigen::VectorXd r = grad;
    r.head(cell_dofs) -= lambda * u.cells();
    residual = r.norm() / (std::abs(lambda) * u.bulk_norm());
    result.trace.records.push_back({iter, energy, lambda, residual, last_tau, last_rejections});
    if (decrement < options.tol) {
      if (residual < options.tol) break;
      result.residual_floor = disc.residual_floor(u, lambda);
      if (residual < result.residual_floor) break;
    }
    if (iter >= options.max_iter) break;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(u.values.size());
    rhs.head(cell_dofs) = u.cells();
    const Eigen::VectorXd g =
        solver.solve([&](std::size_t c) { return disc.metric_cell_block(c, u); }, rhs);
    result.linear_iterations += solver.last_iterations();
    const Eigen::VectorXd w = g / u.cells().dot(g.head(cell_dofs));

    int rejections = 0;
    bool accepted = false;
    HybridVector trial = u;
    double change = 0.0;
    const auto point = [&](double t) {
      HybridVector v = u;
      v.values = (1.0 - t) * u.values + t * w;
      v.values /= v.bulk_norm();
      return v;
    };
    for (double t = std::min(2.0 * tau, options.tau_max); t >= options.tau_min; t *= 0.5) {
      trial = point(t);
      change = disc.energy_change(u, r, lambda, trial);
      if (change <= 0.0) {
        accepted = true;
        tau = t;
        // Look one halving ahead and keep the lower energy.
        if (0.5 * t >= options.tau_min) {
          HybridVector half = point(0.5 * t);
          const double half_change = disc.energy_change(u, r, lambda, half);
          if (half_change < change) {
            trial = std::move(half);
            change = half_change;
            tau = 0.5 * t;
          }
        }
        break;
      }
      ++rejections;
    }
    if (!accepted)
      throw StagnationError("no energy-decreasing step size >= tau_min at iteration " + std::to_string(iter + 1),
                            result.trace);
    const double trial_energy = energy + change;
    decrement = std::abs(change) / std::abs(trial_energy);
    u = std::move(trial);
    energy = trial_energy;
    last_tau = tau;
    last_rejections = rejections;
    ++iter;
  }
  result.factorizations = solver.factorizations();

  GroundState& gs = result.state;
  const double pairing = mean_pairing(space, u);
  gs.u = sign_align(std::move(u), pairing);
  gs.energy = disc.energy(gs.u);
  gs.lambda = lambda;
  gs.iterations = iter;
  gs.residual = residual;
  gs.energy_decrement = decrement;
  if (disc.problem().mode == Mode::modified) {
    const double h = options.certificate_h ? *options.certificate_h : square_side_h(space.mesh());
    gs.certificate = certify(h, disc.problem().sigma, gs.energy, 2);
  }
  return result;
}

}  // namespace gpehho
