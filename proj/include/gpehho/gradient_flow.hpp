#pragma once

#include "gpehho/error.hpp"
#include "gpehho/gpe.hpp"
#include "gpehho/linear_solver.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace gpehho {

struct FlowOptions {
  double tol = 1e-12;
  int max_iter = 1000;
  double tau0 = 1.0;
  double tau_min = 0x1p-30;
  double tau_max = 4.0;
  LinearSolverKind linear_solver = LinearSolverKind::automatic;
  /// Full direct factorization up to this many dofs under `automatic`.
  std::size_t direct_limit = 300000;
  double pcg_tol = 1e-13;
  /// Mesh size entering the certificate in modified mode; defaults to the
  /// square side of a Friedrichs-Keller mesh.
  std::optional<double> certificate_h;

  /// Throws invalid-parameter on out-of-range settings.
  void validate() const;
};

struct FlowRecord {
  int iter = 0;
  double energy = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  double tau = 0.0;
  int rejections = 0;
};

struct FlowTrace {
  std::vector<FlowRecord> records;
  /// CSV with header iter,energy,lambda,residual,tau,rejections.
  void write_csv(std::ostream& out) const;
};

struct FlowResult {
  GroundState state;
  FlowTrace trace;
  int linear_iterations = 0;
  int factorizations = 0;
  /// Last evaluated rounding floor of the residual (0 if never needed).
  double residual_floor = 0.0;
};

/// Raised when no step size >= tau_min decreases the energy.
class StagnationError : public Error {
public:
  StagnationError(const std::string& what, FlowTrace trace)
      : Error(ErrorKind::stagnation, what), trace_(std::move(trace)) {}
  const FlowTrace& trace() const { return trace_; }

private:
  FlowTrace trace_;
};

/// The constant function 1 on every cell and interior face, normalized in
/// the bulk L2 norm.
HybridVector initial_iterate(const HhoSpace& space);

/// Negates u iff the pairing with the reference is negative.
HybridVector sign_align(HybridVector u, double pairing);
/// Aligns against a reference field on the same mesh, in the hierarchical
/// orthonormal basis (degrees may differ).
HybridVector sign_align(HybridVector u, const CellField& reference);
/// (1, u_T): the pairing with the constant reference field.
double mean_pairing(const HhoSpace& space, const HybridVector& u);

/// Energy-adaptive Sobolev gradient flow for the discrete ground state.
/// Without `initial` the flow starts from initial_iterate(). Stops once the
/// relative energy decrement is below tol and the residual is below tol or
/// below its rounding floor, whichever is larger.
FlowResult gradient_flow(const GpDiscretization& disc, const FlowOptions& options,
                         const HybridVector* initial = nullptr);

}  // namespace gpehho
