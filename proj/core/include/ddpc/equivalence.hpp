#pragma once

#include "ddpc/condense.hpp"
#include "ddpc/data_matrices.hpp"
#include "ddpc/explicit_solution.hpp"
#include "ddpc/system_model.hpp"
#include "ddpc/types.hpp"

#include <cstdint>

namespace ddpc {

// Outcome of one KKT-coupling check between the model-based QP and the
// reduced data-driven QP at a fixed past window xi:
//   u_f*(x0) = U_f W_p^+ xi + U_f V_p K_f beta*(xi),  lambda*(x0) = lambda_check*(xi),
// with x0 = Gamma W_p W_p^+ xi.
struct CouplingReport {
  double uf_residual = 0.0;
  double lambda_residual = 0.0;
  Vector x0_mapped;
  bool passed = false;
  bool degenerate = false; // either solve had a degenerate active set; lambda identity skipped
};

// Orthogonal projection of a past window onto the data image: W_p W_p^+ xi.
// Idempotent; windows the recorded system can produce are fixed points.
Vector project_past_window(const HankelPartition& part, const ReductionMaps& maps,
                           const Vector& xi);

// Solves both QPs numerically at the coupled parameters and reports the
// infinity-norm residuals of the input-sequence and multiplier identities.
// The multiplier identity is only asserted (and folded into `passed`) when
// both solves have a unique non-degenerate active set; otherwise the sample
// is flagged degenerate and passes on the u_f residual alone.
CouplingReport check_kkt_coupling(const ParametricQP& mpc, const ParametricQP& beta_qp,
                                  const ReductionMaps& maps, const HankelPartition& part,
                                  const SystemModel& model, const Vector& xi, double tol);

struct EquivalenceReport {
  double max_uf_deviation = 0.0;
  Index samples = 0;  // parameters drawn
  Index compared = 0; // samples where both explicit laws were defined
};

// Samples xi uniformly over the DPC solution's domain box and compares the
// input sequence recovered from the explicit DPC law against the explicit MPC
// law evaluated at x0 = Gamma W_p W_p^+ xi.
EquivalenceReport sampled_equivalence(const ExplicitSolution& mpc_sol,
                                      const ExplicitSolution& dpc_sol,
                                      const ReductionMaps& maps, const HankelPartition& part,
                                      const SystemModel& model, Index num_samples,
                                      std::uint64_t seed);

enum class ControllerKind { ExplicitMpc, ExplicitDpc, NumericMpc, NumericDpc };

// Receding-horizon controller description. Explicit kinds evaluate `solution`;
// numeric kinds re-solve `qp` each step. DPC kinds additionally need the data
// maps to recover u_f from beta and maintain the rolling (u_p, y_p) window.
struct Controller {
  ControllerKind kind = ControllerKind::ExplicitMpc;
  const ExplicitSolution* solution = nullptr;
  const ParametricQP* qp = nullptr;
  const ReductionMaps* maps = nullptr;
  const HankelPartition* part = nullptr;
};

struct Trajectory {
  Matrix states;  // n x (steps + 1)
  Matrix inputs;  // m x steps
  Matrix outputs; // p x steps
};

// Simulates the closed loop for `steps` steps, applying the first m entries of
// the predicted input sequence each step. DPC controllers are initialized by
// an N_p-step zero-input warm-up from the state preimage A^{-N_p} x0, so the
// plant reaches x0 exactly when the rolling window is first full. Throws
// std::runtime_error with "explicit domain exceeded" when a parameter leaves
// every stored region.
Trajectory closed_loop(const SystemModel& model, const Controller& controller,
                       const Vector& x0, Index steps, Index N_p);

} // namespace ddpc
