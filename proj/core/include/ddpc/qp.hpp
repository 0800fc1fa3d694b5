#pragma once

#include "ddpc/types.hpp"

namespace ddpc {

enum class QpStatus { Optimal, Infeasible, Degenerate };

struct QpSolution {
  QpStatus status = QpStatus::Degenerate;
  Vector z;          // optimizer (valid when optimal)
  Vector lambda;     // multipliers, one per inequality row (zero when inactive)
  IndexSet active_set; // binding rows at the optimum, sorted
};

struct QpOptions {
  double tol_feas = 1e-9;    // constraint violation tolerance (relative to 1+|d|)
  double tol_lambda = 1e-10; // multiplier negativity threshold for optimality
  Index max_iterations = 0;  // 0 selects 50 * (decision dim + rows)
};

// Primal active-set method for min 0.5 z'Hz + f'z s.t. G z <= d with H
// symmetric positive definite. Starts from a phase-1 LP point when needed.
// Blocking-constraint and drop ties break at the lowest row index, so results
// are deterministic. Weakly active rows (zero multiplier) are reported in
// active_set whenever they sit exactly on the boundary.
QpSolution solve_qp(const Matrix& H, const Vector& f, const Matrix& G, const Vector& d,
                    const QpOptions& options = {});

} // namespace ddpc
