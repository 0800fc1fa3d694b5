#pragma once

#include "ddpc/types.hpp"

namespace ddpc {

enum class LpStatus { Optimal, Infeasible, Unbounded, Degenerate };

struct LpResult {
  LpStatus status = LpStatus::Degenerate;
  Vector x;
  double value = 0.0;
};

// Minimizes c'x subject to G x <= d (and optionally A_eq x = b_eq) with a dense
// two-phase simplex. Dantzig pricing switches to Bland's rule when the
// iteration count suggests cycling; ratio-test ties break at the lowest row.
LpResult solve_lp(const Vector& c, const Matrix& G, const Vector& d,
                  const Matrix& A_eq = Matrix(), const Vector& b_eq = Vector());

} // namespace ddpc
