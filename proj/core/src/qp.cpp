#include "ddpc/qp.hpp"

#include "ddpc/linalg.hpp"
#include "ddpc/lp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <stdexcept>

namespace ddpc {

namespace {

// Solves the equality-constrained subproblem min 0.5 z'Hz + f'z s.t. G_W z = d_W
// through the bordered KKT system; returns false when the system is singular
// (dependent working set).
bool kkt_solve(const Matrix& H, const Vector& f, const Matrix& G, const Vector& d,
               const std::vector<Index>& working, Vector& z_eq, Vector& lambda_eq) {
  const Index n = H.rows();
  const Index k = static_cast<Index>(working.size());
  Matrix KKT = Matrix::Zero(n + k, n + k);
  KKT.topLeftCorner(n, n) = H;
  Vector rhs(n + k);
  rhs.head(n) = -f;
  for (Index i = 0; i < k; ++i) {
    KKT.block(0, n + i, n, 1) = G.row(working[i]).transpose();
    KKT.block(n + i, 0, 1, n) = G.row(working[i]);
    rhs(n + i) = d(working[i]);
  }
  Eigen::PartialPivLU<Matrix> lu(KKT);
  const Vector sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;
  if ((KKT * sol - rhs).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
    return false;
  }
  z_eq = sol.head(n);
  lambda_eq = sol.tail(k);
  return true;
}

} // namespace

QpSolution solve_qp(const Matrix& H, const Vector& f, const Matrix& G, const Vector& d,
                    const QpOptions& options) {
  const Index n = H.rows();
  const Index q = G.rows();
  if (H.cols() != n || f.size() != n) {
    throw std::invalid_argument("solve_qp: H and f dimensions are inconsistent");
  }
  if (q > 0 && G.cols() != n) throw std::invalid_argument("solve_qp: G column count must match H");
  if (d.size() != q) throw std::invalid_argument("solve_qp: d length must match G rows");
  if (!is_positive_definite(H)) {
    throw std::invalid_argument("solve_qp: H must be symmetric positive definite");
  }

  QpSolution sol;
  sol.lambda = Vector::Zero(q);

  const Vector z_free = H.ldlt().solve(-f);
  if (q == 0) {
    sol.status = QpStatus::Optimal;
    sol.z = z_free;
    return sol;
  }

  auto slack = [&](const Vector& z, Index i) { return d(i) - G.row(i).dot(z); };
  auto feasible = [&](const Vector& z) {
    for (Index i = 0; i < q; ++i) {
      if (slack(z, i) < -options.tol_feas * (1.0 + std::abs(d(i)))) return false;
    }
    return true;
  };

  // Start at the unconstrained minimum when it is already feasible, otherwise
  // fall back to a phase-1 LP point (min t s.t. G z - t 1 <= d, t >= 0).
  Vector z;
  if (feasible(z_free)) {
    z = z_free;
  } else {
    Matrix G1(q + 1, n + 1);
    G1.topLeftCorner(q, n) = G;
    G1.topRightCorner(q, 1).setConstant(-1.0);
    G1.row(q).setZero();
    G1(q, n) = -1.0;
    Vector d1(q + 1);
    d1.head(q) = d;
    d1(q) = 0.0;
    Vector c1 = Vector::Zero(n + 1);
    c1(n) = 1.0;
    const LpResult phase1 = solve_lp(c1, G1, d1);
    if (phase1.status != LpStatus::Optimal) {
      sol.status = QpStatus::Degenerate;
      return sol;
    }
    if (phase1.x(n) > options.tol_feas * 10.0 + 1e-12) {
      sol.status = QpStatus::Infeasible;
      return sol;
    }
    z = phase1.x.head(n);
  }

  std::vector<Index> working;
  const Index cap =
      options.max_iterations > 0 ? options.max_iterations : 50 * (n + q);

  for (Index iter = 0; iter < cap; ++iter) {
    Vector z_eq, lambda_eq;
    if (!kkt_solve(H, f, G, d, working, z_eq, lambda_eq)) {
      sol.status = QpStatus::Degenerate;
      return sol;
    }
    const Vector p = z_eq - z;

    if (p.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + z.cwiseAbs().maxCoeff())) {
      // Stationary on the working set: optimal unless a multiplier is negative.
      Index drop = -1;
      double most_negative = -options.tol_lambda;
      for (Index i = 0; i < static_cast<Index>(working.size()); ++i) {
        const bool lower_row_tie =
            drop >= 0 && lambda_eq(i) == most_negative && working[i] < working[drop];
        if (lambda_eq(i) < most_negative || lower_row_tie) {
          most_negative = lambda_eq(i);
          drop = i;
        }
      }
      if (drop < 0) {
        sol.status = QpStatus::Optimal;
        sol.z = z_eq;
        for (Index i = 0; i < static_cast<Index>(working.size()); ++i) {
          sol.lambda(working[i]) = std::max(0.0, lambda_eq(i));
        }
        for (Index i = 0; i < q; ++i) {
          if (slack(sol.z, i) <= options.tol_feas * (1.0 + std::abs(d(i)))) {
            sol.active_set.push_back(i);
          }
        }
        return sol;
      }
      working.erase(working.begin() + drop);
      continue;
    }

    // Largest step along p before a non-working row blocks.
    double alpha = 1.0;
    Index blocking = -1;
    for (Index i = 0; i < q; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double gp = G.row(i).dot(p);
      if (gp > 1e-12 * (1.0 + G.row(i).cwiseAbs().maxCoeff())) {
        const double ai = slack(z, i) / gp;
        if (ai < alpha - 1e-14) {
          alpha = ai;
          blocking = i;
        }
      }
    }
    alpha = std::max(0.0, alpha);
    z += alpha * p;
    if (blocking >= 0) working.push_back(blocking);
  }

  sol.status = QpStatus::Degenerate;
  return sol;
}

} // namespace ddpc
