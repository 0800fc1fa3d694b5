#include "ddpc/equivalence.hpp"

#include "ddpc/linalg.hpp"
#include "ddpc/lp.hpp"
#include "ddpc/qp.hpp"
#include "ddpc/rng.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace ddpc {

namespace {

// A sample counts as degenerate when LICQ fails on the reported active set or
// a reported-active row carries a (numerically) zero multiplier; multiplier
// identities are not asserted there.
bool nondegenerate_active_set(const ParametricQP& qp, const QpSolution& sol) {
  const Index na = static_cast<Index>(sol.active_set.size());
  if (na == 0) return true;
  Matrix G_A(na, qp.decision_dim());
  for (Index i = 0; i < na; ++i) {
    G_A.row(i) = qp.G.row(sol.active_set[i]);
    if (sol.lambda(sol.active_set[i]) <= 1e-7) return false;
  }
  return numerical_rank(G_A) == na;
}

Vector recover_input_sequence(const HankelPartition& part, const ReductionMaps& maps,
                              const Vector& xi, const Vector& beta) {
  return part.U_f * (maps.W_p_pinv * xi) + maps.U_fV_p * (maps.K_f * beta);
}

Index past_horizon(const HankelPartition& part, const SystemModel& model) {
  return part.W_p.rows() / (model.m() + model.p());
}

} // namespace

Vector project_past_window(const HankelPartition& part, const ReductionMaps& maps,
                           const Vector& xi) {
  if (xi.size() != part.W_p.rows()) {
    throw std::invalid_argument("project_past_window: xi length must match W_p rows");
  }
  return part.W_p * (maps.W_p_pinv * xi);
}

CouplingReport check_kkt_coupling(const ParametricQP& mpc, const ParametricQP& beta_qp,
                                  const ReductionMaps& maps, const HankelPartition& part,
                                  const SystemModel& model, const Vector& xi, double tol) {
  CouplingReport report;
  const Vector xi_proj = project_past_window(part, maps, xi);
  const Matrix Gamma = gamma_matrix(model, past_horizon(part, model));
  report.x0_mapped = Gamma * xi_proj;

  const QpSolution mpc_sol = solve_qp(mpc.H, mpc.F * report.x0_mapped, mpc.G,
                                      mpc.E * report.x0_mapped + mpc.d);
  const QpSolution dpc_sol =
      solve_qp(beta_qp.H, beta_qp.F * xi, beta_qp.G, beta_qp.E * xi + beta_qp.d);
  if (mpc_sol.status != QpStatus::Optimal || dpc_sol.status != QpStatus::Optimal) {
    report.uf_residual = std::numeric_limits<double>::infinity();
    report.lambda_residual = std::numeric_limits<double>::infinity();
    report.passed = false;
    return report;
  }

  const Vector uf_dpc = recover_input_sequence(part, maps, xi, dpc_sol.z);
  report.uf_residual = (mpc_sol.z - uf_dpc).cwiseAbs().maxCoeff();
  report.lambda_residual = (mpc_sol.lambda - dpc_sol.lambda).cwiseAbs().maxCoeff();
  report.degenerate =
      !nondegenerate_active_set(mpc, mpc_sol) || !nondegenerate_active_set(beta_qp, dpc_sol);
  report.passed =
      report.uf_residual <= tol && (report.degenerate || report.lambda_residual <= tol);
  return report;
}

EquivalenceReport sampled_equivalence(const ExplicitSolution& mpc_sol,
                                      const ExplicitSolution& dpc_sol,
                                      const ReductionMaps& maps, const HankelPartition& part,
                                      const SystemModel& model, Index num_samples,
                                      std::uint64_t seed) {
  EquivalenceReport report;
  if (num_samples <= 0) return report;

  const Index dt = dpc_sol.d_theta;
  Vector lo(dt), hi(dt);
  for (Index j = 0; j < dt; ++j) {
    Vector cj = Vector::Zero(dt);
    cj(j) = 1.0;
    const LpResult lo_lp = solve_lp(cj, dpc_sol.domain.A, dpc_sol.domain.b);
    const LpResult hi_lp = solve_lp(-cj, dpc_sol.domain.A, dpc_sol.domain.b);
    if (lo_lp.status != LpStatus::Optimal || hi_lp.status != LpStatus::Optimal) {
      throw std::invalid_argument("sampled_equivalence: DPC domain must be bounded");
    }
    lo(j) = lo_lp.x(j);
    hi(j) = hi_lp.x(j);
  }

  const Matrix Gamma = gamma_matrix(model, past_horizon(part, model));
  Rng rng(seed);
  for (Index s = 0; s < num_samples; ++s) {
    Vector xi(dt);
    for (Index j = 0; j < dt; ++j) xi(j) = rng.uniform(lo(j), hi(j));
    ++report.samples;

    const EvalResult dpc_eval = evaluate(dpc_sol, xi);
    if (!dpc_eval.found) continue;
    const Vector x0 = Gamma * project_past_window(part, maps, xi);
    const EvalResult mpc_eval = evaluate(mpc_sol, x0);
    if (!mpc_eval.found) continue;

    const Vector uf_dpc = recover_input_sequence(part, maps, xi, dpc_eval.z);
    const double dev = (mpc_eval.z - uf_dpc).cwiseAbs().maxCoeff();
    report.max_uf_deviation = std::max(report.max_uf_deviation, dev);
    ++report.compared;
  }
  return report;
}

Trajectory closed_loop(const SystemModel& model, const Controller& controller,
                       const Vector& x0, Index steps, Index N_p) {
  model.validate();
  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  if (x0.size() != n) throw std::invalid_argument("closed_loop: x0 length must equal n");
  if (steps < 0) throw std::invalid_argument("closed_loop: steps must be nonnegative");

  const bool is_explicit = controller.kind == ControllerKind::ExplicitMpc ||
                           controller.kind == ControllerKind::ExplicitDpc;
  const bool is_dpc = controller.kind == ControllerKind::ExplicitDpc ||
                      controller.kind == ControllerKind::NumericDpc;
  if (is_explicit && controller.solution == nullptr) {
    throw std::invalid_argument("closed_loop: explicit controller needs a solution");
  }
  if (!is_explicit && controller.qp == nullptr) {
    throw std::invalid_argument("closed_loop: numeric controller needs a parametric QP");
  }
  if (is_dpc && (controller.maps == nullptr || controller.part == nullptr)) {
    throw std::invalid_argument("closed_loop: DPC controller needs reduction maps and data");
  }

  // DPC controllers start from a zero-input warm-up: run N_p steps from the
  // preimage A^{-N_p} x0 so the window is consistent and the plant sits at x0
  // when control begins.
  Vector x = x0;
  std::deque<Vector> u_past, y_past;
  if (is_dpc) {
    if (N_p <= 0) throw std::invalid_argument("closed_loop: DPC controller needs N_p > 0");
    Matrix An = Matrix::Identity(n, n);
    for (Index i = 0; i < N_p; ++i) An = model.A * An;
    Eigen::FullPivLU<Matrix> lu(An);
    const Vector x_pre = lu.solve(x0);
    if ((An * x_pre - x0).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + x0.cwiseAbs().maxCoeff())) {
      throw std::runtime_error("closed_loop: no zero-input warm-up reaches x0");
    }
    x = x_pre;
    const Vector u_zero = Vector::Zero(m);
    for (Index k = 0; k < N_p; ++k) {
      u_past.push_back(u_zero);
      y_past.push_back(model.C * x);
      x = model.A * x;
    }
  }

  auto stack_window = [&]() {
    Vector xi((m + p) * N_p);
    Index at = 0;
    for (const Vector& u : u_past) {
      xi.segment(at, m) = u;
      at += m;
    }
    for (const Vector& y : y_past) {
      xi.segment(at, p) = y;
      at += p;
    }
    return xi;
  };

  Trajectory traj;
  traj.states.resize(n, steps + 1);
  traj.inputs.resize(m, steps);
  traj.outputs.resize(p, steps);

  for (Index k = 0; k < steps; ++k) {
    traj.states.col(k) = x;
    const Vector theta = is_dpc ? stack_window() : x;

    Vector decision;
    if (is_explicit) {
      const EvalResult eval = evaluate(*controller.solution, theta);
      if (!eval.found) {
        throw std::runtime_error("closed_loop: explicit domain exceeded at step " +
                                 std::to_string(k));
      }
      decision = eval.z;
    } else {
      const ParametricQP& qp = *controller.qp;
      const QpSolution sol =
          solve_qp(qp.H, qp.F * theta, qp.G, qp.E * theta + qp.d);
      if (sol.status != QpStatus::Optimal) {
        throw std::runtime_error("closed_loop: online QP failed at step " + std::to_string(k));
      }
      decision = sol.z;
    }

    const Vector uf = is_dpc ? recover_input_sequence(*controller.part, *controller.maps,
                                                      theta, decision)
                             : decision;
    const Vector u = uf.head(m);
    const Vector y = model.C * x + model.D * u;
    traj.inputs.col(k) = u;
    traj.outputs.col(k) = y;
    x = model.A * x + model.B * u;

    if (is_dpc) {
      u_past.push_back(u);
      y_past.push_back(y);
      u_past.pop_front();
      y_past.pop_front();
    }
  }
  traj.states.col(steps) = x;
  return traj;
}

} // namespace ddpc
