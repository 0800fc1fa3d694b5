#include "examples.hpp"

#include "ddpc/equivalence.hpp"
#include "ddpc/explicit_solution.hpp"

#include <ostream>

namespace ddpc::cli {

Polyhedron symmetric_box(const Vector& half_widths) {
  const Index d = half_widths.size();
  Matrix A = Matrix::Zero(2 * d, d);
  Vector b(2 * d);
  for (Index j = 0; j < d; ++j) {
    A(2 * j, j) = 1.0;
    b(2 * j) = half_widths(j);
    A(2 * j + 1, j) = -1.0;
    b(2 * j + 1) = half_widths(j);
  }
  return Polyhedron{std::move(A), std::move(b)};
}

BuiltinSetup example1_setup() {
  BuiltinSetup s;
  s.model.A = Matrix::Constant(1, 1, 1.2);
  s.model.B = Matrix::Constant(1, 1, 1.0);
  s.model.C = Matrix::Constant(1, 1, 1.0);
  s.model.D = Matrix::Constant(1, 1, 1.0);

  s.weights.Q = Matrix::Constant(1, 1, 0.5);
  s.weights.R = Matrix::Constant(1, 1, 0.5);

  s.constraints.M_u = (Matrix(2, 1) << 1, -1).finished();
  s.constraints.v_u = (Vector(2) << 1, 1).finished();
  s.constraints.M_y = (Matrix(2, 1) << 1, -1).finished();
  s.constraints.v_y = (Vector(2) << 4, 4).finished();

  s.horizons = HorizonSpec{1, 2, 1};

  s.data.N_d = 7;
  s.data.m = 1;
  s.data.p = 1;
  s.data.u_d = (Vector(7) << -0.6, 0, 0, 0, 0.5, 0.5, 1).finished();
  s.data.y_d = (Vector(7) << -0.1, 0, 0, 0, 0.5, 1, 2.1).finished();

  // Published kernel basis (the coordinate directions of the three interior
  // columns) and Phi = 2 I, reproducing the printed K_f, H-check, F-check.
  Matrix V_p = Matrix::Zero(5, 3);
  V_p(1, 0) = 1.0;
  V_p(2, 1) = 1.0;
  V_p(3, 2) = 1.0;
  s.V_p = std::move(V_p);
  s.Phi = 2.0 * Matrix::Identity(2, 2);

  s.mpc_domain = Vector::Constant(1, 4.0);
  s.dpc_domain = (Vector(2) << 1.0, 4.0).finished();
  return s;
}

BuiltinSetup example2_setup(std::uint64_t seed, Index N_d) {
  BuiltinSetup s;
  s.model.A = (Matrix(2, 2) << 1, 1, 0, 1).finished();
  s.model.B = (Matrix(2, 1) << 0.5, 1).finished();
  s.model.C = (Matrix(1, 2) << 1, 0).finished();
  s.model.D = Matrix::Zero(1, 1);

  s.weights.Q = Matrix::Constant(1, 1, 1.0);
  s.weights.R = Matrix::Constant(1, 1, 0.01);

  s.constraints.M_u = (Matrix(2, 1) << 1, -1).finished();
  s.constraints.v_u = (Vector(2) << 1, 1).finished();
  s.constraints.M_y = (Matrix(2, 1) << 1, -1).finished();
  s.constraints.v_y = (Vector(2) << 25, 25).finished();

  s.horizons = HorizonSpec{2, 5, 2};
  s.data = generate_excitation(s.model, N_d, seed, 1.0);

  s.mpc_domain = (Vector(2) << 25.0, 25.0).finished();
  s.dpc_domain = (Vector(4) << 1.0, 1.0, 25.0, 25.0).finished();
  return s;
}

namespace {

const Eigen::IOFormat kMatrixFmt(Eigen::StreamPrecision, 0, "  ", "\n", "    ");

bool check(std::ostream& out, const char* label, bool ok) {
  out << (ok ? "  [ok]   " : "  [FAIL] ") << label << "\n";
  return ok;
}

} // namespace

int run_example1(std::ostream& out) {
  const BuiltinSetup s = example1_setup();
  const HankelPartition part = partition(s.data, s.horizons);
  const ReductionMaps maps = build_reduction_maps(part, s.V_p, s.Phi);
  const DpcRawQP raw = build_dpc_raw(part, s.weights, s.constraints);
  const ParametricQP beta_qp = reduce_to_beta(raw, maps);
  const ParametricQP mpc_qp = condense_mpc(s.model, s.weights, s.constraints, s.horizons.N_f);

  const ExplicitSolution mpc_sol = explicit_solve(mpc_qp, symmetric_box(s.mpc_domain));
  const ExplicitSolution dpc_sol = explicit_solve(beta_qp, symmetric_box(s.dpc_domain));

  out << "scalar example\n";
  out << "  W_p_pinv:\n" << maps.W_p_pinv.format(kMatrixFmt) << "\n";
  out << "  H_check:\n" << beta_qp.H.format(kMatrixFmt) << "\n";
  out << "  F_check:\n" << beta_qp.F.format(kMatrixFmt) << "\n";
  out << "  s_MPC = " << mpc_sol.s() << "\n";
  out << "  s_DPC = " << dpc_sol.s() << "\n";

  Matrix Wp_pinv_ref = Matrix::Zero(5, 2);
  Wp_pinv_ref(0, 0) = -2.0;
  Wp_pinv_ref(0, 1) = 2.0;
  Wp_pinv_ref(4, 0) = -0.4;
  Wp_pinv_ref(4, 1) = 2.4;
  const Matrix H_ref = (Matrix(2, 2) << 1.75, 2.5, 2.5, 3.75).finished();
  const Matrix F_ref = (Matrix(2, 2) << -1.34, 8.04, -1.96, 11.76).finished();

  bool ok = true;
  ok &= check(out, "W_p_pinv matches the published matrix (1e-9)",
              (maps.W_p_pinv - Wp_pinv_ref).cwiseAbs().maxCoeff() <= 1e-9);
  ok &= check(out, "H_check matches the published matrix (1e-9)",
              (beta_qp.H - H_ref).cwiseAbs().maxCoeff() <= 1e-9);
  ok &= check(out, "F_check matches the published matrix (1e-9)",
              (beta_qp.F - F_ref).cwiseAbs().maxCoeff() <= 1e-9);
  ok &= check(out, "s_MPC = 5", mpc_sol.s() == 5);
  ok &= check(out, "s_DPC = 5", dpc_sol.s() == 5);
  return ok ? 0 : 1;
}

int run_example2(std::ostream& out, std::uint64_t seed) {
  const BuiltinSetup s = example2_setup(seed);
  const HankelPartition part = partition(s.data, s.horizons);
  const ReductionMaps maps = build_reduction_maps(part);
  const DpcRawQP raw = build_dpc_raw(part, s.weights, s.constraints);
  const ParametricQP beta_qp = reduce_to_beta(raw, maps);
  const ParametricQP mpc_qp = condense_mpc(s.model, s.weights, s.constraints, s.horizons.N_f);

  const ExplicitSolution mpc_sol = explicit_solve(mpc_qp, symmetric_box(s.mpc_domain));
  const ExplicitSolution dpc_sol = explicit_solve(beta_qp, symmetric_box(s.dpc_domain));
  const RankReport rr = rank_report(part, maps, s.data.m, s.horizons.n, s.horizons.N_p,
                                    s.horizons.N_f);

  out << "double-integrator example (seed " << seed << ")\n";
  out << "  l = " << rr.l << ", nu = " << rr.nu << ", mu = " << maps.mu << "\n";
  out << "  s_MPC = " << mpc_sol.s() << "\n";
  out << "  s_DPC = " << dpc_sol.s() << "\n";
  if (mpc_sol.stats.licq_skips + dpc_sol.stats.licq_skips > 0) {
    out << "  degeneracy report: " << mpc_sol.stats.licq_skips << " MPC and "
        << dpc_sol.stats.licq_skips << " DPC facet probes skipped after jitter\n";
  }

  bool ok = true;
  ok &= check(out, "s_MPC = 33", mpc_sol.s() == 33);
  ok &= check(out, "s_DPC = s_MPC", dpc_sol.s() == mpc_sol.s());
  ok &= check(out, "mu = m*N_f = 5", maps.mu == 5);
  ok &= check(out, "l >= 11 and nu >= 7", rr.l >= 11 && rr.nu >= 7);
  ok &= check(out, "rank lemmas hold", rr.wp_lemma_ok && rr.ufvp_lemma_ok);
  return ok ? 0 : 1;
}

} // namespace ddpc::cli
