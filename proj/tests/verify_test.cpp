#include "ddpc/equivalence.hpp"

#include "ddpc/condense.hpp"
#include "ddpc/explicit_solution.hpp"
#include "ddpc/qp.hpp"
#include "ddpc/rng.hpp"
#include "test_support.hpp"

#include "doctest.h"

#include <cmath>

using namespace ddpc;
namespace ts = test_support;

namespace {

struct Example1Rig {
  SystemModel model = ts::example1_model();
  HankelPartition part = ts::example1_partition();
  ReductionMaps maps = build_reduction_maps(part, ts::example1_vp());
  ParametricQP mpc =
      condense_mpc(model, ts::example1_weights(), ts::example1_constraints(), 2);
  ParametricQP beta = reduce_to_beta(
      build_dpc_raw(part, ts::example1_weights(), ts::example1_constraints()), maps);
};

struct IntegratorRig {
  SystemModel model = ts::double_integrator();
  DataRecord data = generate_excitation(model, 17, 42, 1.0);
  HankelPartition part = partition(data, ts::example2_horizons());
  ReductionMaps maps = build_reduction_maps(part);
  ParametricQP mpc =
      condense_mpc(model, ts::example2_weights(), ts::example2_constraints(), 5);
  ParametricQP beta = reduce_to_beta(
      build_dpc_raw(part, ts::example2_weights(), ts::example2_constraints()), maps);
};

} // namespace

TEST_CASE("project_past_window") {
  SUBCASE("full-row-rank data fixes every window") {
    const Example1Rig rig;
    Rng rng(103);
    for (int draw = 0; draw < 20; ++draw) {
      const Vector xi =
          (Vector(2) << rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)).finished();
      CHECK((project_past_window(rig.part, rig.maps, xi) - xi).cwiseAbs().maxCoeff() <=
            1e-9);
    }
  }
  SUBCASE("rank-deficient window space projects orthogonally") {
    // N_p = 3 with n = 2 gives rank(W_p) = N_p + n = 5 < 6 rows.
    Rng rng(107);
    const SystemModel s = ts::random_plant(rng, 2);
    const HorizonSpec horizons{3, 3, 2};
    const DataRecord r =
        generate_excitation(s, min_data_length(1, 3, 3, 2) + 2, 11, 1.0);
    const HankelPartition part = partition(r, horizons);
    const ReductionMaps maps = build_reduction_maps(part);
    REQUIRE(numerical_rank(part.W_p) == 5);

    for (int draw = 0; draw < 20; ++draw) {
      const Vector xi = Vector::NullaryExpr(6, [&] { return rng.uniform(-2.0, 2.0); });
      const Vector proj = project_past_window(part, maps, xi);
      // Idempotent and orthogonal: the residual is normal to the image.
      CHECK((project_past_window(part, maps, proj) - proj).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(std::abs(proj.dot(xi - proj)) <= 1e-9);
    }
    // Recorded columns are fixed points.
    for (Index c = 0; c < part.l; ++c) {
      const Vector col = part.W_p.col(c);
      CHECK((project_past_window(part, maps, col) - col).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  SUBCASE("dull data projects to zero") {
    DataRecord r;
    r.N_d = 7;
    r.m = r.p = 1;
    r.u_d = Vector::Zero(7);
    r.y_d = Vector::Zero(7);
    const HankelPartition part = partition(r, ts::example1_horizons());
    const ReductionMaps maps = build_reduction_maps(part);
    CHECK(project_past_window(part, maps, (Vector(2) << 1, -2).finished())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("KKT coupling on the scalar problem") {
  const Example1Rig rig;

  SUBCASE("origin window") {
    const CouplingReport rep = check_kkt_coupling(rig.mpc, rig.beta, rig.maps, rig.part,
                                                  rig.model, Vector::Zero(2), 1e-9);
    CHECK(rep.passed);
    CHECK(rep.uf_residual <= 1e-12);
    CHECK(rep.x0_mapped.cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("published window") {
    const Vector xi = (Vector(2) << 1.0, 2.1).finished();
    const CouplingReport rep =
        check_kkt_coupling(rig.mpc, rig.beta, rig.maps, rig.part, rig.model, xi, 1e-9);
    CHECK(rep.passed);
    CHECK(rep.uf_residual <= 1e-9);
    CHECK(rep.lambda_residual <= 1e-9);
    CHECK(rep.x0_mapped(0) == doctest::Approx(2.32));
  }
  SUBCASE("random windows") {
    Rng rng(109);
    int feasible = 0;
    for (int draw = 0; draw < 500; ++draw) {
      const Vector xi =
          (Vector(2) << rng.uniform(-1.0, 1.0), rng.uniform(-4.0, 4.0)).finished();
      const CouplingReport rep =
          check_kkt_coupling(rig.mpc, rig.beta, rig.maps, rig.part, rig.model, xi, 1e-6);
      if (std::isinf(rep.uf_residual)) continue; // window outside the feasible set
      CHECK(rep.passed);
      ++feasible;
    }
    CHECK(feasible > 300);
  }
}

TEST_CASE("KKT coupling on random plants") {
  Rng rng(113);
  CostWeights weights;
  weights.Q = Matrix::Constant(1, 1, 1.0);
  weights.R = Matrix::Constant(1, 1, 0.1);
  ConstraintSet cons;
  cons.M_u = (Matrix(2, 1) << 1, -1).finished();
  cons.v_u = Vector::Constant(2, 2.0);
  cons.M_y = (Matrix(2, 1) << 1, -1).finished();
  cons.v_y = Vector::Constant(2, 50.0);

  int plants_checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.next() % 3);
    const SystemModel s = ts::random_plant(rng, n);
    const HorizonSpec horizons{n, 3, n};
    const DataRecord r = generate_excitation(
        s, min_data_length(1, horizons.N_p, horizons.N_f, horizons.n) + 2, 400 + trial, 1.0);
    const HankelPartition part = partition(r, horizons);
    const ReductionMaps maps = build_reduction_maps(part);
    const DpcRawQP raw = build_dpc_raw(part, weights, cons);
    const ParametricQP beta = reduce_to_beta(raw, maps);
    const ParametricQP mpc = condense_mpc(s, weights, cons, horizons.N_f);

    const double y_scale = 1.0 + r.y_d.cwiseAbs().maxCoeff();
    int feasible = 0;
    for (int draw = 0; draw < 10; ++draw) {
      Vector xi(2 * horizons.N_p);
      for (Index j = 0; j < horizons.N_p; ++j) xi(j) = rng.uniform(-2.0, 2.0);
      for (Index j = horizons.N_p; j < xi.size(); ++j)
        xi(j) = rng.uniform(-2.0 * y_scale, 2.0 * y_scale);
      const CouplingReport rep =
          check_kkt_coupling(mpc, beta, maps, part, s, xi, 1e-6);
      if (std::isinf(rep.uf_residual)) continue;
      CHECK(rep.passed);
      ++feasible;
    }
    if (feasible > 0) ++plants_checked;
  }
  CHECK(plants_checked >= 25);
}

TEST_CASE("sampled equivalence of the two explicit laws") {
  const Example1Rig rig;
  // MPC domain covers the full image Gamma * xi-box so every feasible draw is compared.
  const ExplicitSolution mpc_sol =
      explicit_solve(rig.mpc, ts::sym_box(Vector::Constant(1, 6.0)));
  const ExplicitSolution dpc_sol =
      explicit_solve(rig.beta, ts::sym_box((Vector(2) << 1, 4).finished()));

  const EquivalenceReport rep =
      sampled_equivalence(mpc_sol, dpc_sol, rig.maps, rig.part, rig.model, 1000, 7);
  CHECK(rep.samples == 1000);
  CHECK(rep.compared > 700);
  CHECK(rep.max_uf_deviation <= 1e-9);

  const EquivalenceReport none =
      sampled_equivalence(mpc_sol, dpc_sol, rig.maps, rig.part, rig.model, 0, 7);
  CHECK(none.samples == 0);
  CHECK(none.compared == 0);
  CHECK(none.max_uf_deviation == 0.0);
}

TEST_CASE("closed loop at the origin stays at the origin") {
  const Example1Rig rig;
  const ExplicitSolution sol = explicit_solve(rig.mpc, ts::sym_box(Vector::Constant(1, 4.0)));
  Controller c;
  c.kind = ControllerKind::ExplicitMpc;
  c.solution = &sol;
  const Trajectory traj = closed_loop(rig.model, c, Vector::Zero(1), 10, 1);
  REQUIRE(traj.states.cols() == 11);
  REQUIRE(traj.inputs.cols() == 10);
  CHECK(traj.states.cwiseAbs().maxCoeff() == 0.0);
  CHECK(traj.inputs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(traj.outputs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all four controller kinds drive the integrator identically") {
  const IntegratorRig rig;
  const ExplicitSolution mpc_sol =
      explicit_solve(rig.mpc, ts::sym_box((Vector(2) << 25, 25).finished()));
  const ExplicitSolution dpc_sol =
      explicit_solve(rig.beta, ts::sym_box((Vector(4) << 1, 1, 25, 25).finished()));

  Controller c_emp{ControllerKind::ExplicitMpc, &mpc_sol, nullptr, nullptr, nullptr};
  Controller c_edp{ControllerKind::ExplicitDpc, &dpc_sol, nullptr, &rig.maps, &rig.part};
  Controller c_nmp{ControllerKind::NumericMpc, nullptr, &rig.mpc, nullptr, nullptr};
  Controller c_ndp{ControllerKind::NumericDpc, nullptr, &rig.beta, &rig.maps, &rig.part};

  const Vector x0 = (Vector(2) << 1.0, 0.0).finished();
  const Index steps = 30;
  const Trajectory t_emp = closed_loop(rig.model, c_emp, x0, steps, 2);
  const Trajectory t_edp = closed_loop(rig.model, c_edp, x0, steps, 2);
  const Trajectory t_nmp = closed_loop(rig.model, c_nmp, x0, steps, 2);
  const Trajectory t_ndp = closed_loop(rig.model, c_ndp, x0, steps, 2);

  CHECK((t_emp.states.col(0) - x0).cwiseAbs().maxCoeff() == 0.0);

  const auto dev = [](const Trajectory& a, const Trajectory& b) {
    return std::max((a.inputs - b.inputs).cwiseAbs().maxCoeff(),
                    (a.states - b.states).cwiseAbs().maxCoeff());
  };
  CHECK(dev(t_emp, t_nmp) <= 1e-6);
  CHECK(dev(t_emp, t_edp) <= 1e-6);
  CHECK(dev(t_emp, t_ndp) <= 1e-6);

  // Trajectory-level sanity: plant recursion, constraints, and regulation.
  for (Index k = 0; k < steps; ++k) {
    const Vector next = rig.model.A * t_emp.states.col(k) + rig.model.B * t_emp.inputs.col(k);
    CHECK((t_emp.states.col(k + 1) - next).cwiseAbs().maxCoeff() <= 1e-12);
    const Vector y = rig.model.C * t_emp.states.col(k) + rig.model.D * t_emp.inputs.col(k);
    CHECK((t_emp.outputs.col(k) - y).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(t_emp.inputs.cwiseAbs().maxCoeff() <= 1.0 + 1e-8);
  CHECK(t_emp.outputs.cwiseAbs().maxCoeff() <= 25.0 + 1e-8);
  CHECK(t_emp.states.col(steps).cwiseAbs().maxCoeff() <= 0.05); // regulated to the origin
}

TEST_CASE("closed loop error reporting") {
  SUBCASE("explicit domain exceeded") {
    const Example1Rig rig;
    const ExplicitSolution sol =
        explicit_solve(rig.mpc, ts::sym_box(Vector::Constant(1, 0.5)));
    Controller c{ControllerKind::ExplicitMpc, &sol, nullptr, nullptr, nullptr};
    CHECK_THROWS_AS((void)closed_loop(rig.model, c, Vector::Constant(1, 2.0), 5, 1),
                    std::runtime_error);
  }
  SUBCASE("no zero-input warm-up for a dead-beat plant") {
    // A = 0 erases the state in one step: A^{-N_p} x0 does not exist for x0 != 0.
    SystemModel s;
    s.A = Matrix::Zero(1, 1);
    s.B = Matrix::Constant(1, 1, 1.0);
    s.C = Matrix::Constant(1, 1, 1.0);
    s.D = Matrix::Zero(1, 1);
    const DataRecord r = generate_excitation(s, 9, 5, 1.0);
    const HankelPartition part = partition(r, HorizonSpec{1, 2, 1});
    const ReductionMaps maps = build_reduction_maps(part);
    const DpcRawQP raw =
        build_dpc_raw(part, ts::example1_weights(), ts::example1_constraints());
    const ParametricQP beta = reduce_to_beta(raw, maps);
    Controller c{ControllerKind::NumericDpc, nullptr, &beta, &maps, &part};
    CHECK_THROWS_AS((void)closed_loop(s, c, Vector::Constant(1, 1.0), 5, 1),
                    std::runtime_error);
    // The origin is reachable by the zero warm-up, so that run must succeed.
    const Trajectory traj = closed_loop(s, c, Vector::Zero(1), 5, 1);
    CHECK(traj.inputs.cwiseAbs().maxCoeff() <= 1e-9);
  }
}
