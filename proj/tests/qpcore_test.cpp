#include "ddpc/lp.hpp"
#include "ddpc/qp.hpp"

#include "ddpc/condense.hpp"
#include "ddpc/polyhedron.hpp"
#include "ddpc/rng.hpp"
#include "test_support.hpp"

#include "doctest.h"

using namespace ddpc;
namespace ts = test_support;

TEST_CASE("solve_lp on hand geometry") {
  SUBCASE("interval minimum") {
    const LpResult r = solve_lp(Vector::Constant(1, 1.0),
                                (Matrix(2, 1) << 1, -1).finished(),
                                (Vector(2) << 1, 1).finished());
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(-1.0));
    CHECK(r.x(0) == doctest::Approx(-1.0));
  }
  SUBCASE("empty box is infeasible") {
    const LpResult r = solve_lp(Vector::Zero(1), (Matrix(2, 1) << 1, -1).finished(),
                                (Vector(2) << -1, -1).finished());
    CHECK(r.status == LpStatus::Infeasible);
  }
  SUBCASE("unbounded direction") {
    const LpResult r = solve_lp(Vector::Constant(1, -1.0), Matrix::Constant(1, 1, -1.0),
                                Vector::Zero(1)); // minimize -x s.t. x >= 0
    CHECK(r.status == LpStatus::Unbounded);
  }
  SUBCASE("Chebyshev center of the unit square") {
    const ChebyshevBall ball =
        chebyshev_center(ts::sym_box((Vector(2) << 1, 1).finished()));
    REQUIRE(ball.bounded);
    CHECK(ball.radius == doctest::Approx(1.0));
    CHECK(ball.center.cwiseAbs().maxCoeff() <= 1e-9);
  }
}

// Brute-force 2-d LP reference: enumerate all vertex candidates (row pairs).
static std::optional<double> vertex_lp_2d(const Vector& c, const Matrix& G, const Vector& d) {
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (Index i = 0; i < G.rows(); ++i) {
    for (Index j = i + 1; j < G.rows(); ++j) {
      Matrix A(2, 2);
      A.row(0) = G.row(i);
      A.row(1) = G.row(j);
      Eigen::FullPivLU<Matrix> lu(A);
      if (!lu.isInvertible()) continue;
      const Vector x = lu.solve((Vector(2) << d(i), d(j)).finished());
      if (((G * x - d).array() > 1e-8).any()) continue;
      best = std::min(best, c.dot(x));
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return best;
}

TEST_CASE("solve_lp matches vertex enumeration on random bounded problems") {
  Rng rng(29);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // A random polytope inside a box, so every LP is bounded.
    const Index extra = 2 + static_cast<Index>(rng.next() % 5);
    Matrix G(4 + extra, 2);
    Vector d(4 + extra);
    G.topRows(4) = ts::sym_box((Vector(2) << 2, 2).finished()).A;
    d.head(4).setConstant(2.0);
    for (Index r = 4; r < G.rows(); ++r) {
      G(r, 0) = rng.uniform(-1.0, 1.0);
      G(r, 1) = rng.uniform(-1.0, 1.0);
      d(r) = rng.uniform(-0.5, 1.5);
    }
    Vector c(2);
    c << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);

    const LpResult got = solve_lp(c, G, d);
    const auto want = vertex_lp_2d(c, G, d);
    if (!want) {
      CHECK(got.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(got.status == LpStatus::Optimal);
    CHECK(got.value == doctest::Approx(*want).epsilon(1e-7));
    CHECK(((G * got.x - d).array() <= 1e-8).all());
    ++compared;
  }
  CHECK(compared > 20); // the draw must exercise the optimal path, not only infeasibility
}

TEST_CASE("solve_qp on the published scalar problem") {
  const ParametricQP qp = condense_mpc(ts::example1_model(), ts::example1_weights(),
                                       ts::example1_constraints(), 2);

  SUBCASE("unconstrained minimum") {
    const QpSolution s = solve_qp(Matrix::Identity(2, 2), (Vector(2) << -1, 0).finished(),
                                  Matrix::Zero(0, 2), Vector::Zero(0));
    REQUIRE(s.status == QpStatus::Optimal);
    CHECK((s.z - (Vector(2) << 1, 0).finished()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("origin is optimal at x0 = 0") {
    const Vector x0 = Vector::Zero(1);
    const QpSolution s = solve_qp(qp.H, qp.F * x0, qp.G, qp.E * x0 + qp.d);
    REQUIRE(s.status == QpStatus::Optimal);
    CHECK(s.z.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(s.lambda.cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("input saturates at x0 = 3") {
    const Vector x0 = Vector::Constant(1, 3.0);
    // The unconstrained optimum -H^-1 F x0 = (-1.92, -0.84) violates u >= -1.
    CHECK(((-qp.H.ldlt().solve(qp.F * x0)) - (Vector(2) << -1.92, -0.84).finished())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    const QpSolution s = solve_qp(qp.H, qp.F * x0, qp.G, qp.E * x0 + qp.d);
    REQUIRE(s.status == QpStatus::Optimal);
    CHECK(s.z(0) == doctest::Approx(-1.0)); // u(0) = -1 active
    const auto oracle = ts::brute_force_qp(qp.H, qp.F * x0, qp.G, qp.E * x0 + qp.d);
    REQUIRE(oracle.has_value());
    CHECK((s.z - *oracle).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("non-PD Hessian is rejected") {
    CHECK_THROWS_AS((void)solve_qp(Matrix::Zero(2, 2), Vector::Zero(2), qp.G, qp.d),
                    std::invalid_argument);
  }
  SUBCASE("empty feasible set") {
    const QpSolution s =
        solve_qp(Matrix::Identity(1, 1), Vector::Zero(1), (Matrix(2, 1) << 1, -1).finished(),
                 (Vector(2) << -1, -1).finished());
    CHECK(s.status == QpStatus::Infeasible);
  }
}

TEST_CASE("solve_qp matches the active-set enumeration oracle") {
  Rng rng(31);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.next() % 4);
    const Index q = static_cast<Index>(rng.next() % 9);
    const Matrix X = Matrix::NullaryExpr(n, n, [&] { return rng.uniform(-1.0, 1.0); });
    const Matrix H = X.transpose() * X + 0.1 * Matrix::Identity(n, n);
    const Vector f = Vector::NullaryExpr(n, [&] { return rng.uniform(-2.0, 2.0); });
    const Matrix G = Matrix::NullaryExpr(q, n, [&] { return rng.uniform(-1.0, 1.0); });
    const Vector d = Vector::NullaryExpr(q, [&] { return rng.uniform(-0.5, 1.5); });

    const QpSolution got = solve_qp(H, f, G, d);
    const auto want = ts::brute_force_qp(H, f, G, d);
    if (!want) {
      CHECK(got.status == QpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(got.status == QpStatus::Optimal);
    CHECK((got.z - *want).cwiseAbs().maxCoeff() <= 1e-6);

    // KKT residuals and multiplier signs at the reported solution.
    CHECK((H * got.z + f + G.transpose() * got.lambda).cwiseAbs().maxCoeff() <= 1e-8);
    if (q > 0) CHECK(got.lambda.minCoeff() >= -1e-9);
    CHECK(std::abs(got.lambda.dot(G * got.z - d)) <= 1e-8); // complementary slackness

    // Strong duality spot check: primal objective equals the Lagrangian value.
    const double primal = 0.5 * got.z.dot(H * got.z) + f.dot(got.z);
    const double lagrangian = primal + got.lambda.dot(G * got.z - d);
    CHECK(std::abs(primal - lagrangian) <= 1e-8);
    ++optimal;
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 5);
}

TEST_CASE("solve_qp is deterministic") {
  Rng rng(37);
  const Matrix X = Matrix::NullaryExpr(3, 3, [&] { return rng.uniform(-1.0, 1.0); });
  const Matrix H = X.transpose() * X + 0.2 * Matrix::Identity(3, 3);
  const Vector f = (Vector(3) << -2, 1, 0.5).finished();
  const Matrix G = Matrix::NullaryExpr(6, 3, [&] { return rng.uniform(-1.0, 1.0); });
  const Vector d = Vector::Constant(6, 0.3);

  const QpSolution a = solve_qp(H, f, G, d);
  const QpSolution b = solve_qp(H, f, G, d);
  REQUIRE(a.status == QpStatus::Optimal);
  CHECK(a.active_set == b.active_set);
  CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
}
