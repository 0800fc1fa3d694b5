#pragma once

#include "ddpc/condense.hpp"
#include "ddpc/data_matrices.hpp"
#include "ddpc/linalg.hpp"
#include "ddpc/polyhedron.hpp"
#include "ddpc/rng.hpp"
#include "ddpc/system_model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <bit>
#include <limits>
#include <optional>
#include <stdexcept>

namespace test_support {

using ddpc::Index;
using ddpc::Matrix;
using ddpc::Vector;

// {theta : lo <= theta <= hi}.
inline ddpc::Polyhedron make_box(const Vector& lo, const Vector& hi) {
  const Index d = lo.size();
  Matrix A = Matrix::Zero(2 * d, d);
  Vector b(2 * d);
  for (Index j = 0; j < d; ++j) {
    A(2 * j, j) = 1.0;
    b(2 * j) = hi(j);
    A(2 * j + 1, j) = -1.0;
    b(2 * j + 1) = -lo(j);
  }
  return ddpc::Polyhedron{A, b};
}

inline ddpc::Polyhedron sym_box(const Vector& half_widths) {
  return make_box(-half_widths, half_widths);
}

// ----- published fixtures: scalar plant -----

inline ddpc::SystemModel example1_model() {
  ddpc::SystemModel s;
  s.A = Matrix::Constant(1, 1, 1.2);
  s.B = Matrix::Constant(1, 1, 1.0);
  s.C = Matrix::Constant(1, 1, 1.0);
  s.D = Matrix::Constant(1, 1, 1.0);
  return s;
}

inline ddpc::CostWeights example1_weights() {
  ddpc::CostWeights w;
  w.Q = Matrix::Constant(1, 1, 0.5);
  w.R = Matrix::Constant(1, 1, 0.5);
  return w;
}

inline ddpc::ConstraintSet example1_constraints() {
  ddpc::ConstraintSet c;
  c.M_u = (Matrix(2, 1) << 1, -1).finished();
  c.v_u = (Vector(2) << 1, 1).finished();
  c.M_y = (Matrix(2, 1) << 1, -1).finished();
  c.v_y = (Vector(2) << 4, 4).finished();
  return c;
}

inline ddpc::DataRecord example1_data() {
  ddpc::DataRecord r;
  r.N_d = 7;
  r.m = 1;
  r.p = 1;
  r.u_d = (Vector(7) << -0.6, 0, 0, 0, 0.5, 0.5, 1).finished();
  r.y_d = (Vector(7) << -0.1, 0, 0, 0, 0.5, 1, 2.1).finished();
  return r;
}

inline ddpc::HorizonSpec example1_horizons() { return ddpc::HorizonSpec{1, 2, 1}; }

inline ddpc::HankelPartition example1_partition() {
  return ddpc::partition(example1_data(), example1_horizons());
}

// Published kernel basis (coordinate directions of the interior columns).
inline Matrix example1_vp() {
  Matrix V = Matrix::Zero(5, 3);
  V(1, 0) = 1.0;
  V(2, 1) = 1.0;
  V(3, 2) = 1.0;
  return V;
}

// ----- published fixtures: double integrator -----

inline ddpc::SystemModel double_integrator() {
  ddpc::SystemModel s;
  s.A = (Matrix(2, 2) << 1, 1, 0, 1).finished();
  s.B = (Matrix(2, 1) << 0.5, 1).finished();
  s.C = (Matrix(1, 2) << 1, 0).finished();
  s.D = Matrix::Zero(1, 1);
  return s;
}

inline ddpc::CostWeights example2_weights() {
  ddpc::CostWeights w;
  w.Q = Matrix::Constant(1, 1, 1.0);
  w.R = Matrix::Constant(1, 1, 0.01);
  return w;
}

inline ddpc::ConstraintSet example2_constraints() {
  ddpc::ConstraintSet c;
  c.M_u = (Matrix(2, 1) << 1, -1).finished();
  c.v_u = (Vector(2) << 1, 1).finished();
  c.M_y = (Matrix(2, 1) << 1, -1).finished();
  c.v_y = (Vector(2) << 25, 25).finished();
  return c;
}

inline ddpc::HorizonSpec example2_horizons() { return ddpc::HorizonSpec{2, 5, 2}; }

// ----- random plants -----

// Draws a controllable and observable SISO plant with spectral radius <= 0.95
// (so generated data stays well-scaled over short records).
inline ddpc::SystemModel random_plant(ddpc::Rng& rng, Index n) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    ddpc::SystemModel s;
    s.A = Matrix::NullaryExpr(n, n, [&] { return rng.uniform(-1.0, 1.0); });
    s.B = Matrix::NullaryExpr(n, 1, [&] { return rng.uniform(-1.0, 1.0); });
    s.C = Matrix::NullaryExpr(1, n, [&] { return rng.uniform(-1.0, 1.0); });
    s.D = Matrix::Zero(1, 1);

    const double rho = s.A.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0.95) s.A *= 0.95 / rho;

    Matrix ctrb(n, n);
    Matrix col = s.B;
    for (Index k = 0; k < n; ++k) {
      ctrb.col(k) = col;
      col = s.A * col;
    }
    if (ddpc::numerical_rank(ctrb) < n) continue;
    if (ddpc::numerical_rank(ddpc::observability_matrix(s, n)) < n) continue;
    return s;
  }
  throw std::runtime_error("random_plant: no controllable/observable draw found");
}

// ----- independent QP oracle -----

// Solves min 0.5 z'Hz + f'z s.t. Gz <= d for positive definite H by
// enumerating candidate active sets of size <= dim(z) and checking the KKT
// conditions of each — a different algorithm family from the solver under
// test. Returns std::nullopt when no KKT-consistent candidate exists
// (infeasible problem). Constraint counts are capped to keep 2^q small.
inline std::optional<Vector> brute_force_qp(const Matrix& H, const Vector& f, const Matrix& G,
                                            const Vector& d) {
  const Index n = H.rows();
  const Index q = G.rows();
  if (q > 22) throw std::invalid_argument("brute_force_qp: too many constraint rows");

  double best = std::numeric_limits<double>::infinity();
  std::optional<Vector> best_z;

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << q); ++mask) {
    const int na = std::popcount(mask);
    if (na > n) continue;

    Matrix KKT = Matrix::Zero(n + na, n + na);
    KKT.topLeftCorner(n, n) = H;
    Vector rhs(n + na);
    rhs.head(n) = -f;
    Index r = 0;
    for (Index i = 0; i < q; ++i) {
      if (!(mask >> i & 1)) continue;
      KKT.block(0, n + r, n, 1) = G.row(i).transpose();
      KKT.block(n + r, 0, 1, n) = G.row(i);
      rhs(n + r) = d(i);
      ++r;
    }
    Eigen::FullPivLU<Matrix> lu(KKT);
    if (!lu.isInvertible()) continue;
    const Vector sol = lu.solve(rhs);
    const Vector z = sol.head(n);
    const Vector lambda = sol.tail(na);

    if (na > 0 && lambda.minCoeff() < -1e-8) continue;
    bool feasible = true;
    for (Index i = 0; i < q && feasible; ++i) {
      feasible = G.row(i).dot(z) <= d(i) + 1e-7 * (1.0 + std::abs(d(i)));
    }
    if (!feasible) continue;

    const double value = 0.5 * z.dot(H * z) + f.dot(z);
    if (value < best) {
      best = value;
      best_z = z;
    }
  }
  return best_z;
}

} // namespace test_support
