#include "ddpc/polyhedron.hpp"

#include "ddpc/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddpc {

bool Polyhedron::contains(const Vector& theta, double tol) const {
  if (theta.size() != dim()) throw std::invalid_argument("Polyhedron: dimension mismatch");
  for (Index i = 0; i < rows(); ++i) {
    if (A.row(i).dot(theta) > b(i) + tol * (1.0 + std::abs(b(i)))) return false;
  }
  return true;
}

ChebyshevBall chebyshev_center(const Polyhedron& poly) {
  // Variables (theta, r): maximize r s.t. a_i'theta + ||a_i|| r <= b_i.
  const Index d = poly.dim();
  Matrix G(poly.rows(), d + 1);
  Vector rhs(poly.rows());
  Index used = 0;
  for (Index i = 0; i < poly.rows(); ++i) {
    const double norm = poly.A.row(i).norm();
    if (norm <= 1e-14) {
      if (poly.b(i) < -1e-12) { // 0 <= b violated: empty set
        ChebyshevBall ball;
        ball.radius = -1.0;
        return ball;
      }
      continue;
    }
    G.row(used).head(d) = poly.A.row(i);
    G(used, d) = norm;
    rhs(used) = poly.b(i);
    ++used;
  }
  G.conservativeResize(used, Eigen::NoChange);
  rhs.conservativeResize(used);

  Vector c = Vector::Zero(d + 1);
  c(d) = -1.0; // maximize r
  const LpResult lp = solve_lp(c, G, rhs);

  ChebyshevBall ball;
  if (lp.status == LpStatus::Unbounded) {
    ball.bounded = false;
    ball.radius = std::numeric_limits<double>::infinity();
    return ball;
  }
  if (lp.status != LpStatus::Optimal) {
    ball.radius = -1.0;
    return ball;
  }
  ball.center = lp.x.head(d);
  ball.radius = lp.x(d);
  return ball;
}

ChebyshevBall facet_chebyshev_center(const Polyhedron& poly, Index facet_row) {
  if (facet_row < 0 || facet_row >= poly.rows()) {
    throw std::invalid_argument("facet_chebyshev_center: row index out of range");
  }
  const Index d = poly.dim();
  const double facet_norm = poly.A.row(facet_row).norm();
  if (facet_norm <= 1e-14) {
    throw std::invalid_argument("facet_chebyshev_center: facet row has zero normal");
  }

  // Variables (theta, r): maximize r subject to the other halfspaces at
  // margin r, pinned to the facet hyperplane.
  Matrix G(poly.rows() - 1, d + 1);
  Vector rhs(poly.rows() - 1);
  Index used = 0;
  for (Index i = 0; i < poly.rows(); ++i) {
    if (i == facet_row) continue;
    const double norm = poly.A.row(i).norm();
    G.row(used).head(d) = poly.A.row(i);
    G(used, d) = norm;
    rhs(used) = poly.b(i);
    ++used;
  }
  Matrix A_eq(1, d + 1);
  A_eq.row(0).head(d) = poly.A.row(facet_row);
  A_eq(0, d) = 0.0;
  Vector b_eq(1);
  b_eq(0) = poly.b(facet_row);

  Vector c = Vector::Zero(d + 1);
  c(d) = -1.0;
  const LpResult lp = solve_lp(c, G, rhs, A_eq, b_eq);

  ChebyshevBall ball;
  if (lp.status == LpStatus::Unbounded) {
    ball.bounded = false;
    ball.radius = std::numeric_limits<double>::infinity();
    return ball;
  }
  if (lp.status != LpStatus::Optimal) {
    ball.radius = -1.0;
    return ball;
  }
  ball.center = lp.x.head(d);
  ball.radius = lp.x(d);
  return ball;
}

bool is_empty(const Polyhedron& poly) {
  const LpResult lp = solve_lp(Vector::Zero(poly.dim()), poly.A, poly.b);
  return lp.status == LpStatus::Infeasible;
}

bool has_interior(const Polyhedron& poly, double tol) {
  const ChebyshevBall ball = chebyshev_center(poly);
  if (!ball.bounded) return true;
  return ball.radius > tol;
}

std::vector<Index> irredundant_rows(const Polyhedron& poly, double tol) {
  std::vector<Index> keep;
  std::vector<bool> dropped(poly.rows(), false);
  for (Index i = 0; i < poly.rows(); ++i) {
    const double norm = poly.A.row(i).norm();
    if (norm <= 1e-14) {
      dropped[i] = true; // trivial row (0 <= b); emptiness is the caller's query
      continue;
    }
    // Maximize the row over the others with this row relaxed by +1: the row is
    // redundant iff the maximum still respects the original bound.
    Matrix G(poly.rows(), poly.dim());
    Vector rhs(poly.rows());
    Index used = 0;
    for (Index j = 0; j < poly.rows(); ++j) {
      if (dropped[j]) continue;
      G.row(used) = poly.A.row(j);
      rhs(used) = poly.b(j) + (i == j ? 1.0 : 0.0);
      ++used;
    }
    G.conservativeResize(used, Eigen::NoChange);
    rhs.conservativeResize(used);
    const LpResult lp = solve_lp(-poly.A.row(i).transpose(), G, rhs);
    if (lp.status == LpStatus::Optimal &&
        -lp.value <= poly.b(i) + tol * (1.0 + std::abs(poly.b(i)))) {
      dropped[i] = true;
    }
  }
  for (Index i = 0; i < poly.rows(); ++i) {
    if (!dropped[i]) keep.push_back(i);
  }
  return keep;
}

Polyhedron remove_redundant(const Polyhedron& poly, double tol) {
  const std::vector<Index> keep = irredundant_rows(poly, tol);
  Polyhedron out;
  out.A.resize(static_cast<Index>(keep.size()), poly.dim());
  out.b.resize(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.A.row(static_cast<Index>(k)) = poly.A.row(keep[k]);
    out.b(static_cast<Index>(k)) = poly.b(keep[k]);
  }
  return out;
}

} // namespace ddpc
