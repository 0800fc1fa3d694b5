#pragma once

#include "ddpc/types.hpp"

namespace ddpc {

// H-representation {theta : A theta <= b}.
struct Polyhedron {
  Matrix A;
  Vector b;

  Index dim() const { return A.cols(); }
  Index rows() const { return A.rows(); }
  bool contains(const Vector& theta, double tol = 1e-9) const;
};

struct ChebyshevBall {
  Vector center;
  double radius = -1.0; // negative on infeasibility
  bool bounded = true;  // false when the inscribed radius is unbounded
};

// Largest inscribed ball (radius LP). Rows with zero norm are skipped.
ChebyshevBall chebyshev_center(const Polyhedron& poly);

// Largest ball inscribed in the facet {a_f theta = b_f} intersected with the
// remaining halfspaces; used to find well-centered facet interior points.
ChebyshevBall facet_chebyshev_center(const Polyhedron& poly, Index facet_row);

// Feasibility / full-dimensionality queries.
bool is_empty(const Polyhedron& poly);
bool has_interior(const Polyhedron& poly, double tol = 1e-9);

// Minimal H-representation: every retained row is certified necessary by an
// LP (maximize the row over the relaxed polyhedron). Returns row indices kept.
std::vector<Index> irredundant_rows(const Polyhedron& poly, double tol = 1e-9);
Polyhedron remove_redundant(const Polyhedron& poly, double tol = 1e-9);

} // namespace ddpc
