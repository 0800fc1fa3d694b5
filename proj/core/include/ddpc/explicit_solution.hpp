#pragma once

#include "ddpc/condense.hpp"
#include "ddpc/polyhedron.hpp"
#include "ddpc/qp.hpp"
#include "ddpc/types.hpp"

#include <vector>

namespace ddpc {

// One piece of the piecewise-affine law: on `region`, z*(theta) = L theta + c
// and the multipliers of the rows in `active_set` follow
// lambda_A(theta) = lambda_gain theta + lambda_offset.
struct CriticalRegion {
  IndexSet active_set;  // sorted rows of G active on this region
  Matrix L;             // d_z x d_theta gain
  Vector c;             // d_z offset
  Matrix lambda_gain;   // |active_set| x d_theta
  Vector lambda_offset; // |active_set|
  Polyhedron region;    // irredundant halfspace description (domain rows included)
};

struct MpqpStats {
  Index qp_solves = 0;      // parametric-oracle invocations during exploration
  Index licq_skips = 0;     // facet probes abandoned after jittered retries
  Index empty_discarded = 0; // candidate active sets whose region had no interior
  Index seeds_tried = 0;
};

struct ExplicitSolution {
  std::vector<CriticalRegion> regions; // canonically sorted by active set
  Index d_z = 0;
  Index d_theta = 0;
  Polyhedron domain;
  MpqpStats stats;

  Index s() const { return static_cast<Index>(regions.size()); }
};

struct MpqpOptions {
  double eps_step = 1e-7;   // facet-crossing step length
  double tol_contain = 1e-9; // halfspace tolerance for point location
  double tol_interior = 1e-9; // Chebyshev radius below which a region is discarded
  QpOptions qp;
};

// Enumerates all full-dimensional critical regions of the strictly convex
// parametric QP
//   min_z 0.5 z'Hz + theta'F'z   s.t.  G z <= E theta + d
// that intersect the bounded exploration domain. Seeds from the domain's
// Chebyshev center (with fallback interior samples), then crosses every
// irredundant facet of each discovered region by an epsilon step. Candidate
// active sets failing LICQ are retried from three jittered probes and then
// skipped (counted in stats). Regions are not merged and are returned sorted
// by active set in lexicographic order, so ids are stable across runs.
//
// Throws std::invalid_argument when the QP is not strictly convex or the
// domain is unbounded or empty; throws std::runtime_error when exploration
// exceeds the region cap (numerical runaway).
ExplicitSolution explicit_solve(const ParametricQP& qp, const Polyhedron& domain,
                                const MpqpOptions& options = {});

struct EvalResult {
  Vector z;
  Index region_id = -1;
  bool found = false;
};

// Sequential scan; the first region containing theta wins. `found` is false
// when theta lies outside every stored region.
EvalResult evaluate(const ExplicitSolution& sol, const Vector& theta, double tol = 1e-9);

} // namespace ddpc
