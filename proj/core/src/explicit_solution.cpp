#include "ddpc/explicit_solution.hpp"

#include "ddpc/linalg.hpp"
#include "ddpc/lp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace ddpc {

namespace {

constexpr Index kRegionCap = 5000;

enum class ProbeOutcome { Added, Visited, Infeasible, Degenerate, Empty, OutOfDomain };

// Assembles the critical region for a fixed active set A:
//   lambda_A(theta) = Lam theta + lam0 from  S lambda_A = -(E_A + G_A H^-1 F) theta - d_A
//   z*(theta)       = -H^-1 (F + G_A' Lam) theta - H^-1 G_A' lam0
// with S = G_A H^-1 G_A'. Returns false on LICQ failure (rank-deficient G_A).
bool assemble_law(const ParametricQP& qp, const Eigen::LDLT<Matrix>& H_fact, const IndexSet& A,
                  CriticalRegion& out) {
  const Index dz = qp.decision_dim();
  const Index dt = qp.parameter_dim();
  const Index na = static_cast<Index>(A.size());

  if (na == 0) {
    out.L = -H_fact.solve(qp.F);
    out.c = Vector::Zero(dz);
    out.lambda_gain = Matrix::Zero(0, dt);
    out.lambda_offset = Vector::Zero(0);
    out.active_set.clear();
    return true;
  }

  Matrix G_A(na, dz);
  Matrix E_A(na, dt);
  Vector d_A(na);
  for (Index i = 0; i < na; ++i) {
    G_A.row(i) = qp.G.row(A[i]);
    E_A.row(i) = qp.E.row(A[i]);
    d_A(i) = qp.d(A[i]);
  }
  if (numerical_rank(G_A) < na) return false;

  const Matrix Hi_GAt = H_fact.solve(G_A.transpose());
  const Matrix Hi_F = H_fact.solve(qp.F);
  const Matrix S = G_A * Hi_GAt;
  Eigen::FullPivLU<Matrix> S_lu(S);
  if (!S_lu.isInvertible()) return false;

  out.lambda_gain = -S_lu.solve(E_A + G_A * Hi_F);
  out.lambda_offset = -S_lu.solve(d_A);
  out.L = -(Hi_F + Hi_GAt * out.lambda_gain);
  out.c = -(Hi_GAt * out.lambda_offset);
  out.active_set = A;
  return true;
}

// Region inequalities: primal feasibility of the inactive rows, dual
// feasibility of the active ones, and the exploration-domain rows.
Polyhedron region_inequalities(const ParametricQP& qp, const CriticalRegion& cr,
                               const Polyhedron& domain) {
  const Index q = qp.G.rows();
  const Index na = static_cast<Index>(cr.active_set.size());
  const Index dt = qp.parameter_dim();
  const Index rows = (q - na) + na + domain.rows();

  Matrix A(rows, dt);
  Vector b(rows);
  Index r = 0;
  for (Index i = 0; i < q; ++i) {
    if (std::binary_search(cr.active_set.begin(), cr.active_set.end(), i)) continue;
    A.row(r) = qp.G.row(i) * cr.L - qp.E.row(i);
    b(r) = qp.d(i) - qp.G.row(i).dot(cr.c);
    ++r;
  }
  A.middleRows(r, na) = -cr.lambda_gain;
  b.segment(r, na) = cr.lambda_offset;
  r += na;
  A.middleRows(r, domain.rows()) = domain.A;
  b.segment(r, domain.rows()) = domain.b;
  return Polyhedron{A, b};
}

} // namespace

ExplicitSolution explicit_solve(const ParametricQP& qp, const Polyhedron& domain,
                                const MpqpOptions& options) {
  if (!qp.strictly_convex) {
    throw std::invalid_argument("explicit_solve: parametric QP must be strictly convex");
  }
  const Index dt = qp.parameter_dim();
  if (domain.dim() != dt) {
    throw std::invalid_argument("explicit_solve: domain dimension must match the parameter");
  }
  const ChebyshevBall ball = chebyshev_center(domain);
  if (!ball.bounded) throw std::invalid_argument("explicit_solve: domain must be bounded");
  if (ball.radius <= 0.0) throw std::invalid_argument("explicit_solve: domain is empty");

  ExplicitSolution sol;
  sol.d_z = qp.decision_dim();
  sol.d_theta = dt;
  sol.domain = domain;

  const Eigen::LDLT<Matrix> H_fact = qp.H.ldlt();
  std::set<IndexSet> visited;
  std::deque<Index> queue; // indices into sol.regions awaiting facet exploration

  auto probe = [&](const Vector& theta) -> ProbeOutcome {
    if (!domain.contains(theta, options.tol_contain)) return ProbeOutcome::OutOfDomain;
    ++sol.stats.qp_solves;
    const QpSolution qsol =
        solve_qp(qp.H, qp.F * theta, qp.G, qp.E * theta + qp.d, options.qp);
    if (qsol.status == QpStatus::Infeasible) return ProbeOutcome::Infeasible;
    if (qsol.status != QpStatus::Optimal) return ProbeOutcome::Degenerate;

    IndexSet A = qsol.active_set;
    std::sort(A.begin(), A.end());
    if (visited.count(A)) return ProbeOutcome::Visited;

    CriticalRegion cr;
    if (!assemble_law(qp, H_fact, A, cr)) return ProbeOutcome::Degenerate;

    const Polyhedron full = region_inequalities(qp, cr, domain);
    const ChebyshevBall inner = chebyshev_center(full);
    if (!inner.bounded || inner.radius <= options.tol_interior) {
      visited.insert(A);
      ++sol.stats.empty_discarded;
      return ProbeOutcome::Empty;
    }
    cr.region = remove_redundant(full);
    visited.insert(A);
    sol.regions.push_back(std::move(cr));
    queue.push_back(static_cast<Index>(sol.regions.size()) - 1);
    if (static_cast<Index>(sol.regions.size()) > kRegionCap) {
      throw std::runtime_error("explicit_solve: region cap exceeded");
    }
    return ProbeOutcome::Added;
  };

  // Seed points: Chebyshev center, the origin, then a coarse interior grid of
  // the domain's bounding box. The feasible parameter set is convex, so one
  // feasible seed suffices for connectivity; the extras guard against seeds
  // that land outside the feasible set or on degenerate faces.
  std::vector<Vector> seeds;
  seeds.push_back(ball.center);
  seeds.push_back(Vector::Zero(dt));
  {
    Vector lo(dt), hi(dt);
    bool box_ok = true;
    for (Index j = 0; j < dt && box_ok; ++j) {
      Vector cj = Vector::Zero(dt);
      cj(j) = 1.0;
      const LpResult lo_lp = solve_lp(cj, domain.A, domain.b);
      const LpResult hi_lp = solve_lp(-cj, domain.A, domain.b);
      box_ok = lo_lp.status == LpStatus::Optimal && hi_lp.status == LpStatus::Optimal;
      if (box_ok) {
        lo(j) = lo_lp.x(j);
        hi(j) = hi_lp.x(j);
      }
    }
    if (box_ok && dt <= 6) {
      std::vector<Index> digit(dt, 0);
      const Index points = static_cast<Index>(std::pow(3.0, static_cast<double>(dt)));
      for (Index k = 0; k < points; ++k) {
        Vector theta(dt);
        Index rem = k;
        for (Index j = 0; j < dt; ++j) {
          const double frac = 0.25 * static_cast<double>(rem % 3 + 1);
          theta(j) = lo(j) + frac * (hi(j) - lo(j));
          rem /= 3;
        }
        seeds.push_back(theta);
      }
    }
  }
  for (const Vector& seed : seeds) {
    ++sol.stats.seeds_tried;
    probe(seed);
  }

  // Facet stepping: cross each irredundant facet of each discovered region by
  // an epsilon step along its outward normal; retry LICQ-degenerate probes
  // from three jittered offsets before giving up.
  while (!queue.empty()) {
    const Index r = queue.front();
    queue.pop_front();
    const Polyhedron region = sol.regions[r].region; // copy: sol.regions may grow
    for (Index k = 0; k < region.rows(); ++k) {
      const double norm = region.A.row(k).norm();
      if (norm <= 0.0) continue;
      const ChebyshevBall facet = facet_chebyshev_center(region, k);
      if (!facet.bounded || facet.radius < 0.0) continue;
      const Vector normal = region.A.row(k).transpose() / norm;

      Vector point = facet.center + options.eps_step * normal;
      ProbeOutcome outcome = probe(point);
      if (outcome != ProbeOutcome::Degenerate) continue;

      // Deterministic jitter: escalate the step and shear along the
      // coordinate direction least aligned with the facet normal.
      Index least = 0;
      normal.cwiseAbs().minCoeff(&least);
      Vector tangent = Vector::Unit(dt, least) - normal(least) * normal;
      if (tangent.norm() > 0.0) tangent.normalize();
      for (int j = 1; j <= 3 && outcome == ProbeOutcome::Degenerate; ++j) {
        const double step = options.eps_step * std::pow(10.0, j);
        point = facet.center + step * normal + 0.5 * step * tangent;
        outcome = probe(point);
      }
      if (outcome == ProbeOutcome::Degenerate) ++sol.stats.licq_skips;
    }
  }

  std::sort(sol.regions.begin(), sol.regions.end(),
            [](const CriticalRegion& a, const CriticalRegion& b) {
              return a.active_set < b.active_set;
            });
  return sol;
}

EvalResult evaluate(const ExplicitSolution& sol, const Vector& theta, double tol) {
  EvalResult res;
  for (Index i = 0; i < sol.s(); ++i) {
    if (sol.regions[i].region.contains(theta, tol)) {
      res.z = sol.regions[i].L * theta + sol.regions[i].c;
      res.region_id = i;
      res.found = true;
      return res;
    }
  }
  return res;
}

} // namespace ddpc
