#pragma once

#include "ddpc/data_matrices.hpp"
#include "ddpc/system_model.hpp"
#include "ddpc/types.hpp"

#include <optional>

namespace ddpc {

// Per-step polyhedral input and output constraints M_u u <= v_u, M_y y <= v_y.
struct ConstraintSet {
  Matrix M_u;
  Vector v_u;
  Matrix M_y;
  Vector v_y;

  void validate() const;
};

// Stage cost ||y||_Q^2 + ||u||_R^2 with Q PSD and R PD.
struct CostWeights {
  Matrix Q;
  Matrix R;

  void validate(double tol = 1e-10) const;
};

// min_z 0.5 z'Hz + theta'F'z  s.t.  G z <= E theta + d.
// Houses the condensed MPC QP (z = u_f, theta = x_0), the alpha-QP, and the
// beta-QP (z = beta, theta = xi).
struct ParametricQP {
  Matrix H;
  Matrix F; // d_z x d_theta
  Matrix G;
  Matrix E;
  Vector d;
  bool strictly_convex = false;

  Index decision_dim() const { return H.rows(); }
  Index parameter_dim() const { return F.cols(); }
  void validate() const;
};

// The raw data-driven QP in the trajectory coordinates a:
// min 0.5 a'H~a  s.t.  G~ a <= E~ xi + d,  W_p a = xi.  Only convex.
struct DpcRawQP {
  Matrix H_tilde;
  Matrix G_tilde;
  Vector d;
  Matrix W_p;

  Index parameter_dim() const { return W_p.rows(); }
};

// Everything needed to move between the a-, alpha-, and beta-parametrizations.
struct ReductionMaps {
  Matrix W_p_pinv; // l x (m+p)N_p
  Matrix V_p;      // l x nu, orthonormal kernel basis of W_p
  Matrix U_fV_p;   // cached U_f * V_p
  Matrix K_f;      // nu x mu
  Matrix Phi;      // mu x mu, non-singular
  Index nu = 0;
  Index mu = 0;
};

// Condensed MPC QP of the classical formulation; strictly convex.
ParametricQP condense_mpc(const SystemModel& model, const CostWeights& weights,
                          const ConstraintSet& cons, Index N_f);

// Raw DPC QP straight from the data blocks.
DpcRawQP build_dpc_raw(const HankelPartition& part, const CostWeights& weights,
                       const ConstraintSet& cons);

// K_f = (U_f V_p)' Phi; requires non-singular Phi.
Matrix build_kf(const Matrix& U_fV_p, const Matrix& Phi, double tol_rank = -1.0);

// Builds W_p+, V_p, K_f and the dimension bookkeeping. A caller-supplied V_p
// (validated: W_p V_p = 0, full column rank) reproduces published bases; Phi
// defaults to the identity.
ReductionMaps build_reduction_maps(const HankelPartition& part,
                                   const std::optional<Matrix>& V_p_override = std::nullopt,
                                   const std::optional<Matrix>& Phi_override = std::nullopt,
                                   double tol_rank = -1.0);

// Eliminates the equality constraint via a = W_p+ xi + V_p alpha, giving the
// (generally only convex) alpha-QP of dimension nu.
ParametricQP eliminate_equalities(const DpcRawQP& raw, const ReductionMaps& maps);

// Restricts the alpha-QP to alpha = K_f beta, giving the strictly convex
// beta-QP of dimension mu = m*N_f. Throws "degenerate reduction" if the
// reduced Hessian fails the definiteness check.
ParametricQP reduce_to_beta(const DpcRawQP& raw, const ReductionMaps& maps,
                            double tol_pd = 1e-10);

// u_f = U_f W_p+ xi + U_f V_p K_f beta.
Vector recover_uf(const ReductionMaps& maps, const Matrix& U_f, const Vector& xi,
                  const Vector& beta);

// Basis of ker(U_f V_p): the directions that do not influence u_f (computed on
// demand; the beta-QP itself never needs it).
Matrix irrelevance_basis(const ReductionMaps& maps, double tol_rank = -1.0);

// Numerical ranks against the dimension lemmas.
struct RankReport {
  Index l = 0;
  Index rank_Wp = 0;
  Index nu = 0;
  Index rank_UfVp = 0;
  bool wp_lemma_ok = false;   // rank(W_p) == m*N_p + n
  bool ufvp_lemma_ok = false; // rank(U_f V_p) == m*N_f
};

RankReport rank_report(const HankelPartition& part, const ReductionMaps& maps,
                       Index m, Index n, Index N_p, Index N_f);

} // namespace ddpc
