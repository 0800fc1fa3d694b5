#include "ddpc/condense.hpp"

#include "ddpc/linalg.hpp"

#include <stdexcept>

namespace ddpc {

namespace {

// Block-diagonal repetition diag(M, ..., M), N copies.
Matrix block_diag(const Matrix& M, Index N) {
  Matrix out = Matrix::Zero(M.rows() * N, M.cols() * N);
  for (Index i = 0; i < N; ++i) {
    out.block(i * M.rows(), i * M.cols(), M.rows(), M.cols()) = M;
  }
  return out;
}

Vector repeat(const Vector& v, Index N) {
  Vector out(v.size() * N);
  for (Index i = 0; i < N; ++i) out.segment(i * v.size(), v.size()) = v;
  return out;
}

} // namespace

void ConstraintSet::validate() const {
  if (M_u.rows() != v_u.size()) {
    throw std::invalid_argument("ConstraintSet: M_u row count must match v_u length");
  }
  if (M_y.rows() != v_y.size()) {
    throw std::invalid_argument("ConstraintSet: M_y row count must match v_y length");
  }
}

void CostWeights::validate(double tol) const {
  if (!is_symmetric(Q, 1e-12)) throw std::invalid_argument("CostWeights: Q must be symmetric");
  if (!is_symmetric(R, 1e-12)) throw std::invalid_argument("CostWeights: R must be symmetric");
  if (!is_positive_semidefinite(Q, tol)) {
    throw std::invalid_argument("CostWeights: Q must be positive semi-definite");
  }
  if (!is_positive_definite(R, tol)) {
    throw std::invalid_argument("CostWeights: R must be positive definite");
  }
}

void ParametricQP::validate() const {
  if (H.rows() != H.cols()) throw std::invalid_argument("ParametricQP: H must be square");
  if (F.rows() != H.rows()) throw std::invalid_argument("ParametricQP: F must have d_z rows");
  if (G.cols() != H.rows()) throw std::invalid_argument("ParametricQP: G must have d_z columns");
  if (E.rows() != G.rows() || d.size() != G.rows()) {
    throw std::invalid_argument("ParametricQP: G, E, d row counts must match");
  }
  if (E.cols() != F.cols()) throw std::invalid_argument("ParametricQP: E must have d_theta columns");
}

ParametricQP condense_mpc(const SystemModel& model, const CostWeights& weights,
                          const ConstraintSet& cons, Index N_f) {
  model.validate();
  weights.validate();
  cons.validate();
  if (N_f < 1) throw std::invalid_argument("condense_mpc: N_f must be at least 1");
  if (weights.Q.rows() != model.p() || weights.R.rows() != model.m()) {
    throw std::invalid_argument("condense_mpc: Q must be p x p and R must be m x m");
  }
  if (cons.M_u.cols() != model.m() || cons.M_y.cols() != model.p()) {
    throw std::invalid_argument("condense_mpc: constraint column counts must match m and p");
  }

  const Matrix O = observability_matrix(model, N_f);
  const Matrix T = toeplitz_matrix(model, N_f);
  const Matrix Qb = block_diag(weights.Q, N_f);
  const Matrix Rb = block_diag(weights.R, N_f);
  const Matrix Mu = block_diag(cons.M_u, N_f);
  const Matrix My = block_diag(cons.M_y, N_f);

  ParametricQP qp;
  qp.H = 2.0 * T.transpose() * Qb * T + 2.0 * Rb;
  qp.H = 0.5 * (qp.H + qp.H.transpose()); // enforce exact symmetry
  qp.F = 2.0 * T.transpose() * Qb * O;
  qp.G.resize(Mu.rows() + My.rows(), model.m() * N_f);
  qp.G.topRows(Mu.rows()) = Mu;
  qp.G.bottomRows(My.rows()) = My * T;
  qp.E = Matrix::Zero(qp.G.rows(), model.n());
  qp.E.bottomRows(My.rows()) = -My * O;
  qp.d.resize(qp.G.rows());
  qp.d.head(Mu.rows()) = repeat(cons.v_u, N_f);
  qp.d.tail(My.rows()) = repeat(cons.v_y, N_f);
  qp.strictly_convex = true;
  return qp;
}

DpcRawQP build_dpc_raw(const HankelPartition& part, const CostWeights& weights,
                       const ConstraintSet& cons) {
  weights.validate();
  cons.validate();
  const Index p = weights.Q.rows();
  const Index m = weights.R.rows();
  if (part.U_f.rows() % m != 0 || part.Y_f.rows() % p != 0) {
    throw std::invalid_argument("build_dpc_raw: partition rows do not match the weight sizes");
  }
  const Index N_f = part.U_f.rows() / m;
  if (part.Y_f.rows() != p * N_f) {
    throw std::invalid_argument("build_dpc_raw: U_f and Y_f cover different horizons");
  }
  if (cons.M_u.cols() != m || cons.M_y.cols() != p) {
    throw std::invalid_argument("build_dpc_raw: constraint column counts must match m and p");
  }

  const Matrix Qb = block_diag(weights.Q, N_f);
  const Matrix Rb = block_diag(weights.R, N_f);
  const Matrix Mu = block_diag(cons.M_u, N_f);
  const Matrix My = block_diag(cons.M_y, N_f);

  DpcRawQP raw;
  raw.H_tilde = 2.0 * part.Y_f.transpose() * Qb * part.Y_f +
                2.0 * part.U_f.transpose() * Rb * part.U_f;
  raw.H_tilde = 0.5 * (raw.H_tilde + raw.H_tilde.transpose());
  raw.G_tilde.resize(Mu.rows() + My.rows(), part.l);
  raw.G_tilde.topRows(Mu.rows()) = Mu * part.U_f;
  raw.G_tilde.bottomRows(My.rows()) = My * part.Y_f;
  raw.d.resize(raw.G_tilde.rows());
  raw.d.head(Mu.rows()) = repeat(cons.v_u, N_f);
  raw.d.tail(My.rows()) = repeat(cons.v_y, N_f);
  raw.W_p = part.W_p;
  return raw;
}

Matrix build_kf(const Matrix& U_fV_p, const Matrix& Phi, double tol_rank) {
  if (Phi.rows() != Phi.cols() || Phi.rows() != U_fV_p.rows()) {
    throw std::invalid_argument("build_kf: Phi must be square of size rows(U_f V_p)");
  }
  if (numerical_rank(Phi, tol_rank) != Phi.rows()) {
    throw std::invalid_argument("build_kf: Phi must be non-singular");
  }
  return U_fV_p.transpose() * Phi;
}

ReductionMaps build_reduction_maps(const HankelPartition& part,
                                   const std::optional<Matrix>& V_p_override,
                                   const std::optional<Matrix>& Phi_override,
                                   double tol_rank) {
  ReductionMaps maps;
  maps.W_p_pinv = pseudoinverse(part.W_p, tol_rank);

  if (V_p_override.has_value()) {
    const Matrix& V = *V_p_override;
    if (V.rows() != part.W_p.cols()) {
      throw std::invalid_argument("build_reduction_maps: V_p override has wrong row count");
    }
    if (V.size() > 0) {
      const double residual = (part.W_p * V).cwiseAbs().maxCoeff();
      if (residual > 1e-9 * (1.0 + part.W_p.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("build_reduction_maps: V_p override is not a kernel basis");
      }
      if (numerical_rank(V, tol_rank) != V.cols()) {
        throw std::invalid_argument("build_reduction_maps: V_p override has dependent columns");
      }
    }
    maps.V_p = V;
  } else {
    maps.V_p = nullspace_basis(part.W_p, tol_rank);
  }
  maps.nu = maps.V_p.cols();

  maps.U_fV_p = part.U_f * maps.V_p;
  maps.mu = numerical_rank(maps.U_fV_p, tol_rank);
  maps.Phi = Phi_override.value_or(Matrix::Identity(maps.U_fV_p.rows(), maps.U_fV_p.rows()));
  maps.K_f = build_kf(maps.U_fV_p, maps.Phi, tol_rank);
  return maps;
}

ParametricQP eliminate_equalities(const DpcRawQP& raw, const ReductionMaps& maps) {
  if (maps.V_p.rows() != raw.H_tilde.rows() || maps.W_p_pinv.rows() != raw.H_tilde.rows()) {
    throw std::invalid_argument("eliminate_equalities: maps were not built from this QP's W_p");
  }
  ParametricQP qp;
  qp.H = maps.V_p.transpose() * raw.H_tilde * maps.V_p;
  qp.H = 0.5 * (qp.H + qp.H.transpose());
  qp.F = maps.V_p.transpose() * raw.H_tilde * maps.W_p_pinv;
  qp.G = raw.G_tilde * maps.V_p;
  qp.E = -raw.G_tilde * maps.W_p_pinv;
  qp.d = raw.d;
  qp.strictly_convex = false;
  return qp;
}

ParametricQP reduce_to_beta(const DpcRawQP& raw, const ReductionMaps& maps, double tol_pd) {
  const ParametricQP alpha = eliminate_equalities(raw, maps);
  if (maps.K_f.rows() != alpha.decision_dim()) {
    throw std::invalid_argument("reduce_to_beta: K_f does not match the alpha dimension");
  }
  ParametricQP qp;
  qp.H = maps.K_f.transpose() * alpha.H * maps.K_f;
  qp.H = 0.5 * (qp.H + qp.H.transpose());
  qp.F = maps.K_f.transpose() * alpha.F;
  qp.G = alpha.G * maps.K_f;
  qp.E = alpha.E;
  qp.d = alpha.d;
  if (!is_positive_definite(qp.H, tol_pd)) {
    throw std::runtime_error("reduce_to_beta: degenerate reduction (reduced Hessian not PD)");
  }
  qp.strictly_convex = true;
  return qp;
}

Vector recover_uf(const ReductionMaps& maps, const Matrix& U_f, const Vector& xi,
                  const Vector& beta) {
  if (xi.size() != maps.W_p_pinv.cols()) {
    throw std::invalid_argument("recover_uf: xi length must be (m+p)*N_p");
  }
  if (beta.size() != maps.K_f.cols()) {
    throw std::invalid_argument("recover_uf: beta length must be mu");
  }
  return U_f * (maps.W_p_pinv * xi) + U_f * (maps.V_p * (maps.K_f * beta));
}

Matrix irrelevance_basis(const ReductionMaps& maps, double tol_rank) {
  return nullspace_basis(maps.U_fV_p, tol_rank);
}

RankReport rank_report(const HankelPartition& part, const ReductionMaps& maps,
                       Index m, Index n, Index N_p, Index N_f) {
  RankReport report;
  report.l = part.l;
  report.rank_Wp = numerical_rank(part.W_p);
  report.nu = maps.nu;
  report.rank_UfVp = maps.mu;
  report.wp_lemma_ok = (report.rank_Wp == m * N_p + n);
  report.ufvp_lemma_ok = (report.rank_UfVp == m * N_f);
  return report;
}

} // namespace ddpc
