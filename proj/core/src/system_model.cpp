#include "ddpc/system_model.hpp"

#include "ddpc/linalg.hpp"

#include <stdexcept>

namespace ddpc {

void SystemModel::validate() const {
  if (A.rows() < 1 || B.cols() < 1 || C.rows() < 1) {
    throw std::invalid_argument("SystemModel: n, m, p must all be at least 1");
  }
  if (A.rows() != A.cols()) throw std::invalid_argument("SystemModel: A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("SystemModel: B row count must equal n");
  if (C.cols() != A.rows()) throw std::invalid_argument("SystemModel: C column count must equal n");
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw std::invalid_argument("SystemModel: D must be p x m");
  }
}

Vector simulate(const SystemModel& model, const Vector& x0, const Vector& u,
                Vector* x_final) {
  model.validate();
  if (x0.size() != model.n()) throw std::invalid_argument("simulate: x0 length must equal n");
  if (u.size() % model.m() != 0) {
    throw std::invalid_argument("simulate: input length must be a multiple of m");
  }
  const Index N = u.size() / model.m();
  Vector y(model.p() * N);
  Vector x = x0;
  for (Index k = 0; k < N; ++k) {
    const auto uk = u.segment(k * model.m(), model.m());
    y.segment(k * model.p(), model.p()) = model.C * x + model.D * uk;
    x = model.A * x + model.B * uk;
  }
  if (x_final != nullptr) *x_final = x;
  return y;
}

Matrix observability_matrix(const SystemModel& model, Index N) {
  model.validate();
  if (N < 1) throw std::invalid_argument("observability_matrix: N must be at least 1");
  Matrix O(model.p() * N, model.n());
  Matrix Ak = Matrix::Identity(model.n(), model.n());
  for (Index i = 0; i < N; ++i) {
    O.middleRows(i * model.p(), model.p()) = model.C * Ak;
    Ak = Ak * model.A;
  }
  return O;
}

Matrix toeplitz_matrix(const SystemModel& model, Index N) {
  model.validate();
  if (N < 1) throw std::invalid_argument("toeplitz_matrix: N must be at least 1");
  Matrix T = Matrix::Zero(model.p() * N, model.m() * N);
  // Markov parameters: D, CB, CAB, CA^2B, ... fill the block diagonals.
  Matrix h = model.D;
  Matrix Ak = Matrix::Identity(model.n(), model.n());
  for (Index diag = 0; diag < N; ++diag) {
    for (Index i = diag; i < N; ++i) {
      T.block(i * model.p(), (i - diag) * model.m(), model.p(), model.m()) = h;
    }
    h = model.C * Ak * model.B;
    Ak = Ak * model.A;
  }
  return T;
}

Matrix gamma_matrix(const SystemModel& model, Index N_p, double tol_rank) {
  model.validate();
  if (N_p < 1) throw std::invalid_argument("gamma_matrix: N_p must be at least 1");
  const Matrix O = observability_matrix(model, N_p);
  if (numerical_rank(O, tol_rank) != model.n()) {
    throw std::invalid_argument("gamma_matrix: model is unobservable at depth N_p");
  }
  const Matrix O_left = left_pseudoinverse(O, tol_rank);
  const Matrix T = toeplitz_matrix(model, N_p);

  // Powers of A up to N_p.
  std::vector<Matrix> Apow(static_cast<std::size_t>(N_p) + 1);
  Apow[0] = Matrix::Identity(model.n(), model.n());
  for (Index k = 1; k <= N_p; ++k) Apow[k] = Apow[k - 1] * model.A;

  // Controllability-style block (A^{Np-1}B, ..., AB, B).
  Matrix ctrl(model.n(), model.m() * N_p);
  for (Index k = 0; k < N_p; ++k) {
    ctrl.middleCols(k * model.m(), model.m()) = Apow[N_p - 1 - k] * model.B;
  }

  Matrix Gamma(model.n(), (model.m() + model.p()) * N_p);
  Gamma.leftCols(model.m() * N_p) = ctrl - Apow[N_p] * O_left * T;
  Gamma.rightCols(model.p() * N_p) = Apow[N_p] * O_left;
  return Gamma;
}

Index observability_index(const SystemModel& model, double tol_rank) {
  model.validate();
  for (Index N = 1; N <= model.n(); ++N) {
    if (numerical_rank(observability_matrix(model, N), tol_rank) == model.n()) return N;
  }
  return 0;
}

bool is_consistent(const SystemModel& model, const Vector& x0, const Vector& u,
                   const Vector& y, double tol) {
  model.validate();
  if (x0.size() != model.n()) throw std::invalid_argument("is_consistent: x0 length must equal n");
  if (u.size() % model.m() != 0 || y.size() % model.p() != 0) {
    throw std::invalid_argument("is_consistent: stacked signal lengths must match m and p");
  }
  const Index N = u.size() / model.m();
  if (y.size() != model.p() * N) {
    throw std::invalid_argument("is_consistent: u and y must cover the same number of steps");
  }
  if (N == 0) return true;
  const Vector residual =
      y - observability_matrix(model, N) * x0 - toeplitz_matrix(model, N) * u;
  return residual.cwiseAbs().maxCoeff() <= tol;
}

Vector reconstruct_initial_state(const SystemModel& model, Index N_p, const Vector& xi,
                                 double tol_rank) {
  const Matrix Gamma = gamma_matrix(model, N_p, tol_rank);
  if (xi.size() != Gamma.cols()) {
    throw std::invalid_argument("reconstruct_initial_state: xi length must be (m+p)*N_p");
  }
  return Gamma * xi;
}

} // namespace ddpc
