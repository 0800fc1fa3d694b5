#include "ddpc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <stdexcept>

namespace ddpc {

double default_rank_tolerance(const Matrix& M, double sigma_max) {
  return static_cast<double>(std::max(M.rows(), M.cols())) * sigma_max * 1e-12;
}

namespace {

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& M) {
  return Eigen::JacobiSVD<Matrix>(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Index rank_from_svd(const Matrix& M, const Eigen::JacobiSVD<Matrix>& svd, double tol_rank) {
  if (svd.singularValues().size() == 0) return 0;
  const double tol =
      tol_rank > 0.0 ? tol_rank : default_rank_tolerance(M, svd.singularValues()(0));
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++r;
  }
  return r;
}

} // namespace

Index numerical_rank(const Matrix& M, double tol_rank) {
  if (M.size() == 0) return 0;
  const auto svd = full_svd(M);
  return rank_from_svd(M, svd, tol_rank);
}

Matrix pseudoinverse(const Matrix& M, double tol_rank) {
  if (M.size() == 0) return Matrix::Zero(M.cols(), M.rows());
  const auto svd = full_svd(M);
  const Index r = rank_from_svd(M, svd, tol_rank);
  Matrix result = Matrix::Zero(M.cols(), M.rows());
  for (Index i = 0; i < r; ++i) {
    result += svd.matrixV().col(i) * (1.0 / svd.singularValues()(i)) *
              svd.matrixU().col(i).transpose();
  }
  return result;
}

Matrix nullspace_basis(const Matrix& M, double tol_rank) {
  if (M.cols() == 0) return Matrix::Zero(0, 0);
  if (M.size() == 0 || M.rows() == 0) return Matrix::Identity(M.cols(), M.cols());
  const auto svd = full_svd(M);
  const Index r = rank_from_svd(M, svd, tol_rank);
  const Index nullity = M.cols() - r;
  Matrix V = svd.matrixV().rightCols(nullity);
  // Deterministic sign convention: flip each column so its largest-magnitude
  // entry is positive.
  for (Index j = 0; j < V.cols(); ++j) {
    Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
  }
  return V;
}

Matrix left_pseudoinverse(const Matrix& M, double tol_rank) {
  if (numerical_rank(M, tol_rank) != M.cols()) {
    throw std::invalid_argument("left_pseudoinverse: matrix does not have full column rank");
  }
  // QR route: M = QR with R invertible, so (M'M)^{-1} M' = R^{-1} Q'.
  Eigen::HouseholderQR<Matrix> qr(M);
  const Matrix thinQ = qr.householderQ() * Matrix::Identity(M.rows(), M.cols());
  const Matrix R = qr.matrixQR().topRows(M.cols()).triangularView<Eigen::Upper>();
  return R.triangularView<Eigen::Upper>().solve(thinQ.transpose());
}

bool is_symmetric(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + M.cwiseAbs().maxCoeff());
}

bool is_positive_definite(const Matrix& H, double tol) {
  if (H.rows() != H.cols()) return false;
  if (H.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()),
                                           Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() > tol * scale;
}

bool is_positive_semidefinite(const Matrix& H, double tol) {
  if (H.rows() != H.cols()) return false;
  if (H.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()),
                                           Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() > -tol * scale;
}

} // namespace ddpc
