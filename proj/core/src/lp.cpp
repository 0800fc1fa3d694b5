#include "ddpc/lp.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace ddpc {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-8;

// Classic dense tableau simplex over A x = b, x >= 0, b >= 0. The tableau is
// kept fully reduced (basis columns = identity) and the reduced-cost row is
// updated by the same pivots. Problem sizes here are tens of rows, so the
// explicit tableau is both the simplest and the fastest appropriate choice.
class Tableau {
public:
  Tableau(Matrix A, Vector b) : rows_(A.rows()), cols_(A.cols()) {
    T_.resize(rows_, cols_ + 1);
    T_.leftCols(cols_) = A;
    T_.col(cols_) = b;
    basis_.resize(rows_);
  }

  Index rows() const { return rows_; }
  std::vector<Index>& basis() { return basis_; }

  void load_cost(const Vector& cost) {
    cost_ = cost;
    z_ = Vector::Zero(cols_ + 1);
    z_.head(cols_) = cost;
    for (Index i = 0; i < rows_; ++i) {
      z_ -= cost(basis_[i]) * T_.row(i).transpose();
    }
  }

  double objective() const { return -z_(cols_); }

  // Returns true on optimality, false on unboundedness; throws Degenerate via
  // the bool* flag when the pivot cap is hit.
  bool optimize(const std::vector<bool>& allowed, bool* cycled) {
    *cycled = false;
    const Index cap = 50 * (rows_ + cols_);
    std::vector<bool> is_basic(cols_, false);
    for (Index i = 0; i < rows_; ++i) is_basic[basis_[i]] = true;
    for (Index iter = 0; iter < cap; ++iter) {
      const bool bland = iter > 5 * (rows_ + cols_);
      Index entering = -1;
      double best = -kCostTol;
      for (Index j = 0; j < cols_; ++j) {
        if (!allowed[j] || is_basic[j]) continue;
        const double rc = z_(j);
        if (rc < best) {
          entering = j;
          if (bland) break;
          best = rc;
        }
      }
      if (entering < 0) return true;

      Index leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows_; ++i) {
        if (T_(i, entering) > kPivotTol) {
          const double ratio = T_(i, cols_) / T_(i, entering);
          if (ratio < best_ratio - kPivotTol) { // ties keep the lowest row
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;

      is_basic[basis_[leaving]] = false;
      is_basic[entering] = true;
      pivot(leaving, entering);
    }
    *cycled = true;
    return true;
  }

  // After phase 1, swaps remaining artificial basis columns for structural
  // ones (zero-step pivots); rows with no structural pivot are redundant and
  // get removed.
  void drive_out_artificials(Index n_struct) {
    for (Index i = 0; i < rows_;) {
      if (basis_[i] < n_struct) { ++i; continue; }
      Index j_struct = -1;
      for (Index j = 0; j < n_struct; ++j) {
        if (std::abs(T_(i, j)) > kPivotTol) { j_struct = j; break; }
      }
      if (j_struct >= 0) {
        pivot(i, j_struct);
        ++i;
      } else {
        remove_row(i);
      }
    }
  }

  Vector basic_solution(Index n_struct) const {
    Vector full = Vector::Zero(n_struct);
    for (Index i = 0; i < rows_; ++i) {
      if (basis_[i] < n_struct) full(basis_[i]) = T_(i, cols_);
    }
    return full;
  }

private:
  void pivot(Index row, Index col) {
    T_.row(row) /= T_(row, col);
    for (Index i = 0; i < rows_; ++i) {
      if (i != row && std::abs(T_(i, col)) > 0.0) {
        T_.row(i) -= T_(i, col) * T_.row(row);
      }
    }
    z_ -= z_(col) * T_.row(row).transpose();
    basis_[row] = col;
  }

  void remove_row(Index row) {
    const Index last = rows_ - 1;
    if (row != last) {
      T_.row(row) = T_.row(last);
      basis_[row] = basis_[last];
    }
    T_.conservativeResize(last, Eigen::NoChange);
    basis_.resize(last);
    rows_ = last;
  }

  Index rows_;
  Index cols_;
  Matrix T_;
  Vector z_;
  Vector cost_;
  std::vector<Index> basis_;
};

} // namespace

LpResult solve_lp(const Vector& c, const Matrix& G, const Vector& d,
                  const Matrix& A_eq, const Vector& b_eq) {
  const Index n = c.size();
  const Index q = G.rows();
  const Index qe = A_eq.rows();
  if (q > 0 && G.cols() != n) throw std::invalid_argument("solve_lp: G column count must match c");
  if (d.size() != q) throw std::invalid_argument("solve_lp: d length must match G rows");
  if (qe > 0 && A_eq.cols() != n) {
    throw std::invalid_argument("solve_lp: A_eq column count must match c");
  }
  if (b_eq.size() != qe) throw std::invalid_argument("solve_lp: b_eq length must match A_eq rows");

  LpResult result;
  const Index rows = q + qe;
  if (rows == 0) {
    result.status = c.isZero(0.0) ? LpStatus::Optimal : LpStatus::Unbounded;
    result.x = Vector::Zero(n);
    return result;
  }

  // Standard form: x = xp - xn with xp, xn >= 0, one slack per inequality,
  // one artificial per row for the phase-1 start.
  const Index n_struct = 2 * n + q;
  const Index cols = n_struct + rows;
  Matrix A = Matrix::Zero(rows, cols);
  Vector b(rows);
  for (Index i = 0; i < q; ++i) {
    A.row(i).segment(0, n) = G.row(i);
    A.row(i).segment(n, n) = -G.row(i);
    A(i, 2 * n + i) = 1.0;
    b(i) = d(i);
  }
  for (Index i = 0; i < qe; ++i) {
    A.row(q + i).segment(0, n) = A_eq.row(i);
    A.row(q + i).segment(n, n) = -A_eq.row(i);
    b(q + i) = b_eq(i);
  }
  for (Index i = 0; i < rows; ++i) {
    if (b(i) < 0) {
      A.row(i) = -A.row(i);
      b(i) = -b(i);
    }
  }
  for (Index i = 0; i < rows; ++i) A(i, n_struct + i) = 1.0;

  Tableau tab(std::move(A), std::move(b));
  for (Index i = 0; i < rows; ++i) tab.basis()[i] = n_struct + i;

  // Phase 1: minimize the artificial sum.
  Vector cost1 = Vector::Zero(cols);
  cost1.tail(rows).setOnes();
  tab.load_cost(cost1);
  std::vector<bool> allow_all(cols, true);
  bool cycled = false;
  tab.optimize(allow_all, &cycled); // phase 1 is always bounded below by 0
  if (cycled) {
    result.status = LpStatus::Degenerate;
    return result;
  }
  if (tab.objective() > kFeasTol) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  tab.drive_out_artificials(n_struct);

  // Phase 2: the real cost; artificial columns are barred from entering.
  Vector cost2 = Vector::Zero(cols);
  cost2.segment(0, n) = c;
  cost2.segment(n, n) = -c;
  tab.load_cost(cost2);
  std::vector<bool> allowed(cols, true);
  for (Index j = n_struct; j < cols; ++j) allowed[j] = false;
  const bool bounded = tab.optimize(allowed, &cycled);
  if (cycled) {
    result.status = LpStatus::Degenerate;
    return result;
  }
  if (!bounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  const Vector full = tab.basic_solution(n_struct);
  result.x = full.segment(0, n) - full.segment(n, n);
  result.value = tab.objective();
  result.status = LpStatus::Optimal;
  return result;
}

} // namespace ddpc
