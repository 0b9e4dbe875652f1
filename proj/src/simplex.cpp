#include "fbl/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fbl {

namespace {

constexpr double kPivotEps = 1e-12;

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
      : rows_(static_cast<int>(A.rows())),
        cols_(static_cast<int>(A.cols())),
        t_(Eigen::MatrixXd::Zero(rows_ + 1, cols_ + rows_ + 1)),
        basis_(rows_) {
    for (int i = 0; i < rows_; ++i) {
      const double s = b[i] < 0 ? -1.0 : 1.0;
      t_.row(i).head(cols_) = s * A.row(i);
      t_(i, cols_ + i) = 1.0;
      t_(i, rhs()) = s * b[i];
      basis_[i] = cols_ + i;
    }
  }

  int rhs() const { return cols_ + rows_; }
  bool is_artificial(int j) const { return j >= cols_; }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows_; ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  // Loads objective coefficients (indexed over all columns) into the last row
  // in reduced form.
  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cost.size()) = cost.transpose();
    for (int i = 0; i < rows_; ++i) {
      if (active_[i]) t_.row(rows_) -= t_(rows_, basis_[i]) * t_.row(i);
    }
  }

  // Returns false when unbounded.
  bool optimize(bool allow_artificial) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < rhs(); ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (t_(rows_, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        if (!active_[i] || t_(i, enter) <= kPivotEps) continue;
        const double ratio = t_(i, rhs()) / t_(i, enter);
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  double objective_value() const { return -t_(rows_, rhs()); }

  // Pivots zero-level artificials out of the basis; rows where that is
  // impossible are linearly redundant and get deactivated.
  void expel_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      int c = -1;
      for (int j = 0; j < cols_; ++j) {
        if (std::abs(t_(i, j)) > kPivotEps) {
          c = j;
          break;
        }
      }
      if (c >= 0)
        pivot(i, c);
      else
        active_[i] = false;
    }
  }

  std::vector<bool> active_ = {};
  int rows_;
  int cols_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Tableau tab(A, b);
  tab.active_.assign(m, true);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.set_objective(phase1);
  tab.optimize(true);
  const double scale = 1.0 + b.cwiseAbs().sum();
  LpSolution sol;
  if (tab.objective_value() > 1e-10 * scale) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  tab.expel_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  tab.set_objective(phase2);
  if (!tab.optimize(false)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  // Recompute the basic solution from the original data.
  std::vector<int> rows, cols;
  for (int i = 0; i < m; ++i) {
    if (tab.active_[i]) {
      rows.push_back(i);
      cols.push_back(tab.basis_[i]);
    }
  }
  const int k = static_cast<int>(rows.size());
  Eigen::MatrixXd B(k, k);
  Eigen::VectorXd rhs(k);
  for (int r = 0; r < k; ++r) {
    for (int q = 0; q < k; ++q) B(r, q) = A(rows[r], cols[q]);
    rhs[r] = b[rows[r]];
  }
  sol.x = Eigen::VectorXd::Zero(n);
  if (k > 0) {
    const Eigen::VectorXd xb = B.fullPivLu().solve(rhs);
    for (int q = 0; q < k; ++q) sol.x[cols[q]] = std::max(0.0, xb[q]);
  }
  sol.status = LpStatus::Optimal;
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace fbl
