#pragma once

#include <Eigen/Dense>

namespace fbl {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

// Dense two-phase simplex with Bland's rule for
//   minimize c^T x  subject to  A x = b,  x >= 0.
// Intended for desk-scale problems (tens of columns). On optimality the basic
// solution is recomputed from the final basis by a direct solve.
LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace fbl
