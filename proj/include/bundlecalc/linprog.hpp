#pragma once

#include <Eigen/Dense>

namespace bundlecalc {

struct LpSolution {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Solves  min c'x  subject to  Ax = b, x >= 0  with a dense two-phase
/// simplex using Bland's rule. Sized for the small fiber dimensions that
/// occur here (tens of variables at most).
LpSolution solve_equality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c);

} // namespace bundlecalc
