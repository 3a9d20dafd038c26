#include "bundlecalc/linprog.hpp"

#include <limits>
#include <vector>

namespace bundlecalc {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau layout: rows 0..m-1 are constraints, columns 0..k-1 decision
// variables, column k the right-hand side. basis[i] is the column basic
// in row i.
struct Tableau {
  Eigen::MatrixXd t;
  std::vector<int> basis;
};

void pivot(Tableau& tab, int row, int col) {
  tab.t.row(row) /= tab.t(row, col);
  for (int i = 0; i < tab.t.rows(); ++i) {
    if (i == row) continue;
    const double f = tab.t(i, col);
    if (f != 0.0) tab.t.row(i) -= f * tab.t.row(row);
  }
  tab.basis[row] = col;
}

// Runs simplex on the tableau given reduced costs in the last row.
// allowed(j) gates which columns may enter. Returns false on unboundedness.
bool iterate(Tableau& tab, const std::vector<bool>& allowed) {
  const int m = static_cast<int>(tab.basis.size());
  const int k = static_cast<int>(tab.t.cols()) - 1;
  for (;;) {
    int enter = -1;
    for (int j = 0; j < k; ++j) { // Bland: lowest eligible index
      if (allowed[j] && tab.t(m, j) < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (tab.t(i, enter) > kPivotTol) {
        const double ratio = tab.t(i, k) / tab.t(i, enter);
        if (ratio < best - kPivotTol ||
            (ratio < best + kPivotTol &&
             (leave < 0 || tab.basis[i] < tab.basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;
    pivot(tab, leave, enter);
  }
}

void set_reduced_costs(Tableau& tab, const Eigen::VectorXd& cost) {
  const int m = static_cast<int>(tab.basis.size());
  const int cols = static_cast<int>(tab.t.cols());
  tab.t.row(m).setZero();
  for (int j = 0; j < cols - 1; ++j)
    tab.t(m, j) = j < cost.size() ? cost(j) : 0.0;
  for (int i = 0; i < m; ++i) {
    const double cb = tab.basis[i] < cost.size() ? cost(tab.basis[i]) : 0.0;
    if (cb != 0.0) tab.t.row(m) -= cb * tab.t.row(i);
  }
}

} // namespace

LpSolution solve_equality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const int total = n + m; // decision + artificial variables

  Tableau tab;
  tab.t.setZero(m + 1, total + 1);
  tab.t.block(0, 0, m, n) = A;
  tab.t.block(0, n, m, m).setIdentity();
  tab.t.col(total).head(m) = b;
  for (int i = 0; i < m; ++i) {
    if (tab.t(i, total) < 0.0) tab.t.row(i) = -tab.t.row(i);
    tab.basis.push_back(n + i);
  }

  // Phase 1: minimize the artificial mass.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
  phase1.tail(m).setOnes();
  set_reduced_costs(tab, phase1);
  std::vector<bool> all(total, true);
  iterate(tab, all);
  if (-tab.t(m, total) > 1e-8) {
    return {LpSolution::Status::Infeasible, 0.0, {}};
  }
  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-9) {
          pivot(tab, i, j);
          break;
        }
      }
    }
  }

  // Phase 2: original objective, artificial columns barred.
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
  cost.head(n) = c;
  set_reduced_costs(tab, cost);
  std::vector<bool> decision(total, false);
  for (int j = 0; j < n; ++j) decision[j] = true;
  if (!iterate(tab, decision)) {
    return {LpSolution::Status::Unbounded, 0.0, {}};
  }

  LpSolution sol;
  sol.status = LpSolution::Status::Optimal;
  sol.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) sol.x(tab.basis[i]) = tab.t(i, total);
  }
  sol.value = c.dot(sol.x);
  return sol;
}

} // namespace bundlecalc
