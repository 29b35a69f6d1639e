#pragma once

#include <Eigen/Dense>

namespace coherence::detail {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;     ///< primal solution
  Eigen::VectorXd duals; ///< y with c - A^T y >= 0 at optimality
  double value = 0.0;
};

/// Dense two-phase tableau simplex for  min c^T x  s.t.  A x = b, x >= 0.
/// Bland's rule; intended for a handful of rows and a few thousand columns.
LpSolution solve_standard_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c, double pivot_tol = 1e-11);

} // namespace coherence::detail
