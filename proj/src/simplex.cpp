#include "simplex.hpp"

#include <cmath>
#include <vector>

namespace coherence::detail {

namespace {

class Tableau {
public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol)
      : rows_(a.rows()), vars_(a.cols()), tol_(tol),
        t_(Eigen::MatrixXd::Zero(a.rows() + 1, a.cols() + a.rows() + 1)),
        basis_(static_cast<std::size_t>(a.rows())), sign_(a.rows()) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      sign_(i) = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(vars_) = sign_(i) * a.row(i);
      t_(i, vars_ + i) = 1.0;
      t_(i, rhs()) = sign_(i) * b(i);
      basis_[static_cast<std::size_t>(i)] = vars_ + i;
    }
  }

  Eigen::Index rhs() const { return vars_ + rows_; }

  // Loads the reduced-cost row for column costs `cost` (length vars + rows).
  void load_costs(const Eigen::VectorXd& cost) {
    t_.row(rows_).head(rhs()) = cost.transpose();
    t_(rows_, rhs()) = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  // Runs simplex iterations with entering columns restricted to [0, limit).
  LpStatus iterate(Eigen::Index limit, long max_iters) {
    int degenerate_streak = 0;
    for (long it = 0; it < max_iters; ++it) {
      const bool bland = degenerate_streak > 50;
      Eigen::Index enter = -1;
      double best = -tol_;
      for (Eigen::Index j = 0; j < limit; ++j) {
        const double r = t_(rows_, j);
        if (r < best) {
          enter = j;
          if (bland) break;
          best = r;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      Eigen::Index leave = -1;
      double best_ratio = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double coef = t_(i, enter);
        if (coef <= tol_) continue;
        const double ratio = t_(i, rhs()) / coef;
        if (leave < 0 || ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 &&
             basis_[static_cast<std::size_t>(i)] <
                 basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      degenerate_streak = best_ratio <= 1e-14 ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
    }
    return LpStatus::iteration_limit;
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Pivots basic artificials out wherever a structural column allows it.
  void evict_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < vars_) continue;
      for (Eigen::Index j = 0; j < vars_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective() const { return -t_(rows_, rhs()); }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(vars_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < vars_) x(j) = std::max(0.0, t_(i, rhs()));
    }
    return x;
  }

  // With zero-cost artificial columns, their reduced costs equal -y.
  Eigen::VectorXd duals() const {
    Eigen::VectorXd y(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      y(i) = -t_(rows_, vars_ + i) * sign_(i);
    }
    return y;
  }

private:
  Eigen::Index rows_;
  Eigen::Index vars_;
  double tol_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  Eigen::VectorXd sign_;
};

} // namespace

LpSolution solve_standard_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c, double pivot_tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const long max_iters = 100 * static_cast<long>(m + n) + 1000;
  Tableau tab(a, b, pivot_tol);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.load_costs(phase1);
  LpSolution sol;
  LpStatus st = tab.iterate(n + m, max_iters);
  if (st == LpStatus::iteration_limit) {
    sol.status = st;
    return sol;
  }
  if (tab.objective() > 1e-9 * std::max(1.0, b.lpNorm<Eigen::Infinity>())) {
    sol.status = LpStatus::infeasible;
    return sol;
  }
  tab.evict_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  tab.load_costs(phase2);
  sol.status = tab.iterate(n, max_iters);
  sol.x = tab.primal();
  sol.duals = tab.duals();
  sol.value = c.dot(sol.x);
  return sol;
}

} // namespace coherence::detail
