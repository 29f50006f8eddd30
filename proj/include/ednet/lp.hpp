#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "ednet/errors.hpp"

namespace ednet {

/// maximize objective . v  subject to
///   ineq_matrix v <= ineq_rhs,  eq_matrix v == eq_rhs,  v >= 0.
struct LpStandardForm {
  Eigen::VectorXd objective;
  Eigen::SparseMatrix<double> ineq_matrix;  // m_ub x n
  Eigen::VectorXd ineq_rhs;
  Eigen::SparseMatrix<double> eq_matrix;  // m_eq x n
  Eigen::VectorXd eq_rhs;

  Eigen::Index variable_count() const { return objective.size(); }
  Eigen::Index row_count() const {
    return ineq_matrix.rows() + eq_matrix.rows();
  }
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  Eigen::VectorXd point;  // structural variables only
  double objective_value = 0.0;
  LpStatus status = LpStatus::Optimal;
  /// Row multipliers (ineq rows then eq rows); a dual certificate at optimum.
  Eigen::VectorXd dual;
  /// Final basis (work-column indices), usable to warm-start a later solve
  /// over the same constraint rows.
  std::vector<int> basis;
  int pivots = 0;
};

/// Revised simplex, two-phase, dense basis inverse, Dantzig pricing with a
/// Bland fallback after a degenerate streak. Deterministic.
LpSolution solve_lp(const LpStandardForm& problem);

/// Same, but tries to start from a previous basis over identical rows; falls
/// back to a cold start when the basis is stale or infeasible.
LpSolution solve_lp(const LpStandardForm& problem,
                    const std::vector<int>& warm_basis);

}  // namespace ednet
