#include "ednet/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ednet {

void LpStandardForm::validate() const {
  const Eigen::Index n = variable_count();
  if (ineq_matrix.cols() != n && ineq_matrix.rows() > 0)
    throw DimensionMismatch("ineq_matrix column count mismatch");
  if (eq_matrix.cols() != n && eq_matrix.rows() > 0)
    throw DimensionMismatch("eq_matrix column count mismatch");
  if (ineq_rhs.size() != ineq_matrix.rows())
    throw DimensionMismatch("ineq_rhs length mismatch");
  if (eq_rhs.size() != eq_matrix.rows())
    throw DimensionMismatch("eq_rhs length mismatch");
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr int kRefactorPeriod = 128;
constexpr int kBlandTrigger = 40;

// Dense-basis revised simplex working state. Columns are indexed
// 0..n-1 structural, n..n+m_ub-1 slacks, n+m_ub..n+m_ub+m-1 artificials.
struct Simplex {
  int m = 0;       // rows
  int n = 0;       // structural variables
  int m_ub = 0;    // inequality rows (slack count)
  int n_real = 0;  // n + m_ub
  Eigen::SparseMatrix<double> cols;  // m x n_real, row signs applied
  Eigen::VectorXd rhs;               // >= 0 after sign normalization
  Eigen::VectorXd row_sign;
  Eigen::VectorXd cost;  // phase-2 cost over real columns
  std::vector<int> basic;
  std::vector<char> is_basic;  // over real + artificial columns
  Eigen::MatrixXd basis_inv;
  Eigen::VectorXd xb;
  int pivots = 0;
  int degenerate_streak = 0;

  bool is_artificial(int col) const { return col >= n_real; }
  int artificial_row(int col) const { return col - n_real; }

  Eigen::VectorXd column(int col) const {
    if (is_artificial(col))
      return Eigen::VectorXd::Unit(m, artificial_row(col));
    return Eigen::VectorXd(cols.col(col));
  }

  void rebuild_inverse() {
    Eigen::MatrixXd basis(m, m);
    for (int i = 0; i < m; ++i) basis.col(i) = column(basic[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    basis_inv = lu.inverse();
    xb = basis_inv * rhs;
    for (int i = 0; i < m; ++i)
      if (xb[i] < 0.0 && xb[i] > -kFeasTol) xb[i] = 0.0;
  }

  double reduced_cost(const Eigen::VectorXd& y, const Eigen::VectorXd& c,
                      int col) const {
    double dot = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(cols, col); it; ++it)
      dot += y[it.row()] * it.value();
    return c[col] - dot;
  }

  /// One simplex phase: maximize c over the current basis. Returns false on
  /// unboundedness.
  bool run_phase(const Eigen::VectorXd& c, int max_pivots) {
    while (true) {
      if (pivots > max_pivots)
        throw IterationLimit("simplex iteration limit exceeded");
      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i)
        cb[i] = is_artificial(basic[i]) ? 0.0 : c[basic[i]];
      // Artificial phase-1 costs live outside `c`; callers encode them by
      // passing c over real columns and relying on basic artificials having
      // been priced through `phase1_cost` below.
      for (int i = 0; i < m; ++i)
        if (is_artificial(basic[i]) && in_phase1) cb[i] = -1.0;
      Eigen::VectorXd y = basis_inv.transpose() * cb;

      const bool bland = degenerate_streak >= kBlandTrigger;
      int entering = -1;
      double best = kReducedCostTol;
      for (int j = 0; j < n_real; ++j) {
        if (is_basic[j]) continue;
        double rc = reduced_cost(y, c, j);
        if (rc > best) {
          entering = j;
          if (bland) break;
          best = rc;
        }
      }
      if (entering < 0) return true;  // optimal for this phase

      Eigen::VectorXd direction = basis_inv * column(entering);

      // Ratio test; basic artificials are pinned to zero, so any movement
      // that would raise them blocks at theta = 0.
      double theta = std::numeric_limits<double>::infinity();
      int leave = -1;
      for (int i = 0; i < m; ++i) {
        double cand = std::numeric_limits<double>::infinity();
        if (direction[i] > kPivotTol) {
          cand = std::max(xb[i], 0.0) / direction[i];
        } else if (is_artificial(basic[i]) && direction[i] < -kPivotTol) {
          cand = 0.0;
        } else {
          continue;
        }
        if (cand < theta - 1e-12 ||
            (cand < theta + 1e-12 && (leave < 0 || basic[i] < basic[leave]))) {
          theta = cand;
          leave = i;
        }
      }
      if (leave < 0) return false;  // unbounded direction

      if (theta <= 1e-12)
        ++degenerate_streak;
      else
        degenerate_streak = 0;

      pivot(entering, leave, direction, theta);
    }
  }

  void pivot(int entering, int leave, const Eigen::VectorXd& direction,
             double theta) {
    const double pivot_el = direction[leave];
    xb -= theta * direction;
    xb[leave] = theta;
    is_basic[basic[leave]] = 0;
    is_basic[entering] = 1;
    basic[leave] = entering;
    basis_inv.row(leave) /= pivot_el;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      double factor = direction[i];
      if (factor != 0.0) basis_inv.row(i) -= factor * basis_inv.row(leave);
    }
    ++pivots;
    if (pivots % kRefactorPeriod == 0) rebuild_inverse();
  }

  bool in_phase1 = false;
};

LpSolution trivial_unconstrained(const LpStandardForm& p) {
  LpSolution sol;
  sol.point = Eigen::VectorXd::Zero(p.variable_count());
  for (Eigen::Index j = 0; j < p.objective.size(); ++j)
    if (p.objective[j] > kReducedCostTol) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
  sol.status = LpStatus::Optimal;
  sol.objective_value = 0.0;
  sol.dual = Eigen::VectorXd(0);
  return sol;
}

Simplex setup(const LpStandardForm& p) {
  Simplex s;
  s.m_ub = static_cast<int>(p.ineq_matrix.rows());
  const int m_eq = static_cast<int>(p.eq_matrix.rows());
  s.m = s.m_ub + m_eq;
  s.n = static_cast<int>(p.variable_count());
  s.n_real = s.n + s.m_ub;

  s.row_sign.resize(s.m);
  s.rhs.resize(s.m);
  for (int i = 0; i < s.m_ub; ++i) {
    s.row_sign[i] = p.ineq_rhs[i] < 0.0 ? -1.0 : 1.0;
    s.rhs[i] = std::abs(p.ineq_rhs[i]);
  }
  for (int i = 0; i < m_eq; ++i) {
    s.row_sign[s.m_ub + i] = p.eq_rhs[i] < 0.0 ? -1.0 : 1.0;
    s.rhs[s.m_ub + i] = std::abs(p.eq_rhs[i]);
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(p.ineq_matrix.nonZeros() + p.eq_matrix.nonZeros() + s.m_ub);
  for (int j = 0; j < s.n; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.ineq_matrix, j); it;
         ++it)
      trips.emplace_back(static_cast<int>(it.row()), j,
                         s.row_sign[it.row()] * it.value());
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.eq_matrix, j); it;
         ++it)
      trips.emplace_back(s.m_ub + static_cast<int>(it.row()), j,
                         s.row_sign[s.m_ub + it.row()] * it.value());
  }
  for (int i = 0; i < s.m_ub; ++i)
    trips.emplace_back(i, s.n + i, s.row_sign[i]);
  s.cols.resize(s.m, s.n_real);
  s.cols.setFromTriplets(trips.begin(), trips.end());

  s.cost = Eigen::VectorXd::Zero(s.n_real);
  s.cost.head(s.n) = p.objective;
  return s;
}

LpSolution extract(const Simplex& s, const LpStandardForm& p) {
  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.point = Eigen::VectorXd::Zero(s.n);
  for (int i = 0; i < s.m; ++i)
    if (s.basic[i] < s.n) sol.point[s.basic[i]] = std::max(s.xb[i], 0.0);
  sol.objective_value = p.objective.dot(sol.point);
  Eigen::VectorXd cb(s.m);
  for (int i = 0; i < s.m; ++i)
    cb[i] = s.is_artificial(s.basic[i]) ? 0.0 : s.cost[s.basic[i]];
  Eigen::VectorXd y = s.basis_inv.transpose() * cb;
  sol.dual = s.row_sign.cwiseProduct(y);
  sol.basis = s.basic;
  sol.pivots = s.pivots;
  return sol;
}

LpSolution solve_impl(const LpStandardForm& p,
                      const std::vector<int>* warm_basis) {
  p.validate();
  if (p.ineq_matrix.rows() + p.eq_matrix.rows() == 0)
    return trivial_unconstrained(p);

  Simplex s = setup(p);
  const int max_pivots = 20000 + 60 * (s.m + s.n_real);
  const int n_cols_total = s.n_real + s.m;
  s.is_basic.assign(n_cols_total, 0);
  s.basic.resize(s.m);

  bool warm_ok = false;
  if (warm_basis && static_cast<int>(warm_basis->size()) == s.m) {
    warm_ok = true;
    for (int col : *warm_basis)
      if (col < 0 || col >= n_cols_total) warm_ok = false;
    if (warm_ok) {
      std::vector<char> seen(n_cols_total, 0);
      for (int col : *warm_basis) {
        if (seen[col]) warm_ok = false;
        seen[col] = 1;
      }
    }
    if (warm_ok) {
      s.basic = *warm_basis;
      for (int col : s.basic) s.is_basic[col] = 1;
      Eigen::MatrixXd basis(s.m, s.m);
      for (int i = 0; i < s.m; ++i) basis.col(i) = s.column(s.basic[i]);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
      // Reject singular or infeasible warm bases and fall back.
      if (std::abs(lu.determinant()) < 1e-300) {
        warm_ok = false;
      } else {
        s.basis_inv = lu.inverse();
        s.xb = s.basis_inv * s.rhs;
        double min_x = s.m > 0 ? s.xb.minCoeff() : 0.0;
        // Basic artificials must sit at zero for the basis to be usable.
        for (int i = 0; i < s.m && warm_ok; ++i)
          if (s.is_artificial(s.basic[i]) && std::abs(s.xb[i]) > kFeasTol)
            warm_ok = false;
        if (min_x < -kFeasTol) warm_ok = false;
        if (warm_ok)
          for (int i = 0; i < s.m; ++i)
            if (s.xb[i] < 0.0) s.xb[i] = 0.0;
      }
      if (!warm_ok) {
        std::fill(s.is_basic.begin(), s.is_basic.end(), 0);
      }
    }
  }

  if (!warm_ok) {
    // Cold start: slacks where available, artificials elsewhere.
    bool need_phase1 = false;
    for (int i = 0; i < s.m; ++i) {
      if (i < s.m_ub && s.row_sign[i] > 0.0) {
        s.basic[i] = s.n + i;
      } else {
        s.basic[i] = s.n_real + i;
        need_phase1 = true;
      }
      s.is_basic[s.basic[i]] = 1;
    }
    s.rebuild_inverse();

    if (need_phase1) {
      s.in_phase1 = true;
      Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(s.n_real);
      if (!s.run_phase(phase1_cost, max_pivots))
        throw Error("phase-1 simplex reported an unbounded direction");
      double infeas = 0.0;
      for (int i = 0; i < s.m; ++i)
        if (s.is_artificial(s.basic[i])) infeas += std::max(s.xb[i], 0.0);
      if (infeas > kFeasTol) {
        LpSolution sol;
        sol.status = LpStatus::Infeasible;
        sol.point = Eigen::VectorXd::Zero(s.n);
        return sol;
      }
      s.in_phase1 = false;
      // Pivot lingering artificials out where a real column is available.
      for (int r = 0; r < s.m; ++r) {
        if (!s.is_artificial(s.basic[r])) continue;
        Eigen::VectorXd brow = s.basis_inv.row(r).transpose();
        int replacement = -1;
        for (int j = 0; j < s.n_real && replacement < 0; ++j) {
          if (s.is_basic[j]) continue;
          double val = 0.0;
          for (Eigen::SparseMatrix<double>::InnerIterator it(s.cols, j); it;
               ++it)
            val += brow[it.row()] * it.value();
          if (std::abs(val) > 1e-7) replacement = j;
        }
        if (replacement >= 0) {
          Eigen::VectorXd direction = s.basis_inv * s.column(replacement);
          s.pivot(replacement, r, direction, 0.0);
        }
        // Otherwise the row is redundant; the artificial stays basic at 0
        // and the ratio test keeps it pinned there.
      }
    }
  }

  s.degenerate_streak = 0;
  if (!s.run_phase(s.cost, max_pivots)) {
    LpSolution sol;
    sol.status = LpStatus::Unbounded;
    sol.point = Eigen::VectorXd::Zero(s.n);
    return sol;
  }
  s.rebuild_inverse();
  return extract(s, p);
}

}  // namespace

LpSolution solve_lp(const LpStandardForm& problem) {
  return solve_impl(problem, nullptr);
}

LpSolution solve_lp(const LpStandardForm& problem,
                    const std::vector<int>& warm_basis) {
  return solve_impl(problem, &warm_basis);
}

}  // namespace ednet
