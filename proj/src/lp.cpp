#include "eqidx/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace eqidx {

namespace {

constexpr double kEps = 1e-11;

// Tableau rows: one per constraint, columns: variables then RHS.
// basis[i] is the basic variable of row i.
struct Tableau {
  std::vector<std::vector<double>> rows;
  std::vector<double> obj;  // reduced costs, last entry = -objective value
  std::vector<int> basis;

  void pivot(int r, int c) {
    double p = rows[r][c];
    for (double& v : rows[r]) v /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) == r || std::abs(rows[i][c]) < 1e-300) continue;
      double f = rows[i][c];
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        rows[i][j] -= f * rows[r][j];
      }
      rows[i][c] = 0.0;
    }
    double f = obj[c];
    if (std::abs(f) > 0.0) {
      for (std::size_t j = 0; j < obj.size(); ++j) obj[j] -= f * rows[r][j];
      obj[c] = 0.0;
    }
    basis[r] = c;
  }

  // Returns false on unboundedness.
  bool run(int num_cols) {
    const int max_iters = 20000;
    for (int it = 0; it < max_iters; ++it) {
      int enter = -1;
      for (int j = 0; j < num_cols; ++j) {  // Bland: smallest index
        if (obj[j] > kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double a = rows[i][enter];
        if (a > kEps) {
          double ratio = rows[i].back() / a;
          if (ratio < best - kEps ||
              (ratio < best + kEps &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best = ratio;
            leave = static_cast<int>(i);
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit");
  }
};

}  // namespace

LpResult solve_lp(const std::vector<double>& c,
                  const std::vector<std::vector<double>>& a_ub,
                  const std::vector<double>& b_ub,
                  const std::vector<std::vector<double>>& a_eq,
                  const std::vector<double>& b_eq) {
  const int n = static_cast<int>(c.size());
  const int m_ub = static_cast<int>(a_ub.size());
  const int m_eq = static_cast<int>(a_eq.size());
  const int m = m_ub + m_eq;
  const int n_slack = m_ub;
  const int n_art = m;
  const int total = n + n_slack + n_art;

  Tableau t;
  t.rows.assign(m, std::vector<double>(total + 1, 0.0));
  t.basis.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    const auto& row = i < m_ub ? a_ub[i] : a_eq[i - m_ub];
    double rhs = i < m_ub ? b_ub[i] : b_eq[i - m_ub];
    double sign = 1.0;
    if (rhs < 0.0) sign = -1.0;  // keep RHS nonnegative
    for (int j = 0; j < n; ++j) t.rows[i][j] = sign * row[j];
    if (i < m_ub) t.rows[i][n + i] = sign * 1.0;
    t.rows[i][n + n_slack + i] = 1.0;
    t.rows[i][total] = sign * rhs;
    t.basis[i] = n + n_slack + i;
  }

  // Phase 1: minimize sum of artificials == maximize -sum.
  t.obj.assign(total + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= total; ++j) t.obj[j] += t.rows[i][j];
  }
  for (int i = 0; i < n_art; ++i) t.obj[n + n_slack + i] = 0.0;
  if (!t.run(n + n_slack)) {
    throw std::runtime_error("phase-1 simplex unbounded");
  }
  if (t.obj[total] > 1e-7) {
    return LpResult{LpResult::Status::kInfeasible, 0.0, {}};
  }
  // Drive any remaining artificial out of the basis.
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] >= n + n_slack) {
      int enter = -1;
      for (int j = 0; j < n + n_slack; ++j) {
        if (std::abs(t.rows[i][j]) > kEps) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) t.pivot(i, enter);
      // Otherwise the row is redundant; the artificial stays at zero.
    }
  }

  // Phase 2.
  t.obj.assign(total + 1, 0.0);
  for (int j = 0; j < n; ++j) t.obj[j] = c[j];
  for (int i = 0; i < m; ++i) {
    double f = t.basis[i] < n ? c[t.basis[i]] : 0.0;
    if (f != 0.0) {
      for (int j = 0; j <= total; ++j) t.obj[j] -= f * t.rows[i][j];
    }
  }
  if (!t.run(n + n_slack)) {
    return LpResult{LpResult::Status::kUnbounded, 0.0, {}};
  }

  LpResult out;
  out.status = LpResult::Status::kOptimal;
  out.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) out.x[t.basis[i]] = t.rows[i][total];
  }
  out.objective = 0.0;
  for (int j = 0; j < n; ++j) out.objective += c[j] * out.x[j];
  return out;
}

}  // namespace eqidx
