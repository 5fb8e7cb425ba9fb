#pragma once

#include <vector>

namespace eqidx {

// Dense two-phase simplex for the tiny LPs that show up in dominance
// certification and support feasibility. Maximizes c.x subject to
// A_ub x <= b_ub, A_eq x = b_eq, x >= 0. Bland's rule throughout.
struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

LpResult solve_lp(const std::vector<double>& c,
                  const std::vector<std::vector<double>>& a_ub,
                  const std::vector<double>& b_ub,
                  const std::vector<std::vector<double>>& a_eq,
                  const std::vector<double>& b_eq);

}  // namespace eqidx
