#include "eqidx/equilibria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "eqidx/lp.hpp"

namespace eqidx {

namespace {

constexpr double kInfCond = std::numeric_limits<double>::infinity();

double condition_number(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= smax * 1e-300) return kInfCond;
  return smax / smin;
}

// Nonempty strategy subsets of one player, by increasing bitmask.
std::vector<std::vector<int>> subsets(int k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> sub;
    for (int s = 0; s < k; ++s) {
      if (mask & (1u << s)) sub.push_back(s);
    }
    out.push_back(std::move(sub));
  }
  return out;
}

struct SideSolution {
  bool found = false;
  bool singular = false;
  double condition = 1.0;
  std::vector<double> y;  // mixture over the opponent's support
};

// Finds an opponent mixture (over `opp_support`) that makes the rows in
// `own_support` mutually indifferent. `payoff(i, j)` gives the payoff of
// own_support[i] against opp_support[j].
SideSolution solve_indifference_side(const Eigen::MatrixXd& payoff,
                                     double support_threshold) {
  const int t = static_cast<int>(payoff.rows());
  const int u = static_cast<int>(payoff.cols());
  Eigen::MatrixXd m(t, u);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(t);
  for (int i = 0; i + 1 < t; ++i) {
    m.row(i) = payoff.row(0) - payoff.row(i + 1);
  }
  m.row(t - 1).setOnes();
  b(t - 1) = 1.0;

  SideSolution out;
  if (t == u) {
    out.condition = condition_number(m);
    if (out.condition < 1e8) {
      Eigen::VectorXd y = m.fullPivLu().solve(b);
      for (int j = 0; j < u; ++j) {
        if (y(j) <= support_threshold) return out;
      }
      out.found = true;
      out.y.assign(y.data(), y.data() + u);
      return out;
    }
  }

  // Rectangular or numerically singular: decide by linear feasibility,
  // maximizing the smallest support probability.
  std::vector<double> c(u + 1, 0.0);
  c[u] = 1.0;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  for (int j = 0; j < u; ++j) {
    std::vector<double> row(u + 1, 0.0);
    row[j] = -1.0;
    row[u] = 1.0;  // margin - y_j <= 0
    a_ub.push_back(std::move(row));
    b_ub.push_back(0.0);
  }
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  for (int i = 0; i < t; ++i) {
    std::vector<double> row(u + 1, 0.0);
    for (int j = 0; j < u; ++j) row[j] = m(i, j);
    a_eq.push_back(std::move(row));
    b_eq.push_back(b(i));
  }
  LpResult lp = solve_lp(c, a_ub, b_ub, a_eq, b_eq);
  if (lp.status != LpResult::Status::kOptimal ||
      lp.objective <= std::max(support_threshold, 1e-10)) {
    return out;
  }
  out.found = true;
  out.singular = true;
  out.condition = kInfCond;
  out.y.assign(lp.x.begin(), lp.x.begin() + u);
  return out;
}

MixedProfile profile_from_support(
    const Game& game, const std::vector<std::vector<int>>& support,
    const std::vector<std::vector<double>>& probs) {
  MixedProfile p;
  p.probs.resize(game.num_players());
  for (int n = 0; n < game.num_players(); ++n) {
    p.probs[n].assign(game.num_strategies(n), 0.0);
    for (std::size_t i = 0; i < support[n].size(); ++i) {
      p.probs[n][support[n][i]] = probs[n][i];
    }
  }
  return p;
}

struct NewtonResult {
  bool converged = false;
  std::vector<std::vector<double>> probs;
  double condition = 1.0;
};

// Indifference system on a fixed support: payoff differences within each
// player's support plus per-player probability sums.
NewtonResult newton_on_support(const Game& game,
                               const std::vector<std::vector<int>>& support,
                               std::vector<std::vector<double>> start,
                               bool minimum_norm = false) {
  const int np = game.num_players();
  int dim = 0;
  for (const auto& s : support) dim += static_cast<int>(s.size());

  auto assemble = [&](const std::vector<std::vector<double>>& z,
                      Eigen::VectorXd& f, Eigen::MatrixXd& jac) {
    MixedProfile sigma = profile_from_support(game, support, z);
    std::vector<int> var_base(np, 0);
    for (int n = 1; n < np; ++n) {
      var_base[n] = var_base[n - 1] + static_cast<int>(support[n - 1].size());
    }
    int row = 0;
    for (int n = 0; n < np; ++n) {
      const auto& tn = support[n];
      for (std::size_t i = 1; i < tn.size(); ++i, ++row) {
        f(row) = pure_vs_profile(game, n, tn[0], sigma) -
                 pure_vs_profile(game, n, tn[i], sigma);
        for (int m = 0; m < np; ++m) {
          if (m == n) continue;
          for (std::size_t j = 0; j < support[m].size(); ++j) {
            double d =
                pure_pair_vs_profile(game, n, tn[0], m, support[m][j], sigma) -
                pure_pair_vs_profile(game, n, tn[i], m, support[m][j], sigma);
            jac(row, var_base[m] + static_cast<int>(j)) = d;
          }
        }
      }
    }
    for (int n = 0; n < np; ++n, ++row) {
      double sum = -1.0;
      for (double v : z[n]) sum += v;
      f(row) = sum;
      for (std::size_t j = 0; j < support[n].size(); ++j) {
        jac(row, var_base[n] + static_cast<int>(j)) = 1.0;
      }
    }
  };

  NewtonResult out;
  std::vector<std::vector<double>> z = std::move(start);
  Eigen::VectorXd f(dim);
  Eigen::MatrixXd jac(dim, dim);
  for (int iter = 0; iter < 200; ++iter) {
    f.setZero();
    jac.setZero();
    assemble(z, f, jac);
    if (f.lpNorm<Eigen::Infinity>() < 1e-12) {
      out.converged = true;
      out.probs = z;
      out.condition = condition_number(jac);
      return out;
    }
    // The minimum-norm step follows a rank-deficient system (a continuum of
    // solutions) to the nearest point instead of sliding along it.
    Eigen::VectorXd step =
        minimum_norm ? jac.completeOrthogonalDecomposition().solve(f).eval()
                     : jac.colPivHouseholderQr().solve(f).eval();
    if (!step.allFinite()) return out;
    int k = 0;
    double drift = 0.0;
    for (auto& zn : z) {
      for (double& v : zn) {
        v -= step(k++);
        drift = std::max(drift, std::abs(v));
      }
    }
    if (drift > 1e6) return out;  // diverged
  }
  return out;
}

}  // namespace

std::pair<double, std::vector<int>> best_reply_value_and_set(
    const Game& game, int player, const MixedProfile& opponents, double tol) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(game.num_strategies(player));
  for (int s = 0; s < game.num_strategies(player); ++s) {
    vals[s] = pure_vs_profile(game, player, s, opponents);
    best = std::max(best, vals[s]);
  }
  std::vector<int> set;
  for (int s = 0; s < game.num_strategies(player); ++s) {
    if (vals[s] >= best - tol) set.push_back(s);
  }
  return {best, set};
}

std::pair<bool, double> is_equilibrium(const Game& game,
                                       const MixedProfile& profile,
                                       double tol) {
  if (!profile.matches(game)) {
    throw std::invalid_argument("profile dimensions do not match game");
  }
  double worst = 0.0;
  for (int n = 0; n < game.num_players(); ++n) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(game.num_strategies(n));
    for (int s = 0; s < game.num_strategies(n); ++s) {
      vals[s] = pure_vs_profile(game, n, s, profile);
      best = std::max(best, vals[s]);
    }
    for (int s = 0; s < game.num_strategies(n); ++s) {
      if (profile.probs[n][s] > 1e-12) {
        worst = std::max(worst, best - vals[s]);
      }
    }
  }
  return {worst <= tol, worst};
}

std::vector<EquilibriumRecord> enumerate_equilibria(
    const Game& game, const EnumerateOptions& opts) {
  const int np = game.num_players();
  double combos = 1.0;
  for (int n = 0; n < np; ++n) {
    combos *= std::pow(2.0, game.num_strategies(n)) - 1.0;
  }
  if (combos > static_cast<double>(opts.max_support_combinations)) {
    throw BudgetExceededError("support enumeration budget exceeded", {});
  }

  std::vector<std::vector<std::vector<int>>> per_player_subsets(np);
  for (int n = 0; n < np; ++n) {
    per_player_subsets[n] = subsets(game.num_strategies(n));
  }

  std::vector<EquilibriumRecord> accepted;
  auto try_accept = [&](MixedProfile candidate, bool singular, double cond) {
    auto [ok, residual] = is_equilibrium(game, candidate, opts.tol);
    if (!ok) return;
    // Canonicalize near-boundary solutions: when an unused strategy is an
    // alternative best reply, Newton on a support superset converges to
    // points with stray weight eps whose optimality violation is O(eps^2),
    // invisible below sqrt(tol). Zero such weights and keep the trimmed
    // point whenever it still verifies.
    const double snap = std::sqrt(opts.tol);
    MixedProfile trimmed = candidate;
    bool snapped = false;
    for (auto& pn : trimmed.probs) {
      for (double& v : pn) {
        if (v > 0.0 && v < snap) {
          v = 0.0;
          snapped = true;
        }
      }
    }
    if (snapped) {
      trimmed.normalize();
      if (auto [ok2, res2] = is_equilibrium(game, trimmed, opts.tol); ok2) {
        candidate = std::move(trimmed);
        residual = res2;
      }
    }
    for (const auto& r : accepted) {
      if (r.profile.linf_distance(candidate) < opts.dedup_radius) return;
    }
    EquilibriumRecord rec;
    rec.profile = candidate;
    rec.support = candidate.support(opts.support_threshold);
    rec.max_residual = residual;
    rec.is_isolated = !singular;
    rec.jacobian_condition = cond;
    bool quasi = true;
    for (int n = 0; n < np && quasi; ++n) {
      auto [v, br] = best_reply_value_and_set(game, n, candidate, opts.tol);
      if (br != rec.support[n]) quasi = false;
    }
    rec.is_quasi_strict = quasi;
    accepted.push_back(std::move(rec));
  };

  std::vector<std::size_t> cursor(np, 0);
  std::uint64_t support_counter = 0;
  while (true) {
    std::vector<std::vector<int>> support(np);
    for (int n = 0; n < np; ++n) support[n] = per_player_subsets[n][cursor[n]];
    ++support_counter;

    if (np == 2) {
      // Player 1's mixture is pinned by player 2's indifference and vice
      // versa, so the two sides decouple into exact linear feasibility.
      const auto& t0 = support[0];
      const auto& t1 = support[1];
      Eigen::MatrixXd pay0(t0.size(), t1.size());  // decides player 2's y
      Eigen::MatrixXd pay1(t1.size(), t0.size());  // decides player 1's x
      std::vector<int> prof(2);
      for (std::size_t i = 0; i < t0.size(); ++i) {
        for (std::size_t j = 0; j < t1.size(); ++j) {
          prof[0] = t0[i];
          prof[1] = t1[j];
          pay0(i, j) = game.payoff(0, prof);
          pay1(j, i) = game.payoff(1, prof);
        }
      }
      SideSolution side_y =
          solve_indifference_side(pay0, opts.support_threshold);
      if (side_y.found) {
        SideSolution side_x =
            solve_indifference_side(pay1, opts.support_threshold);
        if (side_x.found) {
          MixedProfile candidate =
              profile_from_support(game, support, {side_x.y, side_y.y});
          bool singular = side_x.singular || side_y.singular;
          try_accept(candidate, singular,
                     std::max(side_x.condition, side_y.condition));
        }
      }
    } else {
      std::seed_seq seq{opts.seed, support_counter};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> unif(0.05, 1.0);
      bool pure_support = true;
      for (const auto& s : support) pure_support &= s.size() == 1;
      const int starts = pure_support ? 1 : opts.newton_starts;
      for (int attempt = 0; attempt < starts; ++attempt) {
        std::vector<std::vector<double>> start(np);
        for (int n = 0; n < np; ++n) {
          double sum = 0.0;
          for (std::size_t j = 0; j < support[n].size(); ++j) {
            start[n].push_back(unif(rng));
            sum += start[n].back();
          }
          for (double& v : start[n]) v /= sum;
        }
        NewtonResult nr = newton_on_support(game, support, start);
        if (!nr.converged) continue;
        bool in_simplex = true;
        for (auto& zn : nr.probs) {
          for (double& v : zn) {
            if (v <= opts.support_threshold) in_simplex = false;
            if (v > 1.0 + 1e-9) in_simplex = false;
          }
        }
        if (!in_simplex) continue;
        MixedProfile candidate = profile_from_support(game, support, nr.probs);
        candidate.normalize();
        try_accept(candidate, nr.condition > opts.singular_condition,
                   nr.condition);
      }
    }

    int n = np - 1;
    while (n >= 0) {
      if (++cursor[n] < per_player_subsets[n].size()) break;
      cursor[n] = 0;
      --n;
    }
    if (n < 0) break;
  }
  return accepted;
}

void project_to_simplex(std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - theta);
}

bool snap_to_equilibrium(const Game& game, MixedProfile& profile,
                         double tol) {
  std::vector<std::vector<int>> support = profile.support(1e-9);
  std::vector<std::vector<double>> z(game.num_players());
  for (int n = 0; n < game.num_players(); ++n) {
    for (int s : support[n]) z[n].push_back(profile.probs[n][s]);
  }
  NewtonResult nr = newton_on_support(game, support, z, true);
  if (!nr.converged) return false;
  for (const auto& zn : nr.probs) {
    for (double v : zn) {
      if (v < -1e-9) return false;
    }
  }
  MixedProfile snapped = profile_from_support(game, support, nr.probs);
  snapped.normalize();
  if (!is_equilibrium(game, snapped, tol).first) return false;
  profile = std::move(snapped);
  return true;
}

ComponentRecord sample_component(const Game& game, const MixedProfile& seed,
                                 double step, int budget,
                                 std::uint64_t rng_seed, double tol) {
  if (!is_equilibrium(game, seed, std::max(tol, 1e-7)).first) {
    throw std::invalid_argument("component seed is not an equilibrium");
  }
  std::mt19937_64 rng(rng_seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(-step, step);
  ComponentRecord comp;
  comp.members.push_back(seed);
  const double min_sep = step * 0.25;
  for (int it = 0; it < budget; ++it) {
    std::uniform_int_distribution<std::size_t> pick(0, comp.members.size() - 1);
    MixedProfile prop = comp.members[pick(rng)];
    for (auto& pv : prop.probs) {
      for (double& x : pv) x += unif(rng);
      project_to_simplex(pv);
    }
    if (!is_equilibrium(game, prop, tol).first) {
      // Curved components have measure zero, so a raw step almost never
      // lands on them: snap back onto the set.
      MixedProfile snapped = prop;
      if (!snap_to_equilibrium(game, snapped, tol) ||
          snapped.linf_distance(prop) > 2 * step) {
        continue;
      }
      prop = snapped;
    }
    bool fresh = true;
    for (const auto& m : comp.members) {
      if (m.linf_distance(prop) < min_sep) {
        fresh = false;
        break;
      }
    }
    if (fresh) {
      comp.members.push_back(prop);
      comp.bounding_radius =
          std::max(comp.bounding_radius, seed.linf_distance(prop));
    }
  }
  return comp;
}

std::vector<std::vector<int>> cluster_components(
    const std::vector<EquilibriumRecord>& records, double radius) {
  const int n = static_cast<int>(records.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (records[i].profile.linf_distance(records[j].profile) <= radius) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> root_of(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (root_of[r] < 0) {
      root_of[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[root_of[r]].push_back(i);
  }
  return groups;
}

}  // namespace eqidx
