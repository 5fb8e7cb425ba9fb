#include "eqidx/running_example.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "eqidx/equilibria.hpp"

namespace eqidx {

double f_sym(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("x must be in [0,1]");
  if (x <= 0.5) return x / (1.0 - 2.0 * x * x + x);
  return (-2.0 * x * x + 4.0 * x - 1.0) / (-2.0 * x * x + 3.0 * x);
}

double f0_sym(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("x must be in [0,1]");
  if (x <= 2.0 / 3.0) return 7.0 / 8.0;
  return (-2.0 * x * x + 4.0 * x - 1.0) / (-2.0 * x * x + 3.0 * x);
}

double v_sym(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("x must be in [0,1]");
  return x <= 0.5 ? 1.0 - x : x;
}

double beta3_sym(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("x must be in [0,1]");
  if (x <= 2.0 / 3.0) return 1.0;
  if (x < 0.75) return -12.0 * x + 9.0;
  return 0.0;
}

std::array<double, 2> g_sym(double x, double delta) {
  return {beta3_sym(x) * (v_sym(x) - x + delta), 0.0};
}

double gamma_sym(double theta, double x) {
  return theta * (1.0 - 8.0 * x / 7.0);
}

bool verify_perturbed_unique(double delta, bool with_bonus) {
  if (with_bonus && (delta <= 0.0 || delta > 0.25)) {
    throw std::invalid_argument("delta must lie in (0, 1/4]");
  }
  // Payoffs of the two pure strategies against the symmetric profile x.
  auto payoff_first = [&](double x) {
    return x + (with_bonus ? g_sym(x, delta)[0] : 0.0);
  };
  auto payoff_second = [&](double x) { return 1.0 - x; };

  const double step = 1e-4;
  // A true interior indifference point sits within step/2 of a grid point and
  // the indifference gap has slope at most ~2.5, so this margin cannot miss
  // one; it stays below the gap the bonus guarantees elsewhere.
  const double detect = with_bonus ? std::min(2.5e-4, delta / 2) : 2.5e-4;

  if (payoff_second(0.0) >= payoff_first(0.0) - 1e-12) return false;
  for (int k = 1; k < 10000; ++k) {
    double x = k * step;
    if (std::abs(payoff_first(x) - payoff_second(x)) < detect) return false;
  }
  return payoff_first(1.0) >= payoff_second(1.0) - 1e-12;
}

namespace {

constexpr double kFaceTol = 1e-9;

}  // namespace

FinalGame build_final_game(const FinalGameOptions& opts) {
  if (opts.zeta <= 0.0 || opts.zeta >= 1.0 / 3.0) {
    throw std::invalid_argument("zeta must lie in (0, 1/3)");
  }
  if (opts.delta < 0.0 || opts.bonus_delta <= 0.0 || opts.bonus_delta > 0.25) {
    throw std::invalid_argument("bad delta parameters");
  }

  // Strategy space: the square [0,1]^2 with coordinates (x, theta), refined
  // so every simplex touching the theta = 1 face has diameter below zeta,
  // while the theta = 0 edge keeps only its two endpoints as vertices.
  const double diam = 0.9 * opts.zeta;
  const double offset = 1.0 - 2.0 * opts.zeta;
  RefinedTriangulation r =
      refine_near_face({{0, 0}, {1, 1}}, 1, offset, diam, opts.seed);

  FinalGame fg;
  fg.tri = r.tri;
  fg.options = opts;

  const int n = static_cast<int>(r.tri.vertices.size());
  double theta_min = 1.0;
  int bottom = 0;
  for (int i = 0; i < n; ++i) {
    double x = r.tri.vertices[i][0];
    double theta = r.tri.vertices[i][1];
    fg.coords.push_back({x, theta});
    if (theta <= kFaceTol) {
      ++bottom;
      if (std::abs(theta) > 1e-12 ||
          (std::abs(x) > 1e-12 && std::abs(x - 1.0) > 1e-12)) {
        throw std::runtime_error("unexpected vertex on the theta = 0 edge");
      }
      if (std::abs(x - 1.0) <= 1e-12) fg.designated = i;
    } else {
      theta_min = std::min(theta_min, theta);
    }
  }
  if (bottom != 2 || fg.designated < 0) {
    throw std::runtime_error("theta = 0 edge must carry exactly its corners");
  }
  for (const auto& s : r.tri.simplices) {
    bool touches_top = false;
    double d2max = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (fg.coords[s[i]][1] >= 1.0 - kFaceTol) touches_top = true;
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        double dx = fg.coords[s[i]][0] - fg.coords[s[j]][0];
        double dt = fg.coords[s[i]][1] - fg.coords[s[j]][1];
        d2max = std::max(d2max, dx * dx + dt * dt);
      }
    }
    if (touches_top && std::sqrt(d2max) >= opts.zeta) {
      throw std::runtime_error("simplex at theta = 1 exceeds the zeta bound");
    }
  }

  // Shift the paraboloid witness by the affine map -x + c*theta: the shifted
  // function is still convex and linear precisely on the simplices, vanishes
  // exactly on the theta = 0 edge (its endpoints lift to x^2 - x = 0), and
  // stays positive everywhere else once c clears 1/(4*theta_min).
  const double c = 0.25 / theta_min + 1.0;
  fg.rho.values.resize(n);
  for (int i = 0; i < n; ++i) {
    fg.rho.values[i] =
        r.witness.values[i] - fg.coords[i][0] + c * fg.coords[i][1];
    if (i != fg.designated && fg.coords[i][1] > kFaceTol &&
        fg.rho.values[i] <= 0.0) {
      throw std::logic_error("penalty witness failed positivity");
    }
  }

  // Symmetric two-player payoffs. A vertex (x, theta) plays the coordination
  // mixture (x, 1-x); theta adds the gamma bonus; the g bonus is gated on
  // the opponent sitting on the theta = 1 face; the penalty term subtracts
  // delta times the convex witness at the own vertex.
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "v" + std::to_string(i);
  std::vector<double> flat(2ull * n * n);
  for (int i = 0; i < n; ++i) {
    const double xi = fg.coords[i][0], ti = fg.coords[i][1];
    for (int j = 0; j < n; ++j) {
      const double xj = fg.coords[j][0], tj = fg.coords[j][1];
      double a = xi * xj + (1.0 - xi) * (1.0 - xj);
      if (opts.with_gamma) a += gamma_sym(ti, xj);
      if (tj >= 1.0 - kFaceTol) a += g_sym(xj, opts.bonus_delta)[0] * xi;
      a -= opts.delta * fg.rho.values[i];
      flat[(std::size_t)i * n + j] = a;               // row player
      flat[(std::size_t)n * n + (std::size_t)j * n + i] = a;  // column player
    }
  }
  fg.game = Game({labels, labels}, std::move(flat));
  return fg;
}

namespace {

// Nonempty subsets of simplex vertex sets, deduplicated: exactly the
// admissible supports.
std::vector<std::vector<int>> admissible_supports(const Triangulation& tri) {
  std::set<std::vector<int>> seen;
  for (const auto& s : tri.simplices) {
    for (int mask = 1; mask < (1 << s.size()); ++mask) {
      std::vector<int> sub;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if ((mask >> i) & 1) sub.push_back(s[i]);
      }
      seen.insert(std::move(sub));
    }
  }
  return {seen.begin(), seen.end()};
}

void keep_if_new(std::vector<MixedProfile>& found, MixedProfile candidate) {
  for (const auto& other : found) {
    if (candidate.linf_distance(other) < 1e-7) return;
  }
  found.push_back(std::move(candidate));
}

}  // namespace

std::vector<MixedProfile> enumerate_admissible_equilibria(const FinalGame& fg) {
  const int n = fg.game.num_strategies(0);
  const auto& a1 = fg.game.flat_payoffs();  // row block first, column second

  std::vector<std::vector<int>> supports = admissible_supports(fg.tri);
  std::vector<MixedProfile> found;

  // Cheap best-reply screen on the dense payoff matrix (supports have at
  // most dimension+1 strategies, so each column sum is a handful of terms);
  // only survivors face the full verification.
  auto screens = [&](const MixedProfile& prof) {
    for (int player = 0; player < 2; ++player) {
      const auto& mine = prof.probs[player];
      const auto& theirs = prof.probs[1 - player];
      double best = -std::numeric_limits<double>::infinity();
      double worst_support = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        double v = 0;
        for (int j = 0; j < n; ++j) {
          if (theirs[j] > 0) v += a1[(std::size_t)i * n + j] * theirs[j];
        }
        best = std::max(best, v);
        if (mine[i] > 1e-9) worst_support = std::min(worst_support, v);
      }
      if (worst_support < best - 1e-8) return false;
    }
    return true;
  };

  for (const auto& sup_p : supports) {
    for (const auto& sup_q : supports) {
      const int np = static_cast<int>(sup_p.size());
      const int nq = static_cast<int>(sup_q.size());
      // Unknowns: q (opponent mixture), p, the two indifference levels.
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(np + nq + 2, np + nq + 2);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(np + nq + 2);
      for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nq; ++j) {
          m(i, j) = a1[(std::size_t)sup_p[i] * n + sup_q[j]];
        }
        m(i, np + nq) = -1.0;
      }
      for (int j = 0; j < nq; ++j) {
        for (int i = 0; i < np; ++i) {
          // Symmetric game: the column player's payoff at (i, j) is the row
          // payoff at (j, i).
          m(np + j, nq + i) = a1[(std::size_t)sup_q[j] * n + sup_p[i]];
        }
        m(np + j, np + nq + 1) = -1.0;
      }
      for (int j = 0; j < nq; ++j) m(np + nq, j) = 1.0;
      for (int i = 0; i < np; ++i) m(np + nq + 1, nq + i) = 1.0;
      b(np + nq) = 1.0;
      b(np + nq + 1) = 1.0;

      Eigen::VectorXd sol = m.fullPivLu().solve(b);
      if ((m * sol - b).lpNorm<Eigen::Infinity>() > 1e-8) continue;
      bool feasible = true;
      for (int k = 0; k < np + nq; ++k) feasible &= sol(k) >= -1e-9;
      if (!feasible) continue;

      MixedProfile prof;
      prof.probs.assign(2, std::vector<double>(n, 0.0));
      for (int i = 0; i < np; ++i) prof.probs[0][sup_p[i]] = sol(nq + i);
      for (int j = 0; j < nq; ++j) prof.probs[1][sup_q[j]] = sol(j);
      prof.normalize();
      if (screens(prof) && is_equilibrium(fg.game, prof, 1e-8).first) {
        keep_if_new(found, std::move(prof));
      }
    }
  }
  return found;
}

bool verify_final_unique(const FinalGame& fg) {
  std::vector<MixedProfile> eqs = enumerate_admissible_equilibria(fg);
  if (eqs.size() != 1) return false;
  std::vector<int> target(2, fg.designated);
  return eqs[0].linf_distance(MixedProfile::pure(fg.game, target)) < 1e-6;
}

bool verify_final_symmetric_unique(const FinalGame& fg) {
  const int n = fg.game.num_strategies(0);
  const auto& a1 = fg.game.flat_payoffs();
  bool designated_found = false;

  for (const auto& sup : admissible_supports(fg.tri)) {
    const int k = static_cast<int>(sup.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        m(i, j) = a1[(std::size_t)sup[i] * n + sup[j]];
      }
      m(i, k) = -1.0;
      m(k, i) = 1.0;
    }
    b(k) = 1.0;
    Eigen::VectorXd sol = m.fullPivLu().solve(b);
    if ((m * sol - b).lpNorm<Eigen::Infinity>() > 1e-8) continue;
    bool feasible = true;
    for (int i = 0; i < k; ++i) feasible &= sol(i) >= -1e-9;
    if (!feasible) continue;

    MixedProfile prof;
    prof.probs.assign(2, std::vector<double>(n, 0.0));
    for (int i = 0; i < k; ++i) {
      prof.probs[0][sup[i]] = sol(i);
      prof.probs[1][sup[i]] = sol(i);
    }
    prof.normalize();
    if (!is_equilibrium(fg.game, prof, 1e-8).first) continue;
    if (prof.probs[0][fg.designated] > 1.0 - 1e-6) {
      designated_found = true;
    } else {
      return false;  // a second symmetric admissible equilibrium
    }
  }
  return designated_found;
}

}  // namespace eqidx
