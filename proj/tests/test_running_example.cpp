#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "eqidx/equilibria.hpp"
#include "eqidx/running_example.hpp"

using namespace eqidx;

namespace {

// Root of x - f(x) inside [a, b] by bisection (requires a sign change).
double bisect_fixed_point(double (*f)(double), double a, double b) {
  auto d = [&](double x) { return x - f(x); };
  REQUIRE(d(a) * d(b) <= 0);
  for (int it = 0; it < 200; ++it) {
    double m = (a + b) / 2;
    if (d(a) * d(m) <= 0) {
      b = m;
    } else {
      a = m;
    }
  }
  return (a + b) / 2;
}

// Sign change of x - f(x) around an interior fixed point (+1 for - to +,
// -1 for + to -); at the endpoints only the inward side is consulted.
int one_d_index(double (*f)(double), double x) {
  const double h = 1e-4;
  double left = x > h ? (x - h) - f(x - h) : -1.0;
  double right = x < 1 - h ? (x + h) - f(x + h) : 1.0;
  REQUIRE(left * right < 0);
  return right > 0 ? 1 : -1;
}

}  // namespace

TEST_CASE("symmetric map: fixed points and their one-dimensional indices") {
  CHECK(std::abs(f_sym(0.0) - 0.0) < 1e-15);
  CHECK(std::abs(f_sym(0.5) - 0.5) < 1e-15);
  CHECK(std::abs(f_sym(1.0) - 1.0) < 1e-15);
  CHECK(f_sym(0.25) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

  // Bisection confirms the three fixed points to 1e-9 and finds no others.
  CHECK(std::abs(bisect_fixed_point(f_sym, 0.2, 0.8) - 0.5) < 1e-9);
  for (int k = 0; k < 1000; ++k) {
    double x = (k + 0.5) / 1000.0;
    if (std::min({std::abs(x), std::abs(x - 0.5), std::abs(x - 1.0)}) > 1e-2) {
      CHECK(std::abs(x - f_sym(x)) > 1e-6);
    }
  }

  CHECK(one_d_index(f_sym, 0.0) == 1);
  CHECK(one_d_index(f_sym, 0.5) == -1);
  CHECK(one_d_index(f_sym, 1.0) == 1);
}

TEST_CASE("modified map: value, agreement with f on [3/4,1], only root 1") {
  CHECK(f0_sym(0.0) == doctest::Approx(7.0 / 8.0).epsilon(1e-15));
  for (int k = 0; k <= 100; ++k) {
    double x = 0.75 + 0.25 * k / 100.0;
    CHECK(std::abs(f0_sym(x) - f_sym(x)) < 1e-12);
  }
  // Grid scan: x stays strictly below f0(x) on [0,1), so the only fixed
  // point is x = 1 (where the map is tangent to the diagonal, hence the
  // looser bisection tolerance).
  for (int k = 0; k < 10000; ++k) {
    double x = k / 10000.0;
    CHECK(x - f0_sym(x) < 0.0);
  }
  CHECK(f0_sym(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(bisect_fixed_point(f0_sym, 0.9, 1.0) - 1.0) < 1e-6);
}

TEST_CASE("bonus pair: nonnegative, vanishing tail, left value at zero") {
  const double delta = 0.01;
  for (int k = 0; k <= 1000; ++k) {
    double x = k / 1000.0;
    auto g = g_sym(x, delta);
    CHECK(g[0] >= 0.0);
    CHECK(g[1] == 0.0);
    if (x >= 0.75) CHECK(g[0] == 0.0);
  }
  CHECK(g_sym(0.0, delta)[0] == doctest::Approx(1.0 + delta).epsilon(1e-15));
  CHECK(v_sym(0.25) == doctest::Approx(0.75));
  CHECK(v_sym(0.75) == doctest::Approx(0.75));
  CHECK(beta3_sym(0.7) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("auxiliary bonus examples") {
  CHECK(gamma_sym(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(gamma_sym(1.0, 7.0 / 8.0) == doctest::Approx(0.0));
  CHECK(gamma_sym(0.5, 1.0) == doctest::Approx(-1.0 / 14.0).epsilon(1e-12));
  CHECK(gamma_sym(0.0, 0.3) == 0.0);
}

TEST_CASE("bonus-perturbed symmetric game has x = 1 as its only equilibrium") {
  CHECK(verify_perturbed_unique(0.1));
  CHECK(verify_perturbed_unique(0.01));
  // Without the bonus both x = 0 and x = 1/2 survive.
  CHECK_FALSE(verify_perturbed_unique(0.1, false));
  CHECK_THROWS(verify_perturbed_unique(0.0));
  CHECK_THROWS(verify_perturbed_unique(0.3));
}

TEST_CASE("final game: structure and witness") {
  FinalGame fg = build_final_game();
  const int n = fg.game.num_strategies(0);
  CHECK(n == (int)fg.tri.vertices.size());
  CHECK(fg.game.num_players() == 2);
  CHECK(fg.game.num_strategies(1) == n);
  REQUIRE(fg.designated >= 0);
  CHECK(fg.coords[fg.designated][0] == doctest::Approx(1.0));
  CHECK(fg.coords[fg.designated][1] == doctest::Approx(0.0));

  // The convex penalty witness vanishes exactly on the theta = 0 edge.
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    if (fg.coords[i][1] < 1e-9) {
      ++zeros;
      CHECK(std::abs(fg.rho.values[i]) < 1e-12);
    } else {
      CHECK(fg.rho.values[i] > 0.0);
    }
  }
  CHECK(zeros == 2);

  // Simplices touching the theta = 1 face stay below the zeta diameter.
  for (const auto& s : fg.tri.simplices) {
    bool top = false;
    double diam = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      top |= fg.coords[s[i]][1] > 1.0 - 1e-9;
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        diam = std::max(diam, std::hypot(fg.coords[s[i]][0] - fg.coords[s[j]][0],
                                         fg.coords[s[i]][1] - fg.coords[s[j]][1]));
      }
    }
    if (top) CHECK(diam < fg.options.zeta);
  }
}

TEST_CASE("final game embeds the coordination game on the theta = 0 corners") {
  FinalGame fg = build_final_game();
  int left = -1;
  for (int i = 0; i < (int)fg.coords.size(); ++i) {
    if (fg.coords[i][1] < 1e-9 && fg.coords[i][0] < 0.5) left = i;
  }
  REQUIRE(left >= 0);
  int right = fg.designated;
  auto pay = [&](int i, int j) {
    std::vector<int> prof{i, j};
    return fg.game.payoff(0, prof);
  };
  CHECK(pay(left, left) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pay(right, right) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pay(left, right) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pay(right, left) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("final game: designated vertex is its unique admissible equilibrium") {
  FinalGame fg = build_final_game();
  std::vector<MixedProfile> eqs = enumerate_admissible_equilibria(fg);
  REQUIRE(eqs.size() == 1);
  // Every enumerated equilibrium's support spans a simplex.
  std::set<std::vector<int>> faces;
  for (const auto& s : fg.tri.simplices) faces.insert(s);
  for (const auto& eq : eqs) {
    for (const auto& sup : eq.support()) {
      bool spans = false;
      for (const auto& s : fg.tri.simplices) {
        spans |= std::includes(s.begin(), s.end(), sup.begin(), sup.end());
      }
      CHECK(spans);
    }
  }
  CHECK(verify_final_unique(fg));
  CHECK(verify_final_symmetric_unique(fg));
}

TEST_CASE("final game: penalty-free variant still unique on the symmetric scan") {
  FinalGameOptions opts;
  opts.delta = 0.0;
  FinalGame fg = build_final_game(opts);
  CHECK(verify_final_symmetric_unique(fg));
}

TEST_CASE("final game: dropping the auxiliary bonus breaks uniqueness") {
  FinalGameOptions opts;
  opts.with_gamma = false;
  FinalGame fg = build_final_game(opts);
  CHECK_FALSE(verify_final_unique(fg));
}

TEST_CASE("final game: bad parameters are refused") {
  FinalGameOptions opts;
  opts.zeta = 0.5;  // violates zeta < 1/3
  CHECK_THROWS(build_final_game(opts));
  opts = {};
  opts.bonus_delta = 0.3;
  CHECK_THROWS(build_final_game(opts));
}
