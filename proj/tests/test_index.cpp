#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "eqidx/constructions.hpp"
#include "eqidx/index.hpp"

using namespace eqidx;

namespace {

Game random_game(std::mt19937_64& rng, std::vector<int> shape) {
  std::uniform_real_distribution<double> pay(-5.0, 5.0);
  std::vector<std::vector<std::string>> labels;
  std::size_t profiles = 1;
  for (std::size_t p = 0; p < shape.size(); ++p) {
    std::vector<std::string> l;
    for (int s = 0; s < shape[p]; ++s) l.push_back(std::to_string(s));
    labels.push_back(std::move(l));
    profiles *= shape[p];
  }
  std::vector<double> flat(shape.size() * profiles);
  for (double& v : flat) v = pay(rng);
  return Game(std::move(labels), std::move(flat));
}

const EquilibriumRecord& find_eq(const std::vector<EquilibriumRecord>& eqs,
                                 const MixedProfile& target) {
  for (const auto& e : eqs) {
    if (e.profile.linf_distance(target) < 1e-7) return e;
  }
  REQUIRE(false);
  return eqs.front();
}

MixedProfile profile2(std::vector<double> a, std::vector<double> b) {
  MixedProfile mp;
  mp.probs = {std::move(a), std::move(b)};
  return mp;
}

}  // namespace

TEST_CASE("battle of the sexes indices: +1, +1, -1") {
  Game g = corpus().at("BoS");
  auto eqs = enumerate_equilibria(g);
  CHECK(index_regular(g, find_eq(eqs, profile2({1, 0}, {1, 0}))) == 1);
  CHECK(index_regular(g, find_eq(eqs, profile2({0, 1}, {0, 1}))) == 1);
  CHECK(index_regular(g, find_eq(eqs, profile2({0.6, 0.4}, {0.4, 0.6}))) == -1);
}

TEST_CASE("triple coordination indices sum to one") {
  Game g = corpus().at("G1");
  auto eqs = enumerate_equilibria(g);
  REQUIRE(eqs.size() == 7);
  int sum = 0;
  int uniform_index = 0;
  for (const auto& e : eqs) {
    int idx = index_regular(g, e);
    sum += idx;
    if (e.profile.linf_distance(MixedProfile::uniform(g)) < 1e-7) {
      uniform_index = idx;
    }
  }
  CHECK(sum == 1);
  CHECK(uniform_index == 1);  // full-support mixture of pure coordination
}

TEST_CASE("indifference jacobian matches central differences") {
  // Displacement rows are payoff differences; differentiate them numerically
  // in the reduced coordinates and compare entrywise.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<int> shape = trial % 3 == 2 ? std::vector<int>{2, 2, 2}
                                            : std::vector<int>{3, 3};
    Game g = random_game(rng, shape);
    auto eqs = enumerate_equilibria(g);
    for (const auto& e : eqs) {
      bool interior = true;
      for (int p = 0; p < g.num_players(); ++p) {
        interior &= (int)e.support[p].size() == g.num_strategies(p);
      }
      if (!interior || !e.is_isolated) continue;
      Eigen::MatrixXd jac = indifference_jacobian(g, e);
      const double h = 1e-6;
      int col = 0;
      for (int m = 0; m < g.num_players(); ++m) {
        for (std::size_t tj = 1; tj < e.support[m].size(); ++tj, ++col) {
          int t = e.support[m][tj];
          int r = e.support[m][0];
          MixedProfile plus = e.profile, minus = e.profile;
          plus.probs[m][t] += h;
          plus.probs[m][r] -= h;
          minus.probs[m][t] -= h;
          minus.probs[m][r] += h;
          int row = 0;
          for (int n = 0; n < g.num_players(); ++n) {
            for (std::size_t sj = 1; sj < e.support[n].size(); ++sj, ++row) {
              int s = e.support[n][sj];
              int rn = e.support[n][0];
              double fp = pure_vs_profile(g, n, s, plus) -
                          pure_vs_profile(g, n, rn, plus);
              double fm = pure_vs_profile(g, n, s, minus) -
                          pure_vs_profile(g, n, rn, minus);
              double numeric = (fp - fm) / (2 * h);
              CHECK(jac(row, col) == doctest::Approx(numeric).epsilon(1e-5));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("nash map fixes exactly the equilibria") {
  Game g = corpus().at("BoS");
  MixedProfile eq = profile2({0.6, 0.4}, {0.4, 0.6});
  CHECK(nash_map(g, eq).linf_distance(eq) < 1e-12);
  MixedProfile off = profile2({0.5, 0.5}, {0.5, 0.5});
  CHECK(nash_map(g, off).linf_distance(off) > 1e-3);
}

TEST_CASE("jacobian sign convention matches the local degree oracle") {
  // Calibration: for regular equilibria of small games (reduced dimension
  // <= 3), sign(det(-D)) must equal the Brouwer degree of the displacement
  // of the Nash map computed combinatorially over a small sphere.
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 60; ++trial) {
    std::vector<int> shape;
    switch (trial % 3) {
      case 0: shape = {2, 2}; break;
      case 1: shape = {3, 2}; break;
      default: shape = {2, 2, 2}; break;
    }
    Game g = random_game(rng, shape);
    auto eqs = enumerate_equilibria(g);
    for (const auto& e : eqs) {
      if (!e.is_isolated || e.jacobian_condition > 1e6) continue;
      int dim = 0;
      for (const auto& s : e.support) dim += (int)s.size() - 1;
      if (dim > 3) continue;
      int via_jacobian = index_regular(g, e);
      int via_degree = local_degree_oracle(g, e, 0.01);
      CHECK(via_jacobian == via_degree);
      ++checked;
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("oracle handles boundary equilibria") {
  Game g = corpus().at("BoS");
  auto eqs = enumerate_equilibria(g);
  const auto& pure = find_eq(eqs, profile2({1, 0}, {1, 0}));
  CHECK(local_degree_oracle(g, pure, 0.01) == 1);
  const auto& mixed = find_eq(eqs, profile2({0.6, 0.4}, {0.4, 0.6}));
  CHECK(local_degree_oracle(g, mixed, 0.01) == -1);
}

TEST_CASE("indices over any game sum to +1") {
  std::mt19937_64 rng(2024);
  int games_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> shape;
    switch (trial % 4) {
      case 0: shape = {2, 2}; break;
      case 1: shape = {3, 3}; break;
      case 2: shape = {2, 3}; break;
      default: shape = {2, 2, 2}; break;
    }
    Game g = random_game(rng, shape);
    auto eqs = enumerate_equilibria(g);
    bool all_regular = std::all_of(
        eqs.begin(), eqs.end(), [](const EquilibriumRecord& e) {
          return e.is_isolated && e.jacobian_condition < 1e6;
        });
    if (!all_regular) continue;  // measure-zero event, skip defensively
    int sum = 0;
    for (const auto& e : eqs) sum += index_regular(g, e);
    CHECK(sum == 1);
    ++games_checked;
  }
  CHECK(games_checked >= 190);
}

TEST_CASE("index is invariant under adding a strictly dominated strategy") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> drop(1.0, 3.0);
  int augmented = 0;
  for (int trial = 0; trial < 40 && augmented < 50; ++trial) {
    Game g = random_game(rng, {3, 3});
    auto eqs = enumerate_equilibria(g);
    double floor = g.min_payoff() - drop(rng);
    for (int victim = 0; victim < 2; ++victim) {
      std::vector<std::vector<std::string>> extra(2);
      extra[victim] = {"junk"};
      Game big = add_strategies(
          g, extra, [&](int, std::span<const int>) { return floor; });
      for (const auto& e : eqs) {
        if (!e.is_isolated || e.jacobian_condition > 1e6) continue;
        EquilibriumRecord lifted = e;
        lifted.profile.probs[victim].push_back(0.0);
        CHECK(index_regular(big, lifted) == index_regular(g, e));
        ++augmented;
      }
    }
  }
  CHECK(augmented >= 50);
}

TEST_CASE("perturbation degree agrees with the jacobian index") {
  Game g = corpus().at("BoS");
  auto eqs = enumerate_equilibria(g);
  IndexOptions opts;
  for (const auto& e : eqs) {
    CHECK(index_isolated(g, e, opts) == index_regular(g, e));
  }
}

TEST_CASE("classify battle of the sexes") {
  ClassifyResult r = classify(corpus().at("BoS"));
  REQUIRE(r.reports.size() == 3);
  int sustainable = 0;
  for (const auto& rep : r.reports) {
    if (rep.is_sustainable) {
      ++sustainable;
      CHECK(rep.index == 1);
    }
  }
  CHECK(sustainable == 2);
  CHECK(r.solution.phi_star.size() == 2);
  // Every equilibrium here is a point component; the two +1 points are the
  // positive components.
  CHECK(r.solution.phi_plus.size() == 2);
}

TEST_CASE("classify a game whose only solution is a component") {
  // 1x2x1 game: the equilibrium set is a segment (player 2 indifferent),
  // one component of index +1, no sustainable isolated point.
  ClassifyResult r = classify(corpus().at("G2"));
  CHECK(r.solution.phi_star.empty());
  REQUIRE(r.solution.phi_plus.size() == 1);
  CHECK(r.solution.phi_plus[0].index == 1);
  for (const auto& rep : r.reports) CHECK_FALSE(rep.is_sustainable);
}

TEST_CASE("classify the three-strategy coordination game") {
  ClassifyResult r = classify(corpus().at("G1"));
  REQUIRE(r.reports.size() == 7);
  CHECK(r.solution.phi_star.size() == 4);  // three pure plus the centroid
  CHECK(r.solution.phi_plus.size() == 4);
  int sum = 0;
  for (const auto& rep : r.reports) sum += rep.index;
  CHECK(sum == 1);
}
