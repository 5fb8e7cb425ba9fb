#include "eqidx/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "eqidx/json_io.hpp"
#include "eqidx/lp.hpp"

namespace eqidx {

namespace {

// Builds a 2-player game from per-cell (u1, u2) pairs, rows = player 1.
Game bimatrix(std::vector<std::string> rows, std::vector<std::string> cols,
              const std::vector<std::vector<std::pair<double, double>>>& cells) {
  std::size_t nr = rows.size(), nc = cols.size();
  std::vector<double> flat(2 * nr * nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      flat[i * nc + j] = cells[i][j].first;
      flat[nr * nc + i * nc + j] = cells[i][j].second;
    }
  }
  return Game({std::move(rows), std::move(cols)}, std::move(flat));
}

// Builds a 3-player game from per-cell (u1, u2, u3) triples indexed
// [s1][s2][s3].
Game trimatrix(
    std::vector<std::string> s1, std::vector<std::string> s2,
    std::vector<std::string> s3,
    const std::vector<std::vector<std::vector<std::array<double, 3>>>>& cells) {
  std::size_t n1 = s1.size(), n2 = s2.size(), n3 = s3.size();
  std::size_t profiles = n1 * n2 * n3;
  std::vector<double> flat(3 * profiles);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t k = 0; k < n3; ++k) {
        std::size_t p = (i * n2 + j) * n3 + k;
        for (int player = 0; player < 3; ++player) {
          flat[player * profiles + p] = cells[i][j][k][player];
        }
      }
    }
  }
  return Game({std::move(s1), std::move(s2), std::move(s3)}, std::move(flat));
}

std::map<std::string, Game> build_corpus() {
  std::map<std::string, Game> games;

  games.emplace("BoS", bimatrix({"t", "b"}, {"l", "r"},
                                {{{3, 2}, {0, 0}}, {{0, 0}, {2, 3}}}));

  games.emplace("G-hat",
                bimatrix({"t", "b", "x"}, {"l", "r", "y"},
                         {{{3, 2}, {0, 0}, {0, 1}},
                          {{0, 0}, {2, 3}, {-2, 4}},
                          {{1, 0}, {4, -2}, {-1, -1}}}));

  games.emplace("G1", bimatrix({"t", "m", "b"}, {"l", "m", "r"},
                               {{{10, 10}, {0, 0}, {0, 0}},
                                {{0, 0}, {10, 10}, {0, 0}},
                                {{0, 0}, {0, 0}, {10, 10}}}));

  games.emplace(
      "G1-hat",
      bimatrix({"t", "m", "b"}, {"l", "m", "r", "x", "y", "z"},
               {{{10, 10}, {0, 0}, {0, 0}, {0, 11}, {10, 5}, {0, -10}},
                {{0, 0}, {10, 10}, {0, 0}, {0, -10}, {0, 11}, {10, 5}},
                {{0, 0}, {0, 0}, {10, 10}, {10, 5}, {0, -10}, {0, 11}}}));

  games.emplace("coordination",
                bimatrix({"L", "R"}, {"L", "R"},
                         {{{1, 1}, {0, 0}}, {{0, 0}, {1, 1}}}));

  games.emplace("sec4-corner",
                bimatrix({"t", "b"}, {"l", "r"},
                         {{{1, 1}, {0, 0}}, {{0, 0}, {0, 0}}}));

  games.emplace(
      "sec4-three-player",
      trimatrix(
          {"Tt", "Tb", "B"}, {"Ll", "Lr", "R"}, {"W", "Ew", "Ee"},
          {// Tt
           {{{{6, 6, 1}}, {{-3, 0, 4}}, {{1, 4, 0}}},    // Ll
            {{{0, 0, 1}}, {{1, 4, 0}}, {{1, 4, 0}}},     // Lr
            {{{3, 3, 0}}, {{1, 0, 1}}, {{3, 0, 1}}}},    // R
           // Tb
           {{{{0, 0, 1}}, {{1, 4, 0}}, {{1, 4, 0}}},     // Ll
            {{{6, 6, 1}}, {{1, 4, 0}}, {{-3, 0, 4}}},    // Lr
            {{{3, 3, 0}}, {{1, 0, 1}}, {{3, 0, 1}}}},    // R
           // B
           {{{{3, 0, 1}}, {{3, 0, 0}}, {{3, 0, 0}}},     // Ll
            {{{3, 0, 1}}, {{3, 0, 0}}, {{3, 0, 0}}},     // Lr
            {{{0, 3, 1}}, {{0, 3, 0}}, {{0, 3, 0}}}}})); // R

  games.emplace("brandt-fischer",
                trimatrix({"T", "B"}, {"L", "R"}, {"W", "E"},
                          {{{{{1, 1, 1}}, {{0, 1, 1}}},
                            {{{1, 1, 0}}, {{1, 0, 1}}}},
                           {{{{1, 0, 1}}, {{1, 0, 0}}},
                            {{{0, 1, 1}}, {{0, 1, 0}}}}}));

  games.emplace("G2", trimatrix({"T"}, {"L", "R"}, {"W"},
                                {{{{{1, 1, 1}}}, {{{0, 1, 0}}}}}));

  games.emplace(
      "G3",
      trimatrix({"A", "B", "C", "D", "E"}, {"L", "M", "R"}, {"W", "O"},
                {// A
                 {{{{0, 3, 3}}, {{0, 3, 3}}},
                  {{{0, 3, 3}}, {{0, 3, 3}}},
                  {{{3, 0, 3}}, {{3, 0, 0}}}},
                 // B
                 {{{{3, 3, 0}}, {{3, 0, 3}}},
                  {{{3, 3, 0}}, {{3, 0, 3}}},
                  {{{3, 3, 3}}, {{0, 3, 3}}}},
                 // C
                 {{{{6, 6, 3}}, {{6, 6, 0}}},
                  {{{2, 2, 3}}, {{2, 2, 0}}},
                  {{{0, 7, 3}}, {{0, 7, 0}}}},
                 // D
                 {{{{2, 2, 3}}, {{2, 2, 0}}},
                  {{{6, 6, 3}}, {{6, 6, 0}}},
                  {{{0, 0, 3}}, {{0, 0, 0}}}},
                 // E
                 {{{{0, 0, 3}}, {{0, 0, 0}}},
                  {{{7, 0, 3}}, {{7, 0, 0}}},
                  {{{1, 1, 3}}, {{1, 1, 0}}}}}));

  return games;
}

// Strict dominance of `target` by a mixture of `candidates` against every
// pure opponent profile, certified by maximizing the worst margin.
bool strictly_dominated(const Game& game, int player, int target,
                        const std::vector<std::vector<int>>& remaining,
                        double tol) {
  std::vector<int> cands;
  for (int s : remaining[player]) {
    if (s != target) cands.push_back(s);
  }
  if (cands.empty()) return false;

  // Opponent profiles over remaining strategies.
  std::vector<std::vector<int>> opp_profiles;
  std::vector<int> prof(game.num_players(), 0);
  std::vector<std::size_t> cursor(game.num_players(), 0);
  while (true) {
    for (int p = 0; p < game.num_players(); ++p) {
      prof[p] = remaining[p][cursor[p]];
    }
    opp_profiles.push_back(prof);
    int p = game.num_players() - 1;
    while (p >= 0) {
      if (p != player && ++cursor[p] < remaining[p].size()) break;
      cursor[p] = 0;
      --p;
    }
    if (p < 0) break;
  }

  const int k = static_cast<int>(cands.size());
  std::vector<double> c(k + 1, 0.0);
  c[k] = 1.0;  // maximize the margin
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  for (auto p : opp_profiles) {
    std::vector<double> row(k + 1, 0.0);
    p[player] = target;
    double target_pay = game.payoff(player, p);
    for (int i = 0; i < k; ++i) {
      p[player] = cands[i];
      row[i] = -game.payoff(player, p);  // margin - sum w_i pay_i <= -target
    }
    row[k] = 1.0;
    a_ub.push_back(std::move(row));
    b_ub.push_back(-target_pay);
  }
  std::vector<std::vector<double>> a_eq(1, std::vector<double>(k + 1, 1.0));
  a_eq[0][k] = 0.0;
  std::vector<double> b_eq{1.0};
  LpResult lp = solve_lp(c, a_ub, b_ub, a_eq, b_eq);
  return lp.status == LpResult::Status::kOptimal && lp.objective > tol;
}

}  // namespace

const std::map<std::string, Game>& corpus() {
  static const std::map<std::string, Game> games = build_corpus();
  return games;
}

void write_corpus(const std::string& dir) {
  for (const auto& [name, game] : corpus()) {
    save_game_file(game, dir + "/" + name + ".json");
  }
}

IteratedDominanceResult iterated_strict_dominance(const Game& game,
                                                  double tol) {
  std::vector<std::vector<int>> remaining(game.num_players());
  for (int p = 0; p < game.num_players(); ++p) {
    remaining[p].resize(game.num_strategies(p));
    std::iota(remaining[p].begin(), remaining[p].end(), 0);
  }
  IteratedDominanceResult out{game, {}};
  while (true) {
    std::vector<EliminationStep> round;
    std::vector<std::vector<int>> next = remaining;
    for (int p = 0; p < game.num_players(); ++p) {
      for (int s : remaining[p]) {
        if (strictly_dominated(game, p, s, remaining, tol)) {
          round.push_back({p, game.strategy_labels()[p][s]});
          next[p].erase(std::find(next[p].begin(), next[p].end(), s));
        }
      }
    }
    if (round.empty()) break;
    out.rounds.push_back(std::move(round));
    remaining = std::move(next);
  }
  out.reduced = restrict_game(game, remaining);
  return out;
}

EmbeddingReport embed_strict_dominators(const Game& game,
                                        const std::vector<int>& pure_eq,
                                        double tol) {
  const int np = game.num_players();
  // Strictness margin of the equilibrium.
  double margin = std::numeric_limits<double>::infinity();
  MixedProfile eq_profile = MixedProfile::pure(game, pure_eq);
  for (int n = 0; n < np; ++n) {
    double own = pure_vs_profile(game, n, pure_eq[n], eq_profile);
    for (int s = 0; s < game.num_strategies(n); ++s) {
      if (s == pure_eq[n]) continue;
      margin = std::min(margin, own - pure_vs_profile(game, n, s, eq_profile));
    }
  }
  if (margin <= tol && margin != std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument(
        "embed_strict_dominators requires a strict pure equilibrium");
  }

  EmbeddingReport report;
  report.original = GameEquilibriumPair{game, eq_profile};

  bool trivial = true;
  for (int n = 0; n < np; ++n) trivial &= game.num_strategies(n) == 1;
  if (trivial) {
    report.embedded = game;
    report.added_labels.assign(np, {});
    report.lifted_equilibrium = eq_profile;
    report.unique_verified = verify_unique(game, eq_profile);
    report.equivalence_verified = true;
    return report;
  }

  const double eps =
      std::min(1.0, margin == std::numeric_limits<double>::infinity()
                        ? 1.0
                        : margin / 2.0);
  const double big =
      std::max(std::abs(game.min_payoff()), std::abs(game.max_payoff())) + 1.0;

  std::vector<std::vector<std::string>> added(np);
  for (int n = 0; n < np; ++n) added[n] = {"x" + std::to_string(n + 1)};

  auto eq_value = [&](int n) { return game.payoff(n, pure_eq); };
  auto fill = [&](int player, std::span<const int> prof) -> double {
    const int dominator = game.num_strategies(player);  // x_n's index
    bool opponents_settled = true;  // all opponents on s*_m or x_m
    for (int m = 0; m < np; ++m) {
      if (m == player) continue;
      if (prof[m] != pure_eq[m] && prof[m] != game.num_strategies(m)) {
        opponents_settled = false;
      }
    }
    if (prof[player] == dominator) {
      return opponents_settled ? eq_value(player) - eps : big + 1.0;
    }
    // Old strategy against a profile that uses someone's dominator.
    return prof[player] == pure_eq[player] ? eq_value(player) : -(big + 1.0);
  };

  report.embedded = add_strategies(game, added, fill);
  report.added_labels = added;
  report.lifted_equilibrium = MixedProfile::pure(report.embedded, pure_eq);

  IteratedDominanceResult dom = iterated_strict_dominance(report.embedded, tol);
  bool dominance_unique = true;
  for (int n = 0; n < np; ++n) {
    dominance_unique &= dom.reduced.num_strategies(n) == 1;
    dominance_unique &=
        dom.reduced.strategy_labels()[n][0] ==
        game.strategy_labels()[n][pure_eq[n]];
  }
  report.unique_verified =
      dominance_unique && verify_unique(report.embedded,
                                        report.lifted_equilibrium);
  report.equivalence_verified = pairs_equivalent(
      report.original,
      GameEquilibriumPair{report.embedded, report.lifted_equilibrium}, tol);
  return report;
}

bool verify_unique(const Game& game, const MixedProfile& expected,
                   const EnumerateOptions& opts) {
  std::vector<EquilibriumRecord> eqs = enumerate_equilibria(game, opts);
  return eqs.size() == 1 && eqs[0].profile.linf_distance(expected) < 1e-6;
}

}  // namespace eqidx
