#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eqidx {

// N-player finite normal-form game. Payoffs are stored in a dense flat
// array, player-major, profiles row-major with the last player's strategy
// index varying fastest.
class Game {
 public:
  Game() = default;  // empty zero-player game
  Game(std::vector<std::vector<std::string>> strategy_labels,
       std::vector<double> payoffs);

  int num_players() const { return static_cast<int>(labels_.size()); }
  int num_strategies(int player) const {
    return static_cast<int>(labels_[player].size());
  }
  std::size_t num_profiles() const { return num_profiles_; }
  const std::vector<std::vector<std::string>>& strategy_labels() const {
    return labels_;
  }
  const std::vector<double>& flat_payoffs() const { return payoffs_; }

  std::size_t profile_index(std::span<const int> profile) const;
  double payoff(int player, std::span<const int> profile) const;
  double& payoff(int player, std::span<const int> profile);

  // Smallest and largest payoff entries.
  double min_payoff() const;
  double max_payoff() const;
  double payoff_range() const { return max_payoff() - min_payoff(); }

  // Index of a strategy by label, -1 if absent.
  int strategy_index(int player, const std::string& label) const;

  bool same_shape(const Game& other) const;

 private:
  std::vector<std::vector<std::string>> labels_;
  std::vector<double> payoffs_;
  std::vector<std::size_t> strides_;  // per-player profile strides
  std::size_t num_profiles_ = 1;
};

// One probability vector per player over that player's pure strategies.
struct MixedProfile {
  std::vector<std::vector<double>> probs;

  static MixedProfile pure(const Game& game, std::span<const int> profile);
  static MixedProfile uniform(const Game& game);

  bool matches(const Game& game) const;
  // Clamps negatives to zero and rescales each player's vector to sum 1.
  void normalize();
  // Largest l-inf coordinate distance across players.
  double linf_distance(const MixedProfile& other) const;
  // Strategies with probability above the threshold, per player.
  std::vector<std::vector<int>> support(double threshold = 1e-9) const;
};

// Per-player, per-own-strategy payoff shifts (Def. of the bonus game).
struct BonusVector {
  std::vector<std::vector<double>> shift;

  static BonusVector zero(const Game& game);
  bool matches(const Game& game) const;
};

struct GameEquilibriumPair {
  Game game;
  MixedProfile equilibrium;
};

// Multilinear extension of the payoff function.
double expected_payoff(const Game& game, const MixedProfile& profile,
                       int player);

// Expected payoff to `player` of pure strategy `pure` against the opponents'
// mixtures in `others` (others.probs[player] is ignored).
double pure_vs_profile(const Game& game, int player, int pure,
                       const MixedProfile& others);

// As above but with a second player also pinned to a pure strategy.
// Used by the analytic indifference Jacobian.
double pure_pair_vs_profile(const Game& game, int player, int pure,
                            int pinned_player, int pinned_pure,
                            const MixedProfile& others);

// G (+) h: shifts player n's payoff at profile s by h[n][s_n].
Game bonus_apply(const Game& game, const BonusVector& h);

// Enlarges the game with new strategies. `fill` is consulted for every
// profile of the enlarged game that uses at least one new strategy
// (indices are in the enlarged game, old strategies keep their positions).
Game add_strategies(
    const Game& game, const std::vector<std::vector<std::string>>& new_labels,
    const std::function<double(int player, std::span<const int>)>& fill);

// Restriction of the game to the given per-player strategy subsets.
Game restrict_game(const Game& game, const std::vector<std::vector<int>>& keep);

// Deletes every pure strategy whose payoff against the equilibrium falls
// short of the best-reply value by more than tol (single pass; support
// strategies are always retained).
GameEquilibriumPair delete_inferior_replies(const GameEquilibriumPair& pair,
                                            double tol = 1e-9);

// True iff the two pairs reduce (by deleting inferior replies) to the same
// game-equilibrium pair under some relabelling of players and strategies,
// with payoffs compared at tolerance tol. Exhaustive search; desk scale.
bool pairs_equivalent(const GameEquilibriumPair& p1,
                      const GameEquilibriumPair& p2, double tol = 1e-9);

}  // namespace eqidx
