#include "eqidx/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eqidx {

namespace {

// Iterates over all pure profiles of the game, invoking fn(profile).
template <typename Fn>
void for_each_profile(const Game& game, Fn&& fn) {
  const int n = game.num_players();
  std::vector<int> profile(n, 0);
  while (true) {
    fn(std::span<const int>(profile));
    int p = n - 1;
    while (p >= 0) {
      if (++profile[p] < game.num_strategies(p)) break;
      profile[p] = 0;
      --p;
    }
    if (p < 0) break;
  }
}

}  // namespace

Game::Game(std::vector<std::vector<std::string>> strategy_labels,
           std::vector<double> payoffs)
    : labels_(std::move(strategy_labels)), payoffs_(std::move(payoffs)) {
  if (labels_.size() < 2) {
    throw std::invalid_argument("game needs at least 2 players");
  }
  for (const auto& ls : labels_) {
    if (ls.empty()) {
      throw std::invalid_argument("every player needs at least one strategy");
    }
  }
  strides_.assign(labels_.size(), 1);
  for (int p = static_cast<int>(labels_.size()) - 2; p >= 0; --p) {
    strides_[p] = strides_[p + 1] * labels_[p + 1].size();
  }
  num_profiles_ = strides_[0] * labels_[0].size();
  if (payoffs_.size() != num_profiles_ * labels_.size()) {
    throw std::invalid_argument("payoff tensor size mismatch");
  }
  for (double v : payoffs_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("payoffs must be finite");
    }
  }
}

std::size_t Game::profile_index(std::span<const int> profile) const {
  if (profile.size() != labels_.size()) {
    throw std::invalid_argument("profile length mismatch");
  }
  std::size_t idx = 0;
  for (std::size_t p = 0; p < profile.size(); ++p) {
    if (profile[p] < 0 || profile[p] >= static_cast<int>(labels_[p].size())) {
      throw std::invalid_argument("strategy index out of range");
    }
    idx += strides_[p] * static_cast<std::size_t>(profile[p]);
  }
  return idx;
}

double Game::payoff(int player, std::span<const int> profile) const {
  return payoffs_[static_cast<std::size_t>(player) * num_profiles_ +
                  profile_index(profile)];
}

double& Game::payoff(int player, std::span<const int> profile) {
  return payoffs_[static_cast<std::size_t>(player) * num_profiles_ +
                  profile_index(profile)];
}

double Game::min_payoff() const {
  return *std::min_element(payoffs_.begin(), payoffs_.end());
}

double Game::max_payoff() const {
  return *std::max_element(payoffs_.begin(), payoffs_.end());
}

int Game::strategy_index(int player, const std::string& label) const {
  const auto& ls = labels_[player];
  auto it = std::find(ls.begin(), ls.end(), label);
  return it == ls.end() ? -1 : static_cast<int>(it - ls.begin());
}

bool Game::same_shape(const Game& other) const {
  if (num_players() != other.num_players()) return false;
  for (int p = 0; p < num_players(); ++p) {
    if (num_strategies(p) != other.num_strategies(p)) return false;
  }
  return true;
}

MixedProfile MixedProfile::pure(const Game& game, std::span<const int> profile) {
  MixedProfile out;
  out.probs.resize(game.num_players());
  for (int p = 0; p < game.num_players(); ++p) {
    out.probs[p].assign(game.num_strategies(p), 0.0);
    out.probs[p].at(profile[p]) = 1.0;
  }
  return out;
}

MixedProfile MixedProfile::uniform(const Game& game) {
  MixedProfile out;
  out.probs.resize(game.num_players());
  for (int p = 0; p < game.num_players(); ++p) {
    out.probs[p].assign(game.num_strategies(p),
                        1.0 / game.num_strategies(p));
  }
  return out;
}

bool MixedProfile::matches(const Game& game) const {
  if (static_cast<int>(probs.size()) != game.num_players()) return false;
  for (int p = 0; p < game.num_players(); ++p) {
    if (static_cast<int>(probs[p].size()) != game.num_strategies(p)) {
      return false;
    }
  }
  return true;
}

void MixedProfile::normalize() {
  for (auto& v : probs) {
    double sum = 0.0;
    for (double& x : v) {
      if (x < 0.0) x = 0.0;
      sum += x;
    }
    if (sum <= 0.0) throw std::invalid_argument("degenerate mixture");
    for (double& x : v) x /= sum;
  }
}

double MixedProfile::linf_distance(const MixedProfile& other) const {
  double d = 0.0;
  for (std::size_t p = 0; p < probs.size(); ++p) {
    for (std::size_t s = 0; s < probs[p].size(); ++s) {
      d = std::max(d, std::abs(probs[p][s] - other.probs[p][s]));
    }
  }
  return d;
}

std::vector<std::vector<int>> MixedProfile::support(double threshold) const {
  std::vector<std::vector<int>> out(probs.size());
  for (std::size_t p = 0; p < probs.size(); ++p) {
    for (std::size_t s = 0; s < probs[p].size(); ++s) {
      if (probs[p][s] > threshold) out[p].push_back(static_cast<int>(s));
    }
  }
  return out;
}

BonusVector BonusVector::zero(const Game& game) {
  BonusVector h;
  h.shift.resize(game.num_players());
  for (int p = 0; p < game.num_players(); ++p) {
    h.shift[p].assign(game.num_strategies(p), 0.0);
  }
  return h;
}

bool BonusVector::matches(const Game& game) const {
  if (static_cast<int>(shift.size()) != game.num_players()) return false;
  for (int p = 0; p < game.num_players(); ++p) {
    if (static_cast<int>(shift[p].size()) != game.num_strategies(p)) {
      return false;
    }
  }
  return true;
}

double expected_payoff(const Game& game, const MixedProfile& profile,
                       int player) {
  if (!profile.matches(game)) {
    throw std::invalid_argument("profile dimensions do not match game");
  }
  double total = 0.0;
  for_each_profile(game, [&](std::span<const int> s) {
    double w = 1.0;
    for (int p = 0; p < game.num_players() && w != 0.0; ++p) {
      w *= profile.probs[p][s[p]];
    }
    if (w != 0.0) total += w * game.payoff(player, s);
  });
  return total;
}

double pure_vs_profile(const Game& game, int player, int pure,
                       const MixedProfile& others) {
  return pure_pair_vs_profile(game, player, pure, -1, -1, others);
}

double pure_pair_vs_profile(const Game& game, int player, int pure,
                            int pinned_player, int pinned_pure,
                            const MixedProfile& others) {
  if (!others.matches(game)) {
    throw std::invalid_argument("profile dimensions do not match game");
  }
  if (pure < 0 || pure >= game.num_strategies(player)) {
    throw std::invalid_argument("pure strategy out of range");
  }
  double total = 0.0;
  for_each_profile(game, [&](std::span<const int> s) {
    if (s[player] != pure) return;
    if (pinned_player >= 0 && s[pinned_player] != pinned_pure) return;
    double w = 1.0;
    for (int p = 0; p < game.num_players() && w != 0.0; ++p) {
      if (p == player || p == pinned_player) continue;
      w *= others.probs[p][s[p]];
    }
    if (w != 0.0) total += w * game.payoff(player, s);
  });
  return total;
}

Game bonus_apply(const Game& game, const BonusVector& h) {
  if (!h.matches(game)) {
    throw std::invalid_argument("bonus vector shape mismatch");
  }
  Game out = game;
  for_each_profile(game, [&](std::span<const int> s) {
    for (int p = 0; p < game.num_players(); ++p) {
      out.payoff(p, s) += h.shift[p][s[p]];
    }
  });
  return out;
}

Game add_strategies(
    const Game& game, const std::vector<std::vector<std::string>>& new_labels,
    const std::function<double(int player, std::span<const int>)>& fill) {
  if (static_cast<int>(new_labels.size()) != game.num_players()) {
    throw std::invalid_argument("new label list shape mismatch");
  }
  std::vector<std::vector<std::string>> labels = game.strategy_labels();
  for (int p = 0; p < game.num_players(); ++p) {
    labels[p].insert(labels[p].end(), new_labels[p].begin(),
                     new_labels[p].end());
  }
  std::vector<std::size_t> count(labels.size());
  std::size_t profiles = 1;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    count[p] = labels[p].size();
    profiles *= count[p];
  }
  Game out(labels, std::vector<double>(profiles * labels.size(), 0.0));
  for_each_profile(out, [&](std::span<const int> s) {
    bool all_old = true;
    for (int p = 0; p < out.num_players(); ++p) {
      if (s[p] >= game.num_strategies(p)) all_old = false;
    }
    for (int p = 0; p < out.num_players(); ++p) {
      out.payoff(p, s) = all_old ? game.payoff(p, s) : fill(p, s);
    }
  });
  return out;
}

Game restrict_game(const Game& game,
                   const std::vector<std::vector<int>>& keep) {
  if (static_cast<int>(keep.size()) != game.num_players()) {
    throw std::invalid_argument("keep list shape mismatch");
  }
  std::vector<std::vector<std::string>> labels(game.num_players());
  for (int p = 0; p < game.num_players(); ++p) {
    if (keep[p].empty()) {
      throw std::invalid_argument("cannot delete all of a player's strategies");
    }
    for (int s : keep[p]) labels[p].push_back(game.strategy_labels()[p][s]);
  }
  std::vector<std::size_t> count(labels.size());
  std::size_t profiles = 1;
  for (std::size_t p = 0; p < labels.size(); ++p) profiles *= labels[p].size();
  Game out(labels, std::vector<double>(profiles * labels.size(), 0.0));
  std::vector<int> orig(game.num_players());
  for_each_profile(out, [&](std::span<const int> s) {
    for (int p = 0; p < out.num_players(); ++p) orig[p] = keep[p][s[p]];
    for (int p = 0; p < out.num_players(); ++p) {
      out.payoff(p, s) = game.payoff(p, std::span<const int>(orig));
    }
  });
  return out;
}

GameEquilibriumPair delete_inferior_replies(const GameEquilibriumPair& pair,
                                            double tol) {
  const Game& g = pair.game;
  std::vector<std::vector<int>> keep(g.num_players());
  for (int p = 0; p < g.num_players(); ++p) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(g.num_strategies(p));
    for (int s = 0; s < g.num_strategies(p); ++s) {
      vals[s] = pure_vs_profile(g, p, s, pair.equilibrium);
      best = std::max(best, vals[s]);
    }
    for (int s = 0; s < g.num_strategies(p); ++s) {
      if (vals[s] >= best - tol || pair.equilibrium.probs[p][s] > 1e-12) {
        keep[p].push_back(s);
      }
    }
  }
  GameEquilibriumPair out{restrict_game(g, keep), MixedProfile{}};
  out.equilibrium.probs.resize(g.num_players());
  for (int p = 0; p < g.num_players(); ++p) {
    for (int s : keep[p]) {
      out.equilibrium.probs[p].push_back(pair.equilibrium.probs[p][s]);
    }
  }
  out.equilibrium.normalize();
  return out;
}

namespace {

bool tensors_match(const Game& a, const Game& b,
                   const std::vector<int>& player_map,
                   const std::vector<std::vector<int>>& strat_map, double tol) {
  // player_map[p] = player of b corresponding to player p of a;
  // strat_map[p][s] = strategy of b's player player_map[p] for a's (p, s).
  const int n = a.num_players();
  std::vector<int> sb(n);
  bool ok = true;
  std::vector<int> sa(n, 0);
  while (ok) {
    for (int p = 0; p < n; ++p) sb[player_map[p]] = strat_map[p][sa[p]];
    for (int p = 0; p < n; ++p) {
      if (std::abs(a.payoff(p, sa) - b.payoff(player_map[p], sb)) > tol) {
        ok = false;
        break;
      }
    }
    int p = n - 1;
    while (p >= 0) {
      if (++sa[p] < a.num_strategies(p)) break;
      sa[p] = 0;
      --p;
    }
    if (p < 0) break;
  }
  return ok;
}

bool match_strategies(const GameEquilibriumPair& a,
                      const GameEquilibriumPair& b,
                      const std::vector<int>& player_map, int player,
                      std::vector<std::vector<int>>& strat_map, double tol) {
  const int n = a.game.num_players();
  if (player == n) {
    return tensors_match(a.game, b.game, player_map, strat_map, tol);
  }
  const int q = player_map[player];
  const int k = a.game.num_strategies(player);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end());
  do {
    bool ok = true;
    for (int s = 0; s < k && ok; ++s) {
      if (std::abs(a.equilibrium.probs[player][s] -
                   b.equilibrium.probs[q][perm[s]]) > tol) {
        ok = false;
      }
    }
    if (!ok) continue;
    strat_map[player] = perm;
    if (match_strategies(a, b, player_map, player + 1, strat_map, tol)) {
      return true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

bool pairs_equivalent(const GameEquilibriumPair& p1,
                      const GameEquilibriumPair& p2, double tol) {
  GameEquilibriumPair a = delete_inferior_replies(p1, tol);
  GameEquilibriumPair b = delete_inferior_replies(p2, tol);
  const int n = a.game.num_players();
  if (n != b.game.num_players()) return false;
  std::vector<int> player_map(n);
  std::iota(player_map.begin(), player_map.end(), 0);
  std::sort(player_map.begin(), player_map.end());
  do {
    bool shape_ok = true;
    for (int p = 0; p < n && shape_ok; ++p) {
      if (a.game.num_strategies(p) != b.game.num_strategies(player_map[p])) {
        shape_ok = false;
      }
    }
    if (!shape_ok) continue;
    std::vector<std::vector<int>> strat_map(n);
    if (match_strategies(a, b, player_map, 0, strat_map, tol)) return true;
  } while (std::next_permutation(player_map.begin(), player_map.end()));
  return false;
}

}  // namespace eqidx
