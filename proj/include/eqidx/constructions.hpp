#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eqidx/equilibria.hpp"
#include "eqidx/game.hpp"

namespace eqidx {

struct EmbeddingReport {
  GameEquilibriumPair original;
  Game embedded;
  std::vector<std::vector<std::string>> added_labels;
  MixedProfile lifted_equilibrium;
  bool unique_verified = false;
  bool equivalence_verified = false;
};

// Makes a strict pure equilibrium the unique equilibrium of a larger game by
// adding one dominator strategy per player: the new strategy strictly
// dominates every other old strategy, and is itself strictly dominated by
// the equilibrium strategy once those are gone. Verified by iterated strict
// dominance and by full enumeration.
EmbeddingReport embed_strict_dominators(const Game& game,
                                        const std::vector<int>& pure_eq,
                                        double tol = 1e-9);

struct EliminationStep {
  int player;
  std::string label;
};

struct IteratedDominanceResult {
  Game reduced;
  std::vector<std::vector<EliminationStep>> rounds;
};

// Repeatedly deletes pure strategies strictly dominated by a mixture of the
// player's remaining strategies (certified by linear feasibility with the
// given margin) until a fixed point.
IteratedDominanceResult iterated_strict_dominance(const Game& game,
                                                  double tol = 1e-9);

// True iff enumeration finds exactly one equilibrium, within 1e-6 of the
// expected profile.
bool verify_unique(const Game& game, const MixedProfile& expected,
                   const EnumerateOptions& opts = {});

// The bundled example games: BoS, G-hat, G1, G1-hat, coordination,
// sec4-corner, sec4-three-player, brandt-fischer, G2, G3.
const std::map<std::string, Game>& corpus();

// Writes every corpus game as a JSON file <dir>/<name>.json.
void write_corpus(const std::string& dir);

}  // namespace eqidx
