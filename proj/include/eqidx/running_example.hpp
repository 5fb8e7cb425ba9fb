#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "eqidx/game.hpp"
#include "eqidx/triangulation.hpp"

namespace eqidx {

// Symmetric-slice analysis of the 2x2 coordination game (L/R, match = 1):
// a symmetric profile is the probability x of playing L, and the auxiliary
// coordinate theta in [0,1] is the probability of the bonus vertex.

// Symmetric restriction of the Nash fixed-point map; fixed points 0, 1/2, 1.
double f_sym(double x);

// Modified map agreeing with f_sym on [3/4,1] whose only fixed point is 1.
double f0_sym(double x);

// Best payoff attainable against the symmetric profile x.
double v_sym(double x);

// Cutoff bump: 1 on [0,2/3], linear down to 0 at 3/4, then 0.
double beta3_sym(double x);

// Bonus pair (g_L, g_R): g_L = beta3 * (v - x + delta), g_R identically 0.
std::array<double, 2> g_sym(double x, double delta);

// Bonus for the auxiliary coordinate: theta * (1 - 8x/7).
double gamma_sym(double theta, double x);

// Certifies by a 1e-4 grid scan that the bonus-perturbed game's only
// symmetric equilibrium is x = 1. with_bonus=false checks the unperturbed
// game instead (which fails: x = 1/2 survives).
bool verify_perturbed_unique(double delta, bool with_bonus = true);

struct FinalGameOptions {
  double delta = 1e-3;        // coefficient of the convex penalty term
  double bonus_delta = 1e-3;  // delta inside the bonus pair g
  double zeta = 0.15;         // diameter bound for simplices at theta = 1
  std::uint64_t seed = 0;
  bool with_gamma = true;     // ablation switch for the theta bonus
};

// The finite symmetric game over the triangulated square whose unique
// equilibrium is the designated vertex (x = 1, theta = 0).
struct FinalGame {
  Game game;
  Triangulation tri;
  ConvexPLWitness rho;  // convex witness shifted to vanish exactly at theta=0
  std::vector<std::array<double, 2>> coords;  // (x, theta) per pure strategy
  int designated = -1;
  FinalGameOptions options;
};

FinalGame build_final_game(const FinalGameOptions& opts = {});

// All equilibria with admissible supports (per-player supports spanning a
// simplex of the triangulation), each verified against the full game.
std::vector<MixedProfile> enumerate_admissible_equilibria(const FinalGame& fg);

// True iff the unique admissible equilibrium is the designated vertex pair.
bool verify_final_unique(const FinalGame& fg);

// Symmetric admissible scan (used for the penalty-free delta = 0 variant):
// true iff the only symmetric admissible equilibrium is the designated
// vertex.
bool verify_final_symmetric_unique(const FinalGame& fg);

}  // namespace eqidx
