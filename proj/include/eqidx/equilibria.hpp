#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eqidx/game.hpp"

namespace eqidx {

struct EquilibriumRecord {
  MixedProfile profile;
  std::vector<std::vector<int>> support;
  double max_residual = 0.0;
  bool is_isolated = true;
  bool is_quasi_strict = false;
  double jacobian_condition = 0.0;  // of the support indifference system
};

// A connected cluster of equilibria. `index` is filled by the index module.
struct ComponentRecord {
  std::vector<MixedProfile> members;  // members.front() is the seed
  double bounding_radius = 0.0;
  int index = 0;
};

struct EnumerateOptions {
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t max_support_combinations = 1000000;
  double dedup_radius = 1e-7;
  double support_threshold = 1e-9;
  int newton_starts = 8;
  double singular_condition = 1e8;
};

// Thrown when the support-enumeration budget is exceeded; carries the
// partial result gathered so far.
class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(std::string what, std::vector<EquilibriumRecord> partial)
      : std::runtime_error(std::move(what)), partial_(std::move(partial)) {}
  const std::vector<EquilibriumRecord>& partial() const { return partial_; }

 private:
  std::vector<EquilibriumRecord> partial_;
};

// v_n(sigma) = max over pure strategies of the payoff against the opponents'
// mixtures, plus the set of pure strategies within tol of that value.
std::pair<double, std::vector<int>> best_reply_value_and_set(
    const Game& game, int player, const MixedProfile& opponents,
    double tol = 1e-9);

// True iff every support strategy is within tol of the best-reply value and
// no strategy exceeds it by tol. Second element is the largest violation.
std::pair<bool, double> is_equilibrium(const Game& game,
                                       const MixedProfile& profile,
                                       double tol = 1e-9);

// Exhaustive support enumeration. Two-player supports are decided by exact
// linear feasibility; three or more players use seeded multistart Newton on
// the indifference system. Singular supports are flagged (is_isolated =
// false) for component sampling. Deterministic given opts.seed.
std::vector<EquilibriumRecord> enumerate_equilibria(
    const Game& game, const EnumerateOptions& opts = {});

// Projects a near-equilibrium point onto the equilibrium set by a
// minimum-norm Gauss-Newton solve of its active-support indifference system
// (the minimum-norm step finds the nearest point of a solution continuum).
// Returns false when the solve diverges, leaves the simplex, or the result
// fails verification.
bool snap_to_equilibrium(const Game& game, MixedProfile& profile,
                         double tol = 1e-8);

// Flood-fill sampling of the equilibrium set around a seed: random local
// moves projected back onto the strategy space and kept when they still
// verify as equilibria.
ComponentRecord sample_component(const Game& game, const MixedProfile& seed,
                                 double step = 0.02, int budget = 2000,
                                 std::uint64_t rng_seed = 0,
                                 double tol = 1e-8);

// Chains records into connected components at the given clustering radius.
std::vector<std::vector<int>> cluster_components(
    const std::vector<EquilibriumRecord>& records, double radius = 1e-3);

// Euclidean projection of a vector onto the probability simplex.
void project_to_simplex(std::vector<double>& v);

}  // namespace eqidx
