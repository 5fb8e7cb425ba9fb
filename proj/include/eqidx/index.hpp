#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "eqidx/equilibria.hpp"
#include "eqidx/game.hpp"

namespace eqidx {

enum class IndexMethod {
  kIndifferenceJacobian,
  kLocalDegreeOracle,
  kPerturbationDegree,
};

struct IndexReport {
  EquilibriumRecord equilibrium;
  int index = 0;
  IndexMethod method = IndexMethod::kIndifferenceJacobian;
  bool is_regular = false;
  bool is_sustainable = false;
};

struct SolutionSet {
  std::vector<IndexReport> phi_star;        // isolated, index +1
  std::vector<ComponentRecord> phi_plus;    // components with positive index
};

struct ClassifyResult {
  std::vector<IndexReport> reports;
  std::vector<ComponentRecord> components;
  SolutionSet solution;
};

struct IndexOptions {
  double delta = 1e-4;        // perturbation magnitude, fraction of range
  int trials = 3;             // unanimous perturbation trials
  std::uint64_t seed = 0;
  double neighborhood = 0.05;  // isolation neighborhood radius (l-inf)
  EnumerateOptions enumerate;
  double cluster_radius = 1e-3;
  double component_step = 0.02;
  int component_budget = 2000;
};

// Jacobian of the support-restricted indifference system at a quasi-strict
// isolated equilibrium. For each player n with support T_n and reference
// r_n = T_n[0], equations E_{n,s} = G_n(s, sigma_{-n}) - G_n(r_n, sigma_{-n})
// for s in T_n \ {r_n}; variables are the support probabilities excluding
// the reference (which absorbs the simplex constraint).
Eigen::MatrixXd indifference_jacobian(const Game& game,
                                      const EquilibriumRecord& eq);

// Index of a regular equilibrium: sign of det(-D), the 0x0 determinant
// counting as +1. The convention is calibrated against the combinatorial
// degree oracle and the degree-sum theorem (see tests).
int index_regular(const Game& game, const EquilibriumRecord& eq);

// Nash's fixed-point map; fixed points coincide with equilibria.
MixedProfile nash_map(const Game& game, const MixedProfile& profile);

// Combinatorial Brouwer degree of the Nash-map displacement over a sphere
// around the equilibrium, in reduced coordinates (dimension m <= 3). This is
// the brute-force ground truth for index_regular.
int local_degree_oracle(const Game& game, const EquilibriumRecord& eq,
                        double radius);

// Perturbation degree of an isolated equilibrium: random payoff bonuses of
// magnitude delta, indices of the perturbed equilibria in the isolation
// neighborhood summed, with unanimity across trials (delta halved and the
// trials retried up to 3 times on disagreement).
int index_isolated(const Game& game, const EquilibriumRecord& eq,
                   const IndexOptions& opts = {});

// Degree of a component: indices of perturbed-game equilibria within the
// component's neighborhood summed.
int component_index(const Game& game, const ComponentRecord& comp,
                    const IndexOptions& opts = {});

// Full pipeline: enumerate, index every record, cluster components, and
// build the Phi* / Phi+ solution sets.
ClassifyResult classify(const Game& game, const IndexOptions& opts = {});

}  // namespace eqidx
