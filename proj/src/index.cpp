#include "eqidx/index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

namespace eqidx {

namespace {

double jacobian_condition(const Eigen::MatrixXd& d) {
  if (d.rows() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= smax * 1e-300) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// Reduced coordinates drop the last strategy of each player; the dropped
// coordinate absorbs the simplex constraint.
int reduced_dim(const Game& game) {
  int m = 0;
  for (int n = 0; n < game.num_players(); ++n) {
    m += game.num_strategies(n) - 1;
  }
  return m;
}

std::vector<double> reduce(const Game& game, const MixedProfile& p) {
  std::vector<double> x;
  for (int n = 0; n < game.num_players(); ++n) {
    for (int s = 0; s + 1 < game.num_strategies(n); ++s) {
      x.push_back(p.probs[n][s]);
    }
  }
  return x;
}

// Expands reduced coordinates and retracts onto the strategy space by
// per-player Euclidean simplex projection.
MixedProfile expand_and_project(const Game& game,
                                const std::vector<double>& x) {
  MixedProfile p;
  p.probs.resize(game.num_players());
  int k = 0;
  for (int n = 0; n < game.num_players(); ++n) {
    double sum = 0.0;
    for (int s = 0; s + 1 < game.num_strategies(n); ++s) {
      p.probs[n].push_back(x[k++]);
      sum += p.probs[n].back();
    }
    p.probs[n].push_back(1.0 - sum);
    project_to_simplex(p.probs[n]);
  }
  return p;
}

// Signed solid angle of the spherical triangle (a, b, c) (unit vectors),
// Van Oosterom & Strackee.
double solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                   const Eigen::Vector3d& c) {
  double num = a.dot(b.cross(c));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

std::vector<std::array<Eigen::Vector3d, 3>> subdivided_octahedron(int depth) {
  using Tri = std::array<Eigen::Vector3d, 3>;
  const Eigen::Vector3d px(1, 0, 0), nx(-1, 0, 0), py(0, 1, 0), ny(0, -1, 0),
      pz(0, 0, 1), nz(0, 0, -1);
  std::vector<Tri> tris = {{px, py, pz}, {py, nx, pz}, {nx, ny, pz},
                           {ny, px, pz}, {py, px, nz}, {nx, py, nz},
                           {ny, nx, nz}, {px, ny, nz}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      Eigen::Vector3d ab = (t[0] + t[1]).normalized();
      Eigen::Vector3d bc = (t[1] + t[2]).normalized();
      Eigen::Vector3d ca = (t[2] + t[0]).normalized();
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  return tris;
}

int round_to_int(double v, double slack, const char* what) {
  long r = std::lround(v);
  if (std::abs(v - static_cast<double>(r)) > slack) {
    throw std::runtime_error(std::string(what) +
                             ": degree estimate not close to an integer");
  }
  return static_cast<int>(r);
}

// One perturbation trial: indices of the perturbed game's equilibria that
// fall inside the neighborhood, or nullopt when any of them resists a
// regular index computation.
std::optional<int> perturbation_trial(
    const Game& game, double delta_abs, std::uint64_t trial_seed,
    const std::function<double(const MixedProfile&)>& distance,
    double neighborhood, const EnumerateOptions& enum_opts) {
  std::mt19937_64 rng(trial_seed);
  std::uniform_real_distribution<double> unif(-delta_abs, delta_abs);
  BonusVector h = BonusVector::zero(game);
  for (auto& row : h.shift) {
    for (double& v : row) v = unif(rng);
  }
  Game perturbed = bonus_apply(game, h);
  EnumerateOptions opts = enum_opts;
  opts.seed = trial_seed;
  std::vector<EquilibriumRecord> eqs = enumerate_equilibria(perturbed, opts);
  int sum = 0;
  for (const auto& rec : eqs) {
    if (distance(rec.profile) > neighborhood) continue;
    if (!rec.is_isolated || !rec.is_quasi_strict) return std::nullopt;
    Eigen::MatrixXd d = indifference_jacobian(perturbed, rec);
    if (jacobian_condition(d) >= 1e8) return std::nullopt;
    sum += index_regular(perturbed, rec);
  }
  return sum;
}

int perturbation_degree(
    const Game& game,
    const std::function<double(const MixedProfile&)>& distance,
    double neighborhood, const IndexOptions& opts) {
  double delta_abs = opts.delta * std::max(game.payoff_range(), 1.0);
  for (int round = 0; round < 4; ++round) {
    std::optional<int> agreed;
    bool unanimous = true;
    int got = 0;
    for (int t = 0; t < opts.trials || got < opts.trials; ++t) {
      if (t > opts.trials + 16) break;  // too many degenerate draws
      std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(round),
                        static_cast<std::uint64_t>(t)};
      std::mt19937_64 mix(seq);
      auto r = perturbation_trial(game, delta_abs, mix(), distance,
                                  neighborhood, opts.enumerate);
      if (!r) continue;  // degenerate perturbation, draw again
      ++got;
      if (!agreed) {
        agreed = *r;
      } else if (*agreed != *r) {
        unanimous = false;
        break;
      }
      if (got >= opts.trials) break;
    }
    if (unanimous && agreed && got >= opts.trials) return *agreed;
    delta_abs /= 2.0;
  }
  throw std::runtime_error(
      "perturbation degree: trials disagree after delta reduction");
}

}  // namespace

Eigen::MatrixXd indifference_jacobian(const Game& game,
                                      const EquilibriumRecord& eq) {
  if (!eq.is_quasi_strict) {
    throw std::invalid_argument(
        "indifference Jacobian requires a quasi-strict equilibrium; use the "
        "perturbation degree instead");
  }
  const int np = game.num_players();
  const auto& support = eq.support;
  std::vector<int> var_base(np, 0);
  int dim = 0;
  for (int n = 0; n < np; ++n) {
    var_base[n] = dim;
    dim += static_cast<int>(support[n].size()) - 1;
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
  int row = 0;
  for (int n = 0; n < np; ++n) {
    const int rn = support[n][0];
    for (std::size_t i = 1; i < support[n].size(); ++i, ++row) {
      const int s = support[n][i];
      for (int m = 0; m < np; ++m) {
        if (m == n) continue;  // own payoff is independent of own mixture
        const int rm = support[m][0];
        for (std::size_t j = 1; j < support[m].size(); ++j) {
          const int t = support[m][j];
          double v =
              (pure_pair_vs_profile(game, n, s, m, t, eq.profile) -
               pure_pair_vs_profile(game, n, s, m, rm, eq.profile)) -
              (pure_pair_vs_profile(game, n, rn, m, t, eq.profile) -
               pure_pair_vs_profile(game, n, rn, m, rm, eq.profile));
          d(row, var_base[m] + static_cast<int>(j) - 1) = v;
        }
      }
    }
  }
  return d;
}

int index_regular(const Game& game, const EquilibriumRecord& eq) {
  Eigen::MatrixXd d = indifference_jacobian(game, eq);
  if (d.rows() == 0) return +1;
  if (jacobian_condition(d) >= 1e8) {
    throw std::invalid_argument(
        "singular indifference Jacobian; route to index_isolated");
  }
  double det = Eigen::MatrixXd(-d).determinant();
  return det > 0.0 ? +1 : -1;
}

MixedProfile nash_map(const Game& game, const MixedProfile& profile) {
  if (!profile.matches(game)) {
    throw std::invalid_argument("profile dimensions do not match game");
  }
  MixedProfile out = profile;
  for (int n = 0; n < game.num_players(); ++n) {
    double gn = expected_payoff(game, profile, n);
    double total = 0.0;
    std::vector<double> phi(game.num_strategies(n));
    for (int s = 0; s < game.num_strategies(n); ++s) {
      phi[s] = std::max(0.0, pure_vs_profile(game, n, s, profile) - gn);
      total += phi[s];
    }
    for (int s = 0; s < game.num_strategies(n); ++s) {
      out.probs[n][s] = (profile.probs[n][s] + phi[s]) / (1.0 + total);
    }
  }
  return out;
}

int local_degree_oracle(const Game& game, const EquilibriumRecord& eq,
                        double radius) {
  const int m = reduced_dim(game);
  if (m > 3) {
    throw std::invalid_argument("degree oracle limited to dimension <= 3");
  }
  std::vector<double> center = reduce(game, eq.profile);
  auto displacement = [&](const std::vector<double>& x) {
    MixedProfile sigma = expand_and_project(game, x);
    std::vector<double> fx = reduce(game, nash_map(game, sigma));
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - fx[i];
    return d;
  };
  const double vanish_tol = 1e-12;

  if (m == 1) {
    double lo = displacement({center[0] - radius})[0];
    double hi = displacement({center[0] + radius})[0];
    if (std::abs(lo) < vanish_tol || std::abs(hi) < vanish_tol) {
      throw std::runtime_error("degree oracle: field vanishes on the sphere");
    }
    int sh = hi > 0.0 ? 1 : -1;
    int sl = lo > 0.0 ? 1 : -1;
    return (sh - sl) / 2;
  }

  if (m == 2) {
    const int segments = 1440;
    double total = 0.0;
    double prev_angle = 0.0;
    double first_angle = 0.0;
    for (int i = 0; i <= segments; ++i) {
      double t = 2.0 * std::numbers::pi * i / segments;
      std::vector<double> x = {center[0] + radius * std::cos(t),
                               center[1] + radius * std::sin(t)};
      std::vector<double> d = displacement(x);
      double norm = std::hypot(d[0], d[1]);
      if (norm < vanish_tol) {
        throw std::runtime_error(
            "degree oracle: field vanishes on the sphere");
      }
      double angle = std::atan2(d[1], d[0]);
      if (i == 0) {
        first_angle = angle;
      } else {
        double diff = angle - prev_angle;
        while (diff > std::numbers::pi) diff -= 2.0 * std::numbers::pi;
        while (diff < -std::numbers::pi) diff += 2.0 * std::numbers::pi;
        total += diff;
      }
      prev_angle = angle;
    }
    (void)first_angle;
    return round_to_int(total / (2.0 * std::numbers::pi), 0.2,
                        "degree oracle (winding)");
  }

  // m == 3: sum the signed solid angles of the image of a triangulated
  // sphere under the normalized direction field.
  auto tris = subdivided_octahedron(5);
  auto field = [&](const Eigen::Vector3d& u) {
    std::vector<double> x = {center[0] + radius * u(0),
                             center[1] + radius * u(1),
                             center[2] + radius * u(2)};
    std::vector<double> d = displacement(x);
    Eigen::Vector3d v(d[0], d[1], d[2]);
    double norm = v.norm();
    if (norm < vanish_tol) {
      throw std::runtime_error("degree oracle: field vanishes on the sphere");
    }
    return Eigen::Vector3d(v / norm);
  };
  double total = 0.0;
  for (const auto& t : tris) {
    total += solid_angle(field(t[0]), field(t[1]), field(t[2]));
  }
  return round_to_int(total / (4.0 * std::numbers::pi), 0.25,
                      "degree oracle (solid angle)");
}

int index_isolated(const Game& game, const EquilibriumRecord& eq,
                   const IndexOptions& opts) {
  auto distance = [&](const MixedProfile& p) {
    return eq.profile.linf_distance(p);
  };
  return perturbation_degree(game, distance, opts.neighborhood, opts);
}

int component_index(const Game& game, const ComponentRecord& comp,
                    const IndexOptions& opts) {
  auto distance = [&](const MixedProfile& p) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& m : comp.members) d = std::min(d, m.linf_distance(p));
    return d;
  };
  return perturbation_degree(game, distance, opts.neighborhood, opts);
}

namespace {

// True when a recursively bisected path between the profiles can be snapped
// onto the equilibrium set with every hop shorter than `hop`. Handles curved
// continua, where straight chords leave the set. Snapped midpoints may not
// drift beyond the current endpoints (no expanding excursions).
bool path_connected(const Game& game, const MixedProfile& a,
                    const MixedProfile& b, double hop, int depth) {
  double gap = a.linf_distance(b);
  if (gap <= hop) return true;
  if (depth == 0) return false;
  MixedProfile mid = a;
  for (std::size_t p = 0; p < mid.probs.size(); ++p) {
    for (std::size_t s = 0; s < mid.probs[p].size(); ++s) {
      mid.probs[p][s] = 0.5 * (a.probs[p][s] + b.probs[p][s]);
    }
  }
  if (!snap_to_equilibrium(game, mid)) return false;
  if (mid.linf_distance(a) > gap || mid.linf_distance(b) > gap) return false;
  return path_connected(game, a, mid, hop, depth - 1) &&
         path_connected(game, mid, b, hop, depth - 1);
}

}  // namespace

ClassifyResult classify(const Game& game, const IndexOptions& opts) {
  ClassifyResult out;
  std::vector<EquilibriumRecord> records =
      enumerate_equilibria(game, opts.enumerate);
  const int n = static_cast<int>(records.size());

  // Group records into components: chain at the clustering radius, then
  // merge groups joined by a snappable path through the equilibrium set
  // whenever one side is already known to be non-isolated.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (const auto& group : cluster_components(records, opts.cluster_radius)) {
    for (std::size_t k = 1; k < group.size(); ++k) {
      parent[find(group[k])] = find(group[0]);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      if (!records[i].is_isolated || !records[j].is_isolated) {
        if (path_connected(game, records[i].profile, records[j].profile,
                           2.0 * opts.component_step, 6)) {
          parent[find(j)] = find(i);
        }
      }
    }
  }
  auto build_groups = [&]() {
    std::vector<std::vector<int>> groups;
    for (int root = 0; root < n; ++root) {
      if (find(root) != root) continue;
      std::vector<int> g;
      for (int i = 0; i < n; ++i) {
        if (find(i) == root) g.push_back(i);
      }
      groups.push_back(std::move(g));
    }
    return groups;
  };

  // Curved continua defeat the straight-segment test, so flood-fill a cloud
  // of verified equilibria around every group that holds a non-isolated
  // record and merge groups whose point sets come within twice the sampling
  // step of each other (an isolated-looking record can be the endpoint of a
  // continuum).
  std::vector<std::vector<int>> snapshot = build_groups();
  std::vector<ComponentRecord> clouds(snapshot.size());
  std::vector<bool> has_cloud(snapshot.size(), false);
  for (std::size_t k = 0; k < snapshot.size(); ++k) {
    int seed = -1;
    for (int i : snapshot[k]) {
      if (!records[i].is_isolated) seed = i;
    }
    if (seed < 0) continue;
    clouds[k] = sample_component(game, records[seed].profile,
                                 opts.component_step, opts.component_budget,
                                 opts.seed);
    has_cloud[k] = true;
  }
  if (std::find(has_cloud.begin(), has_cloud.end(), true) != has_cloud.end()) {
    std::vector<std::vector<MixedProfile>> points(snapshot.size());
    for (std::size_t k = 0; k < snapshot.size(); ++k) {
      for (int i : snapshot[k]) points[k].push_back(records[i].profile);
      points[k].insert(points[k].end(), clouds[k].members.begin(),
                       clouds[k].members.end());
    }
    const double touch = 2.0 * opts.component_step;
    for (std::size_t a = 0; a < snapshot.size(); ++a) {
      for (std::size_t b = a + 1; b < snapshot.size(); ++b) {
        if (!has_cloud[a] && !has_cloud[b]) continue;
        bool touching = false;
        for (const auto& pa : points[a]) {
          for (const auto& pb : points[b]) {
            if (pa.linf_distance(pb) < touch) touching = true;
          }
        }
        if (touching) parent[find(snapshot[b][0])] = find(snapshot[a][0]);
      }
    }
  }

  std::vector<std::vector<int>> groups = build_groups();

  out.reports.resize(n);
  for (const auto& group : groups) {
    bool point_component =
        group.size() == 1 && records[group[0]].is_isolated;
    ComponentRecord comp;
    if (point_component) {
      const EquilibriumRecord& rec = records[group[0]];
      IndexReport& rep = out.reports[group[0]];
      rep.equilibrium = rec;
      bool regular_route = rec.is_quasi_strict;
      if (regular_route) {
        Eigen::MatrixXd d = indifference_jacobian(game, rec);
        regular_route = jacobian_condition(d) < 1e8;
      }
      if (regular_route) {
        rep.index = index_regular(game, rec);
        rep.method = IndexMethod::kIndifferenceJacobian;
        rep.is_regular = true;
      } else {
        rep.index = index_isolated(game, rec, opts);
        rep.method = IndexMethod::kPerturbationDegree;
      }
      rep.is_sustainable = rep.index == +1;
      comp.members.push_back(rec.profile);
      comp.index = rep.index;
    } else {
      // Assemble the component from the records plus every flood-fill cloud
      // absorbed into this group, deduplicated at the clustering radius.
      std::vector<MixedProfile> pool;
      for (int i : group) pool.push_back(records[i].profile);
      for (std::size_t k = 0; k < snapshot.size(); ++k) {
        if (!has_cloud[k] || find(snapshot[k][0]) != find(group[0])) continue;
        pool.insert(pool.end(), clouds[k].members.begin(),
                    clouds[k].members.end());
      }
      if (pool.size() == group.size()) {
        ComponentRecord sampled = sample_component(
            game, records[group[0]].profile, opts.component_step,
            opts.component_budget, opts.seed);
        pool.insert(pool.end(), sampled.members.begin(),
                    sampled.members.end());
      }
      for (const auto& p : pool) {
        bool fresh = true;
        for (const auto& m : comp.members) {
          if (m.linf_distance(p) < opts.cluster_radius) fresh = false;
        }
        if (!fresh) continue;
        comp.members.push_back(p);
        comp.bounding_radius =
            std::max(comp.bounding_radius,
                     comp.members.front().linf_distance(comp.members.back()));
      }
      comp.index = component_index(game, comp, opts);
      for (int i : group) {
        IndexReport& rep = out.reports[i];
        rep.equilibrium = records[i];
        rep.equilibrium.is_isolated = false;  // part of a fat component
        rep.index = comp.index;
        rep.method = IndexMethod::kPerturbationDegree;
        rep.is_regular = false;
        rep.is_sustainable = false;
      }
    }
    out.components.push_back(std::move(comp));
  }

  for (const auto& rep : out.reports) {
    if (rep.equilibrium.is_isolated && rep.index == +1) {
      out.solution.phi_star.push_back(rep);
    }
  }
  for (const auto& comp : out.components) {
    if (comp.index > 0) out.solution.phi_plus.push_back(comp);
  }
  return out;
}

}  // namespace eqidx
