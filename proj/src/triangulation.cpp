#include "eqidx/triangulation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace eqidx {

namespace {

double dist2(const std::vector<double>& a, const Eigen::VectorXd& b) {
  double s = 0;
  for (int k = 0; k < b.size(); ++k) s += (a[k] - b(k)) * (a[k] - b(k));
  return s;
}

// Circumcenter and squared radius of d+1 points; false when the simplex is
// flat.
bool circumsphere(const std::vector<std::vector<double>>& pts,
                  const std::vector<int>& v, int d, Eigen::VectorXd& center,
                  double& r2) {
  Eigen::MatrixXd a(d, d);
  Eigen::VectorXd b(d);
  const auto& x0 = pts[v[0]];
  for (int i = 1; i <= d; ++i) {
    const auto& xi = pts[v[i]];
    double rhs = 0;
    for (int k = 0; k < d; ++k) {
      a(i - 1, k) = 2.0 * (xi[k] - x0[k]);
      rhs += xi[k] * xi[k] - x0[k] * x0[k];
    }
    b(i - 1) = rhs;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return false;
  center = lu.solve(b);
  r2 = dist2(x0, center);
  return true;
}

struct BwSimplex {
  std::vector<int> v;
  Eigen::VectorXd center;
  double r2 = 0;
  bool alive = true;
};

// Incremental insertion into an enclosing super-simplex. `order` gives the
// insertion sequence over pts; points exactly on a circumsphere count as
// outside (ties break toward keeping the existing simplex).
std::vector<std::vector<int>> bowyer_watson(
    const std::vector<std::vector<double>>& pts, int d,
    const std::vector<int>& order) {
  const int n = static_cast<int>(pts.size());
  std::vector<std::vector<double>> work = pts;

  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& p : pts) {
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  double extent = 1.0;
  for (int k = 0; k < d; ++k) extent = std::max(extent, hi[k] - lo[k]);
  const double big = 20.0 * extent * d + 10.0;
  std::vector<double> base(d);
  for (int k = 0; k < d; ++k) base[k] = lo[k] - big;
  work.push_back(base);
  for (int i = 0; i < d; ++i) {
    std::vector<double> s = base;
    s[i] += 4.0 * big;
    work.push_back(s);
  }

  std::vector<BwSimplex> simps;
  {
    BwSimplex super;
    for (int i = 0; i <= d; ++i) super.v.push_back(n + i);
    if (!circumsphere(work, super.v, d, super.center, super.r2)) {
      throw std::logic_error("super-simplex is flat");
    }
    simps.push_back(std::move(super));
  }

  for (int p : order) {
    const auto& x = work[p];
    std::vector<int> bad;
    for (int s = 0; s < static_cast<int>(simps.size()); ++s) {
      if (!simps[s].alive) continue;
      double tie = 1e-12 * std::max(1.0, simps[s].r2);
      if (dist2(x, simps[s].center) < simps[s].r2 - tie) bad.push_back(s);
    }
    if (bad.empty()) {
      throw std::logic_error("insertion point outside every circumball");
    }
    std::map<std::vector<int>, int> facet_count;
    for (int s : bad) {
      simps[s].alive = false;
      for (int skip = 0; skip <= d; ++skip) {
        std::vector<int> f;
        for (int i = 0; i <= d; ++i) {
          if (i != skip) f.push_back(simps[s].v[i]);
        }
        std::sort(f.begin(), f.end());
        ++facet_count[f];
      }
    }
    for (const auto& [facet, count] : facet_count) {
      if (count != 1) continue;
      BwSimplex fresh;
      fresh.v = facet;
      fresh.v.push_back(p);
      std::sort(fresh.v.begin(), fresh.v.end());
      if (!circumsphere(work, fresh.v, d, fresh.center, fresh.r2)) {
        throw std::runtime_error(
            "degenerate (flat) simplex during triangulation");
      }
      simps.push_back(std::move(fresh));
    }
  }

  std::vector<std::vector<int>> out;
  for (const auto& s : simps) {
    if (!s.alive) continue;
    if (std::any_of(s.v.begin(), s.v.end(), [&](int i) { return i >= n; })) {
      continue;
    }
    out.push_back(s.v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConvexPLWitness lift_values(const std::vector<std::vector<double>>& pts) {
  ConvexPLWitness w;
  for (const auto& p : pts) {
    double s = 0;
    for (double x : p) s += x * x;
    w.values.push_back(s);
  }
  return w;
}

}  // namespace

double circumball_margin(const Triangulation& tri) {
  double margin = std::numeric_limits<double>::infinity();
  const int d = tri.dimension;
  for (const auto& s : tri.simplices) {
    Eigen::VectorXd c;
    double r2 = 0;
    if (!circumsphere(tri.vertices, s, d, c, r2)) {
      return -std::numeric_limits<double>::infinity();
    }
    double r = std::sqrt(r2);
    for (int i = 0; i < static_cast<int>(tri.vertices.size()); ++i) {
      if (std::find(s.begin(), s.end(), i) != s.end()) continue;
      margin = std::min(margin, std::sqrt(dist2(tri.vertices[i], c)) - r);
    }
  }
  return margin;
}

LiftedTriangulation delaunay_lift(std::vector<std::vector<double>> points,
                                  std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("no points");
  const int d = static_cast<int>(points[0].size());
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1..3");
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d) {
      throw std::invalid_argument("inconsistent point dimensions");
    }
  }
  if (static_cast<int>(points.size()) < d + 1) {
    throw std::invalid_argument("need at least d+1 points");
  }

  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order[i] = (int)i;

  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<std::vector<double>> pts = points;
    if (attempt > 0) {
      std::mt19937_64 rng(seed ^ (0xabcdef12345ull + attempt));
      std::uniform_real_distribution<double> jit(-1e-7, 1e-7);
      for (auto& p : pts) {
        for (double& x : p) x += jit(rng);
      }
    }
    Triangulation tri;
    tri.dimension = d;
    tri.vertices = pts;
    tri.jittered = attempt > 0;
    try {
      tri.simplices = bowyer_watson(pts, d, order);
    } catch (const std::runtime_error&) {
      continue;  // flat simplex: degenerate input, retry jittered
    }
    if (circumball_margin(tri) <= 1e-10 && attempt < 3) continue;
    return {std::move(tri), lift_values(pts)};
  }
  throw std::runtime_error("points remain degenerate after jitter retries");
}

RefinedTriangulation refine_near_face(const Box& box, int axis, double offset,
                                      double delta, std::uint64_t seed) {
  const int d = static_cast<int>(box.lo.size());
  if (d < 2 || d > 3 || box.hi.size() != box.lo.size()) {
    throw std::invalid_argument("box must be 2- or 3-dimensional");
  }
  if (axis < 0 || axis >= d) throw std::invalid_argument("bad axis");
  for (int k = 0; k < d; ++k) {
    if (!(box.lo[k] < box.hi[k])) throw std::invalid_argument("empty box");
  }
  if (delta <= 0) throw std::invalid_argument("delta must be positive");

  const bool whole_box = offset <= box.lo[axis];

  std::mt19937_64 rng(seed ^ 0x5deece66dull);
  std::uniform_real_distribution<double> unit(0.5, 1.0);
  std::uniform_real_distribution<double> jit(-1.0, 1.0);

  // Tiny tilt of the separating hyperplane so its cut vertices are generic
  // against the box corners (an axis-parallel cut makes them cocircular).
  std::vector<double> tilt(d, 0.0);
  double tilt_max = 0.0;
  for (int k = 0; k < d; ++k) {
    if (k == axis || whole_box) continue;
    tilt[k] = (jit(rng) < 0 ? -1 : 1) * unit(rng) * 1e-3 * delta;
    tilt_max += std::abs(tilt[k]) * (box.hi[k] - box.lo[k]) / 2.0;
  }
  auto plane_height = [&](const std::vector<double>& u) {
    double h = offset;
    for (int k = 0; k < d; ++k) {
      if (k == axis) continue;
      h += tilt[k] * (u[k] - (box.lo[k] + box.hi[k]) / 2.0);
    }
    return h;
  };

  if (!whole_box) {
    if (offset - tilt_max - box.lo[axis] < delta / 2) {
      throw std::invalid_argument(
          "delta too large: cut is closer than delta/2 to the far vertices");
    }
    if (box.hi[axis] - (offset + tilt_max) < 0.51 * delta) {
      throw std::invalid_argument(
          "delta too large: refined region thinner than delta/2");
    }
  }

  const double spacing = 0.99 * delta / 2.0;
  const double jitter_mag = 1e-3 * delta;

  // 1-D grid with spacing <= `spacing`, endpoints included.
  auto grid = [&](double a, double b) {
    int n = std::max(1, (int)std::ceil((b - a) / spacing));
    std::vector<double> out;
    for (int i = 0; i <= n; ++i) out.push_back(a + (b - a) * i / n);
    return out;
  };

  std::vector<std::vector<double>> points;
  // Box corners first (insertion order matters: extreme points go in before
  // points that lie on their chords).
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<double> c(d);
    for (int k = 0; k < d; ++k) {
      c[k] = (mask >> k) & 1 ? box.hi[k] : box.lo[k];
    }
    points.push_back(c);
  }

  std::vector<int> tang;
  for (int k = 0; k < d; ++k) {
    if (k != axis) tang.push_back(k);
  }
  std::vector<std::vector<double>> tgrids;
  for (int k : tang) tgrids.push_back(grid(box.lo[k], box.hi[k]));
  std::vector<double> layers =
      whole_box ? grid(box.lo[axis], box.hi[axis])
                : grid(offset + tilt_max + 0.51 * delta, box.hi[axis]);

  std::vector<std::vector<double>> cut_corners, others;
  std::vector<std::size_t> cursor(tang.size(), 0);
  while (true) {
    std::vector<double> u(d, 0.0);
    bool corner_pos = true;
    for (std::size_t i = 0; i < tang.size(); ++i) {
      u[tang[i]] = tgrids[i][cursor[i]];
      bool endpoint = cursor[i] == 0 || cursor[i] + 1 == tgrids[i].size();
      corner_pos &= endpoint;
      if (!endpoint) u[tang[i]] += jit(rng) * jitter_mag;
    }
    // Point on the separating hyperplane (cut corners stay exact).
    if (!whole_box) {
      std::vector<double> on_plane = u;
      on_plane[axis] = plane_height(u);
      (corner_pos ? cut_corners : others).push_back(on_plane);
    }
    // Interior layers and the two axis-extreme faces.
    for (std::size_t li = 0; li < layers.size(); ++li) {
      std::vector<double> p = u;
      p[axis] = layers[li];
      bool on_face = li + 1 == layers.size() || (whole_box && li == 0);
      if (!on_face) p[axis] += jit(rng) * jitter_mag;
      if (corner_pos && on_face) continue;  // already a box corner
      others.push_back(p);
    }
    std::size_t i = 0;
    while (i < tang.size() && ++cursor[i] == tgrids[i].size()) cursor[i++] = 0;
    if (i == tang.size()) break;
  }
  std::sort(others.begin(), others.end());
  points.insert(points.end(), cut_corners.begin(), cut_corners.end());
  points.insert(points.end(), others.begin(), others.end());

  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order[i] = (int)i;

  RefinedTriangulation out;
  out.tri.dimension = d;
  out.tri.vertices = points;
  out.tri.simplices = bowyer_watson(points, d, order);
  out.witness = lift_values(points);
  out.cut_normal.assign(d, 0.0);
  out.cut_normal[axis] = 1.0;
  out.cut_offset = whole_box ? box.lo[axis] : offset;
  for (int k = 0; k < d; ++k) {
    if (k == axis) continue;
    out.cut_normal[k] = -tilt[k];
    out.cut_offset -= tilt[k] * (box.lo[k] + box.hi[k]) / 2.0;
  }
  return out;
}

double pl_eval(const Triangulation& tri, const ConvexPLWitness& witness,
               const std::vector<double>& x) {
  const int d = tri.dimension;
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("point dimension mismatch");
  }
  for (const auto& s : tri.simplices) {
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd b(d);
    const auto& x0 = tri.vertices[s[0]];
    for (int k = 0; k < d; ++k) {
      for (int i = 1; i <= d; ++i) {
        a(k, i - 1) = tri.vertices[s[i]][k] - x0[k];
      }
      b(k) = x[k] - x0[k];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd lam = lu.solve(b);
    double lam0 = 1.0 - lam.sum();
    if (lam0 < -1e-9 || (lam.array() < -1e-9).any()) continue;
    double value = lam0 * witness.values[s[0]];
    for (int i = 1; i <= d; ++i) value += lam(i - 1) * witness.values[s[i]];
    return value;
  }
  throw std::invalid_argument("point lies outside the triangulated polytope");
}

std::vector<double> hinge_gaps(const Triangulation& tri,
                               const ConvexPLWitness& witness) {
  const int d = tri.dimension;
  std::map<std::vector<int>, std::vector<int>> facets;
  for (int s = 0; s < static_cast<int>(tri.simplices.size()); ++s) {
    for (int skip = 0; skip <= d; ++skip) {
      std::vector<int> f;
      for (int i = 0; i <= d; ++i) {
        if (i != skip) f.push_back(tri.simplices[s][i]);
      }
      facets[f].push_back(s);
    }
  }
  // Affine extension of the witness from one simplex, evaluated at a vertex.
  auto extension = [&](int s, int vertex) {
    Eigen::MatrixXd a(d + 1, d + 1);
    Eigen::VectorXd b(d + 1);
    for (int i = 0; i <= d; ++i) {
      for (int k = 0; k < d; ++k) a(i, k) = tri.vertices[tri.simplices[s][i]][k];
      a(i, d) = 1.0;
      b(i) = witness.values[tri.simplices[s][i]];
    }
    Eigen::VectorXd coef = a.fullPivLu().solve(b);
    double v = coef(d);
    for (int k = 0; k < d; ++k) v += coef(k) * tri.vertices[vertex][k];
    return v;
  };
  auto opposite = [&](int s, const std::vector<int>& facet) {
    for (int v : tri.simplices[s]) {
      if (std::find(facet.begin(), facet.end(), v) == facet.end()) return v;
    }
    throw std::logic_error("facet not part of simplex");
  };
  std::vector<double> gaps;
  for (const auto& [facet, adj] : facets) {
    if (adj.size() != 2) continue;
    double g1 = witness.values[opposite(adj[1], facet)] -
                extension(adj[0], opposite(adj[1], facet));
    double g2 = witness.values[opposite(adj[0], facet)] -
                extension(adj[1], opposite(adj[0], facet));
    gaps.push_back(std::min(g1, g2));
  }
  return gaps;
}

double volume_sum(const Triangulation& tri) {
  const int d = tri.dimension;
  double total = 0;
  double fact = 1;
  for (int k = 2; k <= d; ++k) fact *= k;
  for (const auto& s : tri.simplices) {
    Eigen::MatrixXd a(d, d);
    for (int i = 1; i <= d; ++i) {
      for (int k = 0; k < d; ++k) {
        a(k, i - 1) = tri.vertices[s[i]][k] - tri.vertices[s[0]][k];
      }
    }
    total += std::abs(a.determinant()) / fact;
  }
  return total;
}

nlohmann::json triangulation_to_json(const Triangulation& tri,
                                     const ConvexPLWitness* witness) {
  nlohmann::json j;
  j["dimension"] = tri.dimension;
  j["vertices"] = tri.vertices;
  j["simplices"] = tri.simplices;
  j["jittered"] = tri.jittered;
  if (witness != nullptr) j["witness"] = witness->values;
  return j;
}

LiftedTriangulation triangulation_from_json(const nlohmann::json& j) {
  LiftedTriangulation out;
  out.tri.dimension = j.at("dimension").get<int>();
  out.tri.vertices = j.at("vertices").get<std::vector<std::vector<double>>>();
  out.tri.simplices = j.at("simplices").get<std::vector<std::vector<int>>>();
  out.tri.jittered = j.value("jittered", false);
  if (j.contains("witness")) {
    out.witness.values = j.at("witness").get<std::vector<double>>();
  }
  return out;
}

}  // namespace eqidx
