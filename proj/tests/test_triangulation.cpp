#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eqidx/triangulation.hpp"

using namespace eqidx;

namespace {

double diameter(const Triangulation& tri, const std::vector<int>& simplex) {
  double best = 0;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    for (std::size_t j = i + 1; j < simplex.size(); ++j) {
      double s = 0;
      for (int k = 0; k < tri.dimension; ++k) {
        double d = tri.vertices[simplex[i]][k] - tri.vertices[simplex[j]][k];
        s += d * d;
      }
      best = std::max(best, std::sqrt(s));
    }
  }
  return best;
}

double plane_side(const RefinedTriangulation& r, const std::vector<double>& x) {
  double s = -r.cut_offset;
  for (std::size_t k = 0; k < x.size(); ++k) s += r.cut_normal[k] * x[k];
  return s;
}

// Properties (i) and (ii) of the refinement: simplices inside the refined
// region have diameter <= delta; simplices with a vertex below the cut stay
// entirely on or below it.
void check_refinement(const RefinedTriangulation& r, double delta) {
  for (const auto& s : r.tri.simplices) {
    double lo = 1e100, hi = -1e100;
    for (int v : s) {
      double side = plane_side(r, r.tri.vertices[v]);
      lo = std::min(lo, side);
      hi = std::max(hi, side);
    }
    if (lo >= -1e-9) CHECK(diameter(r.tri, s) <= delta + 1e-9);
    if (lo < -1e-9) CHECK(hi <= 1e-9);
  }
}

}  // namespace

TEST_CASE("square corners plus center give the four-triangle fan") {
  LiftedTriangulation t = delaunay_lift(
      {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}});
  CHECK(t.tri.simplices.size() == 4);
  for (const auto& s : t.tri.simplices) {
    CHECK(std::find(s.begin(), s.end(), 4) != s.end());  // fan around center
  }
  CHECK(volume_sum(t.tri) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("d+1 points give a single simplex with a linear witness") {
  LiftedTriangulation t = delaunay_lift({{0, 0}, {2, 0}, {0, 3}});
  REQUIRE(t.tri.simplices.size() == 1);
  CHECK(hinge_gaps(t.tri, t.witness).empty());
  // Linear interpolation at the edge midpoint equals the value average.
  double mid = pl_eval(t.tri, t.witness, {1.0, 0.0});
  CHECK(mid == doctest::Approx((0.0 + 4.0) / 2).epsilon(1e-12));
}

TEST_CASE("random clouds satisfy the empty-circumball oracle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d = 2; d <= 3; ++d) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<std::vector<double>> pts;
      for (int i = 0; i < 25; ++i) {
        std::vector<double> p(d);
        for (double& x : p) x = u(rng);
        pts.push_back(p);
      }
      LiftedTriangulation t = delaunay_lift(pts, trial);
      CHECK_FALSE(t.tri.jittered);
      CHECK(circumball_margin(t.tri) > 1e-10);
      // Hinges of the paraboloid lift are strictly convex.
      for (double g : hinge_gaps(t.tri, t.witness)) CHECK(g > 1e-12);
    }
  }
}

TEST_CASE("degenerate input is jittered and reported") {
  // A perfect 3x3 grid is massively cocircular.
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) pts.push_back({double(i), double(j)});
  }
  LiftedTriangulation t = delaunay_lift(pts, 7);
  CHECK(t.tri.jittered);
  CHECK(circumball_margin(t.tri) > 0);
  CHECK(volume_sum(t.tri) == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("witness is linear on simplices and strictly convex across hinges") {
  RefinedTriangulation r =
      refine_near_face({{0, 0}, {1, 1}}, 1, 0.75, 0.2, 3);
  for (double g : hinge_gaps(r.tri, r.witness)) CHECK(g > 1e-12);
  // Linearity: centroid value equals the vertex average on each simplex.
  for (const auto& s : r.tri.simplices) {
    std::vector<double> centroid(2, 0.0);
    double avg = 0;
    for (int v : s) {
      for (int k = 0; k < 2; ++k) centroid[k] += r.tri.vertices[v][k] / 3.0;
      avg += r.witness.values[v] / 3.0;
    }
    CHECK(pl_eval(r.tri, r.witness, centroid) ==
          doctest::Approx(avg).epsilon(1e-12));
  }
  // Midpoint of two vertices in different simplices dips strictly below the
  // chord (convexity is strict across hinges).
  double v00 = pl_eval(r.tri, r.witness, {0, 0});
  double v11 = pl_eval(r.tri, r.witness, {1, 1});
  CHECK(pl_eval(r.tri, r.witness, {0.5, 0.5}) < (v00 + v11) / 2 - 1e-9);
}

TEST_CASE("refined square: diameter and separation properties") {
  const double delta = 0.2;
  RefinedTriangulation r =
      refine_near_face({{0, 0}, {1, 1}}, 1, 0.75, delta, 5);
  check_refinement(r, delta);
  CHECK(volume_sum(r.tri) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(circumball_margin(r.tri) > 1e-10);
  // Only the two bottom corners sit below the refined region.
  int below = 0;
  for (const auto& v : r.tri.vertices) {
    if (v[1] < 0.5) {
      ++below;
      CHECK(v[1] == 0.0);
    }
  }
  CHECK(below == 2);
}

TEST_CASE("refined cube: diameter and separation properties") {
  const double delta = 0.45;
  RefinedTriangulation r =
      refine_near_face({{0, 0, 0}, {1, 1, 1}}, 2, 0.5, delta, 11);
  check_refinement(r, delta);
  CHECK(volume_sum(r.tri) == doctest::Approx(1.0).epsilon(1e-9));
  // The cube's own corners are exactly cocircular on its facets, so only a
  // non-negative margin can be demanded here (ties are structural).
  CHECK(circumball_margin(r.tri) > -1e-9);
}

TEST_CASE("huge delta with the region covering the box is plain Delaunay") {
  RefinedTriangulation r = refine_near_face({{0, 0}, {1, 1}}, 1, -1.0, 10.0, 1);
  CHECK(r.tri.vertices.size() == 4);
  CHECK(r.tri.simplices.size() == 2);
  CHECK(volume_sum(r.tri) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oversized delta for a thin region is refused") {
  CHECK_THROWS(refine_near_face({{0, 0}, {1, 1}}, 1, 0.2, 0.9, 0));
}

TEST_CASE("pl_eval rejects points outside the polytope") {
  LiftedTriangulation t = delaunay_lift({{0, 0}, {1, 0}, {0, 1}});
  CHECK_THROWS(pl_eval(t.tri, t.witness, {0.9, 0.9}));
}

TEST_CASE("json round trip") {
  RefinedTriangulation r = refine_near_face({{0, 0}, {1, 1}}, 1, 0.75, 0.2, 5);
  nlohmann::json j = triangulation_to_json(r.tri, &r.witness);
  LiftedTriangulation back = triangulation_from_json(j);
  CHECK(back.tri.vertices == r.tri.vertices);
  CHECK(back.tri.simplices == r.tri.simplices);
  CHECK(back.witness.values == r.witness.values);
}
