#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace eqidx {

// Simplicial subdivision of a convex polytope in R^d, d <= 3. Simplex
// entries are sorted vertex indices; the simplex list is sorted for
// deterministic output.
struct Triangulation {
  int dimension = 0;
  std::vector<std::vector<double>> vertices;
  std::vector<std::vector<int>> simplices;
  bool jittered = false;  // genericity fallback was engaged
};

// Values of a convex piecewise-linear function at the triangulation's
// vertices; the function itself is the simplexwise-linear interpolant and is
// linear precisely on the simplices when every interior hinge is strict.
struct ConvexPLWitness {
  std::vector<double> values;
};

struct LiftedTriangulation {
  Triangulation tri;
  ConvexPLWitness witness;
};

// Delaunay triangulation of the convex hull of the points, obtained as the
// lower hull of the paraboloid lift; the witness holds the lift values
// |x|^2. If a near-cospherical degeneracy is detected the points are
// perturbed by a seeded jitter of magnitude 1e-7 and the construction is
// retried (reported via Triangulation::jittered).
LiftedTriangulation delaunay_lift(std::vector<std::vector<double>> points,
                                  std::uint64_t seed = 0);

// Axis-aligned box, the only polytope shape the refinement supports.
struct Box {
  std::vector<double> lo, hi;
};

struct RefinedTriangulation {
  Triangulation tri;
  ConvexPLWitness witness;
  // The realized cut plane: {x : cut_normal . x = cut_offset}, with the
  // refined region on the >= side.
  std::vector<double> cut_normal;
  double cut_offset = 0;
};

// Refined Delaunay triangulation of the box: the designated face is the
// upper facet x[axis] = hi[axis], and the separating hyperplane sits near
// x[axis] = offset (tilted by a tiny seeded amount to keep the cut vertices
// generic against the box corners). The region above the hyperplane receives
// a face-respecting delta/2-net whose off-hyperplane points keep a delta/2
// clearance from it; below it only the box corners remain. Every simplex
// inside the refined region then has diameter <= delta, and simplices with a
// vertex below the hyperplane stay out of the region's relative interior.
// offset <= lo[axis] makes the refined region the whole box (no cut plane).
RefinedTriangulation refine_near_face(const Box& box, int axis, double offset,
                                      double delta, std::uint64_t seed = 0);

// Barycentric evaluation of the witness at a point of the polytope.
double pl_eval(const Triangulation& tri, const ConvexPLWitness& witness,
               const std::vector<double>& x);

// Smallest distance-minus-radius over all (simplex circumball, non-member
// vertex) pairs; positive means every circumball is strictly empty.
double circumball_margin(const Triangulation& tri);

// Convexity gap across every interior hinge (facet shared by two simplices):
// the witness value at the opposite vertex minus the adjacent simplex's
// affine extension there, minimized over both sides. All-positive gaps
// certify strict convexity across hinges.
std::vector<double> hinge_gaps(const Triangulation& tri,
                               const ConvexPLWitness& witness);

// Sum of simplex volumes (for the partition-of-the-polytope check).
double volume_sum(const Triangulation& tri);

nlohmann::json triangulation_to_json(const Triangulation& tri,
                                     const ConvexPLWitness* witness = nullptr);
LiftedTriangulation triangulation_from_json(const nlohmann::json& j);

}  // namespace eqidx
