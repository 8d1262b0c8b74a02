#pragma once

#include <optional>
#include <string>
#include <vector>

#include "brs/sets.hpp"

namespace brs {

// A k-flag in dimension d <= 2, given by its lowest subspace. For d = 1 and
// k = 0 the flag is a point with the right half-line positive. For d = 2 the
// line through `base` has direction directions[0]; its positive half-plane is
// to the left, and for k = 0 the positive half-line points along the direction.
struct Flag {
  int k = 0;
  ModuleVector base;
  std::vector<ModuleVector> directions;
  std::vector<int> orientations;
};

// H_Phi over one Z*alpha + Z^d orbit of flags. The value is q times a
// reference magnitude: 1 for k = 0, the length of `reference` for a line
// orbit. Parallel module vectors are rational multiples of each other, so q
// is exact.
struct HadwigerEntry {
  Flag representative;
  Rational q;
  ModuleVector reference;  // zero vector for k = 0
  std::string ref_magnitude;
};

struct HadwigerReport {
  std::vector<HadwigerEntry> entries;  // nonzero orbits only
  bool all_zero = true;
};

// Interval unions (d = 1) and polygons, module parallelograms, zonogons,
// framed polygons and disjoint unions thereof (d = 2). rank < 0 computes all
// ranks. Throws non_module_coordinates for numeric-only sets and
// unsupported_shape for d > 2.
HadwigerReport hadwiger(const SetDescription& s, const AlphaContext& ctx, int rank = -1);

// H(A) = H(B) for every flag, computed on the formal difference A - B. For
// two intervals of equal length the interval-pair criterion (length or offset
// in Z*alpha + Z) is reported as well.
struct HadwigerComparison {
  bool equal = false;
  HadwigerReport difference;
  std::optional<bool> interval_criterion;
};
HadwigerComparison compare_hadwiger(const SetDescription& a, const SetDescription& b, const AlphaContext& ctx);

// Perfect matching sigma with b_sigma(j) - a_j in Z*alpha + Z.
struct OrenResult {
  bool brs = false;
  std::vector<int> sigma;
};
OrenResult oren_test(const IntervalUnion1D& s);

struct EdgePairWitness {
  int e = 0, e_opposite = 0;        // edge indices (edge i runs from vertex i to i+1)
  bool common_lattice_points = false;  // condition (i)
  std::optional<Rational> u;           // p' - p - u*e is a lattice vector, u in [0, 2]
  bool midpoints_differ_by_lattice = false;
  bool edges_in_lattice = false;
  bool condition_ii = false;
};

struct ConvexPolygonReport {
  bool brs = false;
  bool centrally_symmetric = false;
  std::vector<EdgePairWitness> pairs;
  std::string failure;
};
// Throws non_convex if the polygon is not convex.
ConvexPolygonReport convex_polygon_test(const Polygon2D& s, const AlphaContext& ctx);

// Every vertex has another vertex at a lattice difference.
bool vertex_pairing_test(const std::vector<ModuleVector>& vertices);
// Vertices of polygons, parallelepipeds, polyhedra and planar zonotopes.
std::optional<std::vector<ModuleVector>> polytope_vertices(const SetDescription& s, const AlphaContext& ctx);

// Box with the given side lengths: one length in Z*alpha_j + Z, all others in Z.
bool box_test(const std::vector<ScalarModule>& lengths);

struct SymmetryReport {
  bool central_symmetric = false;
  bool faces_symmetric = false;
  std::optional<bool> zonohedron_brs;  // set when all vertices are lattice members
};
// Throws non_manifold unless every edge is shared by exactly two faces with
// opposite orientations.
SymmetryReport symmetry_tests(const Polyhedron3D& s);

}  // namespace brs
