#pragma once

#include <optional>
#include <string>
#include <vector>

#include "brs/sets.hpp"
#include "brs/transfer.hpp"

namespace brs {

// piece + shift is part of the target; shift lies in Z*alpha + Z^d.
struct DecompositionPiece {
  SetDescription piece;
  ModuleVector shift;
};

// ---------------------------------------------------------------- interval algebra

// s - floor(s), decided exactly.
ScalarModule torus_reduce(const ScalarModule& s, const AlphaContext& ctx);
// Sorted, nonempty, with overlapping or touching intervals merged.
IntervalUnion1D canonical_union(std::vector<Interval> intervals, const AlphaContext& ctx);
IntervalUnion1D interval_union(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx);
IntervalUnion1D interval_intersection(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx);
IntervalUnion1D interval_difference(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx);
IntervalUnion1D shift_union(const IntervalUnion1D& a, const ScalarModule& t);
bool same_set(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx);
ScalarModule total_length(const IntervalUnion1D& a);

// Integer-valued step function on T^1. breakpoints[0] = 0; values[i] holds on
// [breakpoints[i], breakpoints[i+1]) with the last cell ending at 1.
struct StepFunctionTorus1D {
  std::vector<ScalarModule> breakpoints;
  std::vector<long> values;

  static StepFunctionTorus1D multiplicity(const IntervalUnion1D& s, const AlphaContext& ctx);
  long at(const ScalarModule& x, const AlphaContext& ctx) const;
  // x -> f(x + t)
  StepFunctionTorus1D shifted(const ScalarModule& t, const AlphaContext& ctx) const;
  ScalarModule integral() const;
  // Merges equal neighbouring cells.
  StepFunctionTorus1D simplified() const;
};

StepFunctionTorus1D pointwise_min(const StepFunctionTorus1D& f, const StepFunctionTorus1D& g, const AlphaContext& ctx);
bool same_function(const StepFunctionTorus1D& f, const StepFunctionTorus1D& g, const AlphaContext& ctx);

// ---------------------------------------------------------------- decompositions

// Iterative equidecomposition of two interval unions of equal measure that
// both pass oren_test. Shifts are n*alpha + k with n >= 0. Throws
// unequal_measures, oren_failure, or n_max_exceeded.
std::vector<DecompositionPiece> decompose_1d(const IntervalUnion1D& a, const IntervalUnion1D& b,
                                             const AlphaContext& ctx, long n_max = 10000);

struct ShearDecomposition {
  std::vector<DecompositionPiece> pieces;  // FramedPolygon pieces of P
  Parallelepiped target;                  // gens with v_k replaced by v_k + s*v_j
};
// P to its shear v_k -> v_k + s*v_j; v_j must be a lattice vector.
ShearDecomposition shear_decompose(const Parallelepiped& p, int j, int k, const Rational& s, const AlphaContext& ctx);

struct PolygonDecomposition {
  std::vector<DecompositionPiece> pieces;  // convex Polygon2D pieces of S
  SetDescription target;                   // disjoint union of lattice parallelograms
  int levels = 0;
};
// Requires convex_polygon_test(S).brs; throws test_failure otherwise and
// degenerate_geometry if an intermediate cut leaves the module.
PolygonDecomposition decompose_convex_polygon(const Polygon2D& s, const AlphaContext& ctx);

struct VerificationResult {
  bool ok = false;
  std::string failed_check;  // "shift", "measure", "source", "target", "unsupported"
  std::string detail;
};
// Exact: shifts in the lattice, equal total measure, pieces disjoint inside A
// and, after shifting, disjoint inside B. 2D inputs must be convex polygons or
// disjoint unions of them; in d >= 3 only shears of one frame are supported.
VerificationResult verify_decomposition(const SetDescription& a, const SetDescription& b,
                                        const std::vector<DecompositionPiece>& pieces, const AlphaContext& ctx);

// Transfer of B from that of A through a decomposition; throws
// unverified_decomposition unless verify_decomposition passes.
TransferFn chain_transfer(TransferFn g_source, const SetDescription& a, const SetDescription& b,
                          const std::vector<DecompositionPiece>& pieces, const AlphaContext& ctx);

// ---------------------------------------------------------------- planar geometry

// Convex polygon clipped to the closed left side of the directed line through
// a with direction dir. Throws degenerate_geometry if a new vertex would not
// be a module vector.
std::vector<ModuleVector> clip_left(const std::vector<ModuleVector>& poly, const ModuleVector& a,
                                    const ModuleVector& dir, const AlphaContext& ctx);
std::vector<ModuleVector> intersect_convex(const std::vector<ModuleVector>& p, const std::vector<ModuleVector>& q,
                                           const AlphaContext& ctx);
// Interiors disjoint (separating edge line), decided exactly.
bool interiors_disjoint(const std::vector<ModuleVector>& p, const std::vector<ModuleVector>& q,
                        const AlphaContext& ctx);
// p inside the closed convex polygon q.
bool convex_contains(const std::vector<ModuleVector>& q, const std::vector<ModuleVector>& p, const AlphaContext& ctx);

}  // namespace brs
