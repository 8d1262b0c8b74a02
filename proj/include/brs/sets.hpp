#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "brs/module.hpp"

namespace brs {

// Theorem name plus free-form parameters; printed by the CLI as provenance.
struct Certificate {
  std::string theorem;
  std::vector<std::pair<std::string, std::string>> params;
};

struct Interval {
  ScalarModule a, b;  // [a, b)
};

struct IntervalUnion1D {
  std::vector<Interval> intervals;
};

struct Polygon2D {
  std::vector<ModuleVector> vertices;  // counterclockwise
};

struct Parallelepiped {
  ModuleVector base;
  std::vector<ModuleVector> gens;
};

struct Zonotope {
  ModuleVector base;
  std::vector<ModuleVector> gens;
};

// Convex polyhedron in R^3; each face lists vertex indices counterclockwise
// when seen from outside.
struct Polyhedron3D {
  std::vector<ModuleVector> vertices;
  std::vector<std::vector<int>> faces;
};

// Iterated cylinder over an interval, described relative to the rotation at
// each level so that it can be realized for any alpha. Level k (dimension k+1)
// carries v = q*rho + p where rho is the rotation at that level; the rotation
// one level down is v_0 / v_last (or the first k components of rho when the
// level is a prism, v = e_last). The base interval is
// [start, start + base_q*rho_1 + base_p) with start = start_q*rho_1 + start_p.
struct CylinderLevel {
  bool prism = false;
  long q = 0;
  std::vector<long> p;
};

struct CylinderRecipe {
  long base_q = 0;
  long base_p = 0;
  Rational start_q = 0;
  Rational start_p = 0;
  std::vector<CylinderLevel> levels;  // bottom (dimension 2) first
  int dim() const { return 1 + static_cast<int>(levels.size()); }
};

// Parallelepiped known only numerically (Szusz/Liardet cylinders, real shears).
struct RealParallelepiped {
  std::vector<double> base;
  std::vector<std::vector<double>> gens;
  std::optional<CylinderRecipe> recipe;
};

// {frame.base + sum t_i frame.gens[i] : t_i in [0,1) for i != j,k and
// (t_j, t_k) in region}, region a convex rational polygon (counterclockwise).
// Produced by parallelepiped shears.
struct FramedPolygon {
  Parallelepiped frame;
  int j = 0, k = 1;
  std::vector<std::pair<Rational, Rational>> region;
};

struct SetDescription;

struct DisjointUnion {
  std::vector<SetDescription> members;
};

using Shape = std::variant<IntervalUnion1D, Polygon2D, Parallelepiped, Zonotope, Polyhedron3D,
                           RealParallelepiped, FramedPolygon, DisjointUnion>;

struct SetDescription {
  Shape shape;
  std::optional<Certificate> certificate;

  SetDescription() = default;
  template <class T>
  SetDescription(T s, std::optional<Certificate> cert = std::nullopt)
      : shape(std::move(s)), certificate(std::move(cert)) {}

  int dim() const;
  bool is_exact() const;  // false if any part is numeric-only
  std::string kind() const;
};

struct BBox {
  std::vector<double> lo, hi;
};

int set_dim(const Shape& s);
BBox bounding_box(const SetDescription& s, const AlphaContext& ctx);

// chi_S(x) = #{k in Z^d : x + k in S}; half-open conventions.
int multiplicity(const SetDescription& s, const std::vector<double>& x, const AlphaContext& ctx);

ScalarModule volume_symbolic(const SetDescription& s, const AlphaContext& ctx);
double volume_numeric(const SetDescription& s, const AlphaContext& ctx);

// (S - S) cap Z^d = {0}; parallelepipeds and interval unions only.
bool is_simple(const SetDescription& s, const AlphaContext& ctx);

// Numeric-only parts are shifted by the evaluated vector; cylinder recipes are
// dropped since they describe the untranslated position.
SetDescription translate(const SetDescription& s, const ModuleVector& v, const AlphaContext& ctx);

// Structural checks of the documented invariants (orientation, simplicity of
// polygons, nonzero volume, sorted disjoint intervals). Throws on violation.
void validate(const SetDescription& s, const AlphaContext& ctx);

// Exact 2D helpers.
ScalarModule polygon_area(const std::vector<ModuleVector>& verts);  // signed
bool is_convex_ccw(const Polygon2D& p, const AlphaContext& ctx);
// Drops repeated and collinear vertices and orients counterclockwise.
Polygon2D normalize_polygon(std::vector<ModuleVector> verts, const AlphaContext& ctx);
Polygon2D zonogon_polygon(const Zonotope& z, const AlphaContext& ctx);
Polygon2D parallelogram_polygon(const Parallelepiped& p, const AlphaContext& ctx);
std::optional<Polygon2D> as_polygon(const SetDescription& s, const AlphaContext& ctx);
// Shephard tiling of a zonotope by parallelepipeds, one per independent
// d-subset of generators, each based at a sum of generators.
std::vector<Parallelepiped> shephard_tiling(const Zonotope& z, const AlphaContext& ctx,
                                            unsigned seed = 0);
// Module point of a frame at rational coordinates.
ModuleVector frame_point(const Parallelepiped& frame, const std::vector<Rational>& t);

// Realize a cylinder recipe for alpha: geometry plus the rotation at each level
// (rotations[0] is the 1D rotation, rotations.back() == alpha).
struct RealizedCylinder {
  RealParallelepiped geometry;
  std::vector<std::vector<double>> rotations;
  double base_length = 0.0;
};
RealizedCylinder realize_cylinder(const CylinderRecipe& r, const std::vector<double>& alpha);

}  // namespace brs
