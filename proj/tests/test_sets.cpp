#include <cmath>
#include <random>

#include "brs/error.hpp"
#include "brs/indicator.hpp"
#include "brs/sets.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace brs;
using brs_test::rand_int;
using brs_test::rand_unit;

namespace {

ModuleVector iv(std::vector<long> m, long r = 0) { return ModuleVector::integer(m, r); }

SetDescription unit_cube(int d) {
  Parallelepiped p{ModuleVector(d), {}};
  for (int i = 0; i < d; ++i) p.gens.push_back(ModuleVector::unit(d, i));
  return p;
}

SetDescription interval(const Rational& a, const Rational& b) {
  return IntervalUnion1D{{{ScalarModule::constant(1, a), ScalarModule::constant(1, b)}}};
}

double frac(double x) { return x - std::floor(x); }

// Point-in-parallelepiped in R^d (no reduction mod 1), by solving the 2x2 or 3x3
// system with Cramer's rule.
bool in_par_plain(const Parallelepiped& p, const std::vector<double>& y, const AlphaContext& ctx) {
  const int d = p.base.dim();
  auto b = p.base.to_double(ctx);
  std::vector<std::vector<double>> g;
  for (auto& v : p.gens) g.push_back(v.to_double(ctx));
  auto det = [&](const std::vector<std::vector<double>>& c) {
    if (d == 2) return c[0][0] * c[1][1] - c[0][1] * c[1][0];
    return c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) -
           c[1][0] * (c[0][1] * c[2][2] - c[0][2] * c[2][1]) +
           c[2][0] * (c[0][1] * c[1][2] - c[0][2] * c[1][1]);
  };
  double D = det(g);
  std::vector<double> z(d);
  for (int i = 0; i < d; ++i) z[i] = y[i] - b[i];
  for (int k = 0; k < d; ++k) {
    auto c = g;
    c[k] = z;
    double t = det(c) / D;
    if (t < 0 || t >= 1) return false;
  }
  return true;
}

std::vector<SetDescription> sample_sets(std::mt19937_64& rng, const AlphaContext& c2,
                                        const AlphaContext& c3) {
  (void)c3;
  std::vector<SetDescription> out;
  // Module parallelograms and a d=3 parallelepiped with lattice generators.
  for (int tries = 0; out.size() < 3 && tries < 100; ++tries) {
    Parallelepiped p{brs_test::rand_module(rng, 2, 3, 4),
                     {brs_test::rand_lattice(rng, 2, 2), brs_test::rand_lattice(rng, 2, 2)}};
    if (std::fabs(det_module(p.gens).to_double(c2)) > 0.05) out.push_back(p);
  }
  out.push_back(Parallelepiped{iv({0, 0, 0}), {iv({0, 0, 0}, 1), iv({0, 1, 0}), iv({1, 1, 1})}});
  // Module triangle and quadrilateral.
  out.push_back(Polygon2D{{ModuleVector(0, {0, 0}), ModuleVector(1, {0, 0}),
                           ModuleVector(Rational(1, 2), {0, 1})}});
  out.push_back(Polygon2D{{ModuleVector(0, {0, 0}), ModuleVector(0, {2, 0}),
                           ModuleVector(1, {1, 0}), ModuleVector(0, {0, Rational(3, 2)})}});
  out.push_back(Zonotope{ModuleVector(2), {iv({1, 0}), iv({0, 1}), ModuleVector::alpha(2)}});
  out.push_back(Zonotope{ModuleVector(3),
                         {iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1}), ModuleVector::alpha(3)}});
  out.push_back(FramedPolygon{
      Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}},
      0,
      1,
      {{0, 0}, {1, 0}, {Rational(1, 2), 1}}});
  out.push_back(Polyhedron3D{{iv({0, 0, 0}), iv({2, 0, 0}), iv({0, 1, 0}), ModuleVector(1, {0, 0, 0})},
                             {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}});
  out.push_back(DisjointUnion{{interval(0, Rational(1, 3)),
                               IntervalUnion1D{{{ScalarModule::alpha(1, 0, 2),
                                                 ScalarModule::constant(1, 1) +
                                                     ScalarModule::alpha(1, 0)}}}}});
  return out;
}

AlphaContext ctx_for(int d) { return AlphaContext::standard(d); }

}  // namespace

TEST_CASE("multiplicity examples") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  CHECK(multiplicity(unit_cube(2), {0.3, 0.7}, c2) == 1);
  CHECK(multiplicity(unit_cube(2), {0.0, 0.0}, c2) == 1);
  auto c1 = AlphaContext::preset("sqrt2");
  CHECK(multiplicity(interval(0, Rational(3, 2)), {0.25}, c1) == 2);
  CHECK(multiplicity(interval(0, Rational(3, 2)), {0.75}, c1) == 1);
  SetDescription strip = Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}};
  CHECK(multiplicity(strip, {0.2, 0.9}, c2) == 1);
}

TEST_CASE("strip multiplicity matches the fractional-part oracle") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  SetDescription strip = Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}};
  Indicator ind(strip, c2);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    double x[2] = {4 * rand_unit(rng) - 2, 4 * rand_unit(rng) - 2};
    int want = frac(x[0]) < c2.alpha_d[0] ? 1 : 0;
    REQUIRE(ind.count(x) == want);
  }
}

TEST_CASE("volume_symbolic examples") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  CHECK(volume_symbolic(unit_cube(2), c2) == ScalarModule::constant(2, 1));
  SetDescription strip = Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}};
  CHECK(volume_symbolic(strip, c2) == ScalarModule::alpha(2, 0));
  SetDescription tri = Polygon2D{{iv({0, 0}), iv({1, 0}), iv({0, 1})}};
  CHECK(volume_symbolic(tri, c2) == ScalarModule::constant(2, Rational(1, 2)));
  // Orientation of the generators does not matter.
  SetDescription flipped = Parallelepiped{ModuleVector(2), {iv({0, 1}), ModuleVector::alpha(2)}};
  CHECK(volume_symbolic(flipped, c2) == ScalarModule::alpha(2, 0));
}

TEST_CASE("zonogon area: generator determinants against shoelace") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  Zonotope z{ModuleVector(2), {iv({1, 0}), iv({0, 1}), ModuleVector::alpha(2)}};
  // |det(e1,e2)| + |det(e1,a)| + |det(e2,a)| = 1 + a2 + a1.
  ScalarModule want(1, {1, 1});
  CHECK(volume_symbolic(z, c2) == want);
  Polygon2D hex = zonogon_polygon(z, c2);
  CHECK(hex.vertices.size() == 6);
  CHECK(polygon_area(hex.vertices) == want);
  CHECK(is_convex_ccw(hex, c2));

  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    Zonotope r{brs_test::rand_module(rng, 2, 3, 3), {}};
    int n = static_cast<int>(rand_int(rng, 2, 5));
    for (int i = 0; i < n; ++i) r.gens.push_back(brs_test::rand_module(rng, 2, 3, 3));
    ScalarModule v = volume_symbolic(r, c2);
    if (v.is_zero()) continue;
    Polygon2D pg = zonogon_polygon(r, c2);
    REQUIRE(polygon_area(pg.vertices) == v);
  }
}

TEST_CASE("is_simple examples") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c1 = AlphaContext::preset("sqrt2");
  CHECK(is_simple(unit_cube(2), c2));
  CHECK(is_simple(unit_cube(3), ctx_for(3)));
  CHECK_FALSE(is_simple(interval(0, Rational(3, 2)), c1));
  CHECK(is_simple(interval(0, 1), c1));
  SetDescription p = Parallelepiped{ModuleVector(2), {iv({0, -1}), ModuleVector::alpha(2)}};
  CHECK(is_simple(p, c2));
  SetDescription big = Parallelepiped{ModuleVector(2), {iv({0, 1}), ModuleVector::alpha(2, 3)}};
  CHECK_FALSE(is_simple(big, c2));
  CHECK_THROWS_AS(is_simple(Zonotope{ModuleVector(2), {iv({1, 0}), iv({0, 1})}}, c2), Error);
}

TEST_CASE("interval is_simple against rational brute force") {
  auto c1 = AlphaContext::preset("sqrt2");
  std::mt19937_64 rng(3);
  for (int it = 0; it < 500; ++it) {
    int n = static_cast<int>(rand_int(rng, 1, 3));
    std::vector<Rational> pts;
    for (int i = 0; i < 2 * n; ++i) pts.push_back(canonical(Rational(rand_int(rng, -20, 40), 12)));
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end()) continue;
    IntervalUnion1D u;
    for (int i = 0; i < n; ++i)
      u.intervals.push_back({ScalarModule::constant(1, pts[2 * i]),
                             ScalarModule::constant(1, pts[2 * i + 1])});
    bool want = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = -6; k <= 6; ++k) {
          if (i == j && k == 0) continue;
          // [a_i,b_i) meets [a_j+k, b_j+k)?
          if (pts[2 * i] < pts[2 * j + 1] + k && pts[2 * j] + k < pts[2 * i + 1]) want = false;
        }
    REQUIRE(is_simple(u, c1) == want);
  }
}

TEST_CASE("parallelepiped is_simple agrees with sampled overlaps") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  std::mt19937_64 rng(17);
  int simple_seen = 0, overlap_seen = 0;
  for (int it = 0; it < 60; ++it) {
    Parallelepiped p{ModuleVector(2),
                     {brs_test::rand_lattice(rng, 2, 1), brs_test::rand_lattice(rng, 2, 1)}};
    double det = det_module(p.gens).to_double(c2);
    if (std::fabs(det) < 0.02) continue;
    bool simple = is_simple(p, c2);
    Indicator ind(p, c2);
    int mx = 0;
    for (int i = 0; i < 4000; ++i) {
      double x[2] = {rand_unit(rng), rand_unit(rng)};
      mx = std::max(mx, ind.count(x));
    }
    if (mx >= 2) {
      REQUIRE_FALSE(simple);
      ++overlap_seen;
    }
    if (simple) ++simple_seen;
    // Volume above 1 forces overlaps.
    if (std::fabs(det) > 1) REQUIRE_FALSE(simple);
  }
  CHECK(simple_seen > 0);
  CHECK(overlap_seen > 0);
}

TEST_CASE("property: Monte Carlo volume within 3 standard errors") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  std::mt19937_64 rng(2024);
  auto sets = sample_sets(rng, c2, c3);
  for (const auto& s : sets) {
    const AlphaContext& ctx = s.dim() == 1 ? c1 : s.dim() == 2 ? c2 : c3;
    Indicator ind(s, ctx);
    const int n = 100000;
    double sum = 0, sum2 = 0;
    std::vector<double> x(s.dim());
    for (int i = 0; i < n; ++i) {
      for (auto& xi : x) xi = rand_unit(rng);
      double c = ind.count(x);
      sum += c;
      sum2 += c * c;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    double se = std::sqrt(std::max(var, 1e-12) / n);
    double vol = volume_symbolic(s, ctx).to_double(ctx);
    INFO(s.kind() << " mean " << mean << " vol " << vol << " se " << se);
    CHECK(std::fabs(mean - vol) <= 3 * se + 1e-9);
    CHECK(std::fabs(volume_numeric(s, ctx) - vol) < 1e-12);
  }
}

TEST_CASE("property: translation shifts multiplicity and keeps volume") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  std::mt19937_64 rng(99);
  auto sets = sample_sets(rng, c2, c3);
  for (const auto& s : sets) {
    const int d = s.dim();
    const AlphaContext& ctx = d == 1 ? c1 : d == 2 ? c2 : c3;
    ModuleVector v = brs_test::rand_module(rng, d, 5, 7);
    SetDescription t = translate(s, v, ctx);
    CHECK(volume_symbolic(t, ctx) == volume_symbolic(s, ctx));
    Indicator a(s, ctx), b(t, ctx);
    auto vd = v.to_double(ctx);
    int mismatches = 0;
    std::vector<double> x(d), y(d);
    for (int i = 0; i < 1000; ++i) {
      for (int k = 0; k < d; ++k) {
        x[k] = rand_unit(rng);
        y[k] = x[k] - vd[k];
      }
      if (a.near_boundary(y.data(), 1e-9)) continue;
      if (b.count(x) != a.count(y)) ++mismatches;
    }
    INFO(s.kind());
    CHECK(mismatches == 0);
  }
}

TEST_CASE("property: simple sets have multiplicity at most one") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  std::vector<std::pair<SetDescription, const AlphaContext*>> cases = {
      {unit_cube(2), &c2},
      {Parallelepiped{ModuleVector(2), {iv({0, -1}), ModuleVector::alpha(2)}}, &c2},
      {Parallelepiped{ModuleVector(Rational(1, 3), {5, -2}), {iv({1, 0}), ModuleVector::alpha(2)}}, &c2},
      {interval(Rational(-1, 4), Rational(1, 2)), &c1},
      {IntervalUnion1D{{{ScalarModule::constant(1, 0), ScalarModule::alpha(1, 0)},
                        {ScalarModule::constant(1, Rational(1, 2)),
                         ScalarModule::constant(1, Rational(3, 5))}}},
       &c1},
  };
  std::mt19937_64 rng(4);
  for (auto& [s, ctx] : cases) {
    REQUIRE(is_simple(s, *ctx));
    Indicator ind(s, *ctx);
    std::vector<double> x(s.dim());
    for (int i = 0; i < 10000; ++i) {
      for (auto& xi : x) xi = rand_unit(rng);
      REQUIRE(ind.count(x) <= 1);
    }
  }
}

TEST_CASE("Shephard tiles are interior-disjoint and fill the zonotope") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  std::vector<std::pair<Zonotope, const AlphaContext*>> cases = {
      {Zonotope{ModuleVector(2), {iv({1, 0}), iv({0, 1})}}, &c2},
      {Zonotope{ModuleVector(2), {iv({1, 0}), iv({0, 1}), ModuleVector::alpha(2)}}, &c2},
      {Zonotope{ModuleVector(2), {ModuleVector::alpha(2), iv({2, 0}), iv({0, 1})}}, &c2},
      {Zonotope{ModuleVector(2), {iv({1, 0}), iv({0, 1}), iv({1, 1}), iv({1, -2}, 1)}}, &c2},
      {Zonotope{ModuleVector(3), {iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1}), ModuleVector::alpha(3)}},
       &c3},
  };
  std::mt19937_64 rng(8);
  for (auto& [z, ctx] : cases) {
    const int d = z.base.dim();
    auto tiles = shephard_tiling(z, *ctx);
    size_t indep = 0;
    // Count independent d-subsets directly.
    const size_t n = z.gens.size();
    std::vector<int> sel(n, 0);
    std::fill(sel.end() - d, sel.end(), 1);
    ScalarModule total(d);
    do {
      std::vector<ModuleVector> sub;
      for (size_t i = 0; i < n; ++i)
        if (sel[i]) sub.push_back(z.gens[i]);
      ScalarModule det = det_module(sub);
      if (!det.is_zero()) {
        ++indep;
        total += abs(det, *ctx);
      }
    } while (std::next_permutation(sel.begin(), sel.end()));
    CHECK(tiles.size() == indep);
    ScalarModule tv(d);
    for (auto& t : tiles) tv += abs(det_module(t.gens), *ctx);
    CHECK(tv == total);

    BBox bb = bounding_box(SetDescription(z), *ctx);
    double boxvol = 1;
    for (int i = 0; i < d; ++i) boxvol *= bb.hi[i] - bb.lo[i];
    int hits = 0;
    const int samples = 40000;
    std::vector<double> y(d);
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < d; ++i) y[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * rand_unit(rng);
      int c = 0;
      for (auto& t : tiles) c += in_par_plain(t, y, *ctx);
      REQUIRE(c <= 1);
      hits += c;
    }
    double est = boxvol * hits / samples;
    double se = boxvol * std::sqrt(0.25 / samples);
    CHECK(std::fabs(est - total.to_double(*ctx)) < 4 * se);
    if (d == 2) {
      // Against the zonogon as a polygon, modulo nothing (plane membership).
      Polygon2D pg = zonogon_polygon(z, *ctx);
      CHECK(polygon_area(pg.vertices) == total);
    }
  }
}

TEST_CASE("validate rejects malformed sets") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c1 = AlphaContext::preset("sqrt2");
  // Clockwise.
  CHECK_THROWS_AS(validate(Polygon2D{{iv({0, 0}), iv({0, 1}), iv({1, 0})}}, c2), Error);
  // Bow tie.
  CHECK_THROWS_AS(validate(Polygon2D{{iv({0, 0}), iv({1, 1}), iv({1, 0}), iv({0, 1})}}, c2), Error);
  // Collinear consecutive vertices.
  CHECK_THROWS_AS(validate(Polygon2D{{iv({0, 0}), iv({1, 0}), iv({2, 0}), iv({0, 1})}}, c2), Error);
  CHECK_NOTHROW(validate(Polygon2D{{iv({0, 0}), iv({1, 0}), iv({0, 1})}}, c2));
  // Degenerate parallelogram.
  CHECK_THROWS_AS(
      validate(Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), ModuleVector::alpha(2, 2)}}, c2),
      Error);
  // Overlapping intervals.
  CHECK_THROWS_AS(validate(IntervalUnion1D{{{ScalarModule::constant(1, 0), ScalarModule::constant(1, 1)},
                                            {ScalarModule::constant(1, Rational(1, 2)),
                                             ScalarModule::constant(1, 2)}}},
                           c1),
                  Error);
  CHECK_THROWS_AS(volume_symbolic(RealParallelepiped{{0, 0}, {{1, 0}, {0, 1}}, std::nullopt}, c2), Error);
}

TEST_CASE("normalize_polygon removes collinear points and fixes orientation") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  Polygon2D p = normalize_polygon({iv({0, 0}), iv({0, 1}), iv({1, 1}), iv({1, 1}), iv({2, 1}), iv({2, 0})}, c2);
  CHECK(p.vertices.size() == 4);
  CHECK(sign(polygon_area(p.vertices), c2) > 0);
  CHECK(polygon_area(p.vertices) == ScalarModule::constant(2, 2));
}

TEST_CASE("realize_cylinder: Szusz parallelogram") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  // v = alpha + (0, 1): rho_1 = a1 / (a2 + 1); base [0, rho_1).
  CylinderRecipe r;
  r.base_q = 1;
  r.base_p = 0;
  r.levels.push_back({false, 1, {0, 1}});
  auto rc = realize_cylinder(r, c2.alpha_d);
  double a1 = c2.alpha_d[0], a2 = c2.alpha_d[1];
  REQUIRE(rc.rotations.size() == 2);
  CHECK(rc.rotations[0][0] == doctest::Approx(a1 / (a2 + 1)).epsilon(1e-14));
  CHECK(rc.base_length == doctest::Approx(a1 / (a2 + 1)).epsilon(1e-14));
  REQUIRE(rc.geometry.gens.size() == 2);
  CHECK(rc.geometry.gens[0][0] == doctest::Approx(a1 / (a2 + 1)));
  CHECK(rc.geometry.gens[0][1] == 0.0);
  CHECK(rc.geometry.gens[1][0] == doctest::Approx(a1));
  CHECK(rc.geometry.gens[1][1] == doctest::Approx(a2 + 1));
  // Area is l * v_2 = a1.
  SetDescription s = rc.geometry;
  CHECK(volume_numeric(s, c2) == doctest::Approx(a1).epsilon(1e-12));

  CylinderRecipe bad = r;
  bad.base_q = 0;
  bad.base_p = 0;
  CHECK_THROWS_AS(realize_cylinder(bad, c2.alpha_d), Error);
}

TEST_CASE("FramedPolygon as polygon") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  FramedPolygon f{Parallelepiped{ModuleVector(2), {iv({1, 0}), iv({1, 1})}},
                  0,
                  1,
                  {{0, 0}, {1, 0}, {1, 1}}};
  auto p = as_polygon(f, c2);
  REQUIRE(p.has_value());
  CHECK(p->vertices.size() == 3);
  CHECK(polygon_area(p->vertices) == ScalarModule::constant(2, Rational(1, 2)));
  CHECK(volume_symbolic(f, c2) == ScalarModule::constant(2, Rational(1, 2)));
}
