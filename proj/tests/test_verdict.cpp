#include <random>

#include "brs/constructions.hpp"
#include "brs/discrepancy.hpp"
#include "brs/invariants.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace brs;

namespace {

ModuleVector iv(std::vector<long> m, long r = 0) { return ModuleVector::integer(m, r); }
ModuleVector qv(Rational x, Rational y) { return ModuleVector(0, {x, y}); }
ScalarModule q1(const Rational& v) { return ScalarModule::constant(1, v); }

SetDescription interval(const ScalarModule& a, const ScalarModule& b) {
  IntervalUnion1D u;
  u.intervals.push_back({a, b});
  return u;
}

VerdictOptions quick() {
  VerdictOptions o;
  o.report.starts = 8;
  o.report.N = 100000;
  o.report.seed = 3;
  return o;
}

VerdictOptions no_diag() {
  VerdictOptions o;
  o.run_diagnostic = false;
  return o;
}

Polyhedron3D box_polyhedron(Rational a, Rational b, Rational c) {
  Polyhedron3D p;
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) p.vertices.push_back(ModuleVector(0, {a * x, b * y, c * z}));
  p.faces = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  return p;
}

}  // namespace

TEST_CASE("verdicts in dimension one") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto half = brs_verdict(interval(q1(0), q1(Rational(1, 2))), c1, no_diag());
  CHECK(half.kind == VerdictKind::not_brs);
  CHECK(half.rule == "measure");

  auto hecke = brs_verdict(interval(q1(0), ScalarModule::alpha(1, 0)), c1, no_diag());
  CHECK(hecke.kind == VerdictKind::brs);
  CHECK(hecke.rule == "oren");

  // Total length 1/3 + 2/3 = 1 is admissible but the endpoints do not pair.
  IntervalUnion1D u;
  u.intervals = {{q1(0), q1(Rational(1, 3))}, {ScalarModule(Rational(1, 2), {1}), ScalarModule(Rational(7, 6), {1})}};
  auto v = brs_verdict(u, c1, no_diag());
  CHECK(v.kind == VerdictKind::not_brs);
  CHECK(v.rule == "oren");
}

TEST_CASE("verdicts in dimension two") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto hex = zonogon_polygon(Zonotope{ModuleVector(2), {ModuleVector::alpha(2), iv({1, 0}), iv({0, 1})}}, c2);
  auto h = brs_verdict(hex, c2, no_diag());
  CHECK(h.kind == VerdictKind::brs);
  CHECK(h.rule == "convex-polygon");

  Polygon2D sq{{qv(0, 0), qv(Rational(1, 3), 0), qv(Rational(1, 3), Rational(1, 3)), qv(0, Rational(1, 3))}};
  CHECK(brs_verdict(sq, c2, no_diag()).rule == "measure");

  // Area 2 rectangle of width 4, height 1/2: convex test fails condition (i).
  Polygon2D flat{{qv(0, 0), qv(4, 0), qv(4, Rational(1, 2)), qv(0, Rational(1, 2))}};
  auto f = brs_verdict(flat, c2, no_diag());
  CHECK(f.kind == VerdictKind::not_brs);
  CHECK(f.rule == "convex-polygon");

  // Non-convex, admissible area, nonvanishing invariant.
  Polygon2D step{{qv(0, 0), qv(2, 0), qv(2, Rational(1, 2)), qv(1, Rational(1, 2)), qv(1, Rational(3, 2)),
                  qv(0, Rational(3, 2))}};
  auto st = brs_verdict(step, c2, no_diag());
  CHECK(st.kind == VerdictKind::not_brs);
  CHECK(st.rule == "hadwiger");

  // Integer L-shape: every necessary condition holds but nothing decides it.
  Polygon2D ell{{qv(0, 0), qv(2, 0), qv(2, 1), qv(1, 1), qv(1, 2), qv(0, 2)}};
  auto l = brs_verdict(ell, c2, quick());
  CHECK(l.kind == VerdictKind::unknown);
  REQUIRE(l.diagnostic);
  CHECK(*l.diagnostic == Diagnostic::no_growth);

  auto sz = brs_verdict(szusz_parallelogram(ModuleVector(1, {0, 1}), 1, 0, c2), c2, no_diag());
  CHECK(sz.kind == VerdictKind::brs);
  CHECK(sz.rule == "certificate");
}

TEST_CASE("verdicts in dimension three") {
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  auto unknown = brs_verdict(box_polyhedron(Rational(1, 2), 2, 1), c3, no_diag());
  CHECK(unknown.kind == VerdictKind::unknown);
  CHECK_FALSE(unknown.diagnostic);

  Parallelepiped box{ModuleVector(3), {ModuleVector(0, {Rational(1, 2), 0, 0}), iv({0, 2, 0}), iv({0, 0, 1})}};
  auto b = brs_verdict(box, c3, no_diag());
  CHECK(b.kind == VerdictKind::not_brs);
  CHECK(b.rule == "box");
  Parallelepiped ibox{ModuleVector(3), {iv({2, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})}};
  CHECK(brs_verdict(ibox, c3, no_diag()).rule == "lattice-generators");

  Polyhedron3D tet;
  tet.vertices = {iv({0, 0, 0}), iv({6, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})};
  tet.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  auto t = brs_verdict(tet, c3, no_diag());
  CHECK(t.kind == VerdictKind::not_brs);
  CHECK(t.rule == "symmetry");

  auto cube = brs_verdict(box_polyhedron(1, 1, 1), c3, no_diag());
  CHECK(cube.kind == VerdictKind::brs);
  CHECK(cube.rule == "symmetry");
}

TEST_CASE("property: verdicts are invariant under lattice translation") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  std::mt19937_64 rng(5);
  std::vector<std::pair<SetDescription, const AlphaContext*>> sets{
      {interval(q1(0), q1(Rational(1, 2))), &c1},
      {interval(q1(0), ScalarModule::alpha(1, 0)), &c1},
      {hecke_interval(ScalarModule(2, {-1}), c1), &c1},
      {zonogon_polygon(Zonotope{ModuleVector(2), {ModuleVector::alpha(2), iv({1, 0}), iv({0, 1})}}, c2), &c2},
      {Polygon2D{{qv(0, 0), qv(4, 0), qv(4, Rational(1, 2)), qv(0, Rational(1, 2))}}, &c2},
      {Polygon2D{{qv(0, 0), qv(2, 0), qv(2, Rational(1, 2)), qv(1, Rational(1, 2)), qv(1, Rational(3, 2)),
                  qv(0, Rational(3, 2))}},
       &c2},
      {module_parallelepiped(qv(Rational(1, 3), 0), {ModuleVector::alpha(2), iv({1, 2})}, c2), &c2},
  };
  for (const auto& [s, ctx] : sets) {
    const auto base = brs_verdict(s, *ctx, no_diag());
    for (int k = 0; k < 5; ++k) {
      auto shift = brs_test::rand_lattice(rng, ctx->d, 3);
      auto moved = brs_verdict(translate(s, shift, *ctx), *ctx, no_diag());
      REQUIRE(moved.kind == base.kind);
      CHECK(moved.rule == base.rule);
    }
  }
}

TEST_CASE("property: convex polygons passing the criterion show no discrepancy growth") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  std::mt19937_64 rng(8);
  ReportOptions opt;
  opt.starts = 10;
  opt.N = 100000;
  opt.checkpoints = {1000, 10000, 100000};
  opt.seed = 17;
  int checked = 0;
  std::vector<Polygon2D> polys{
      Polygon2D{{qv(0, 0), qv(Rational(1, 2), 0), qv(Rational(3, 2), 2), qv(1, 2)}},
  };
  while (polys.size() < 6) {
    std::vector<ModuleVector> gens{brs_test::rand_lattice(rng, 2, 2), brs_test::rand_lattice(rng, 2, 2),
                                   brs_test::rand_lattice(rng, 2, 1)};
    auto p = zonogon_polygon(Zonotope{brs_test::rand_module(rng, 2, 3, 4), gens}, c2);
    if (p.vertices.size() >= 4) polys.push_back(p);
  }
  for (const auto& p : polys) {
    if (!convex_polygon_test(p, c2).brs) continue;
    auto v = brs_verdict(p, c2, no_diag());
    REQUIRE(v.kind == VerdictKind::brs);
    CHECK(discrepancy_report(p, c2, opt).verdict == Diagnostic::no_growth);
    ++checked;
  }
  CHECK(checked >= 4);
}
