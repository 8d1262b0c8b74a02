#include <cmath>
#include <numbers>
#include <random>

#include "brs/constructions.hpp"
#include "brs/error.hpp"
#include "brs/transfer.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace brs;

namespace {

ModuleVector iv(std::vector<long> m, long r = 0) { return ModuleVector::integer(m, r); }

double frac(double x) { return x - std::floor(x); }

Parallelepiped strip(const AlphaContext&) { return Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}}; }

std::vector<Parallelepiped> random_lattice_pipeds(std::mt19937_64& rng, int d, int count, long range) {
  auto ctx = AlphaContext::standard(d);
  std::vector<Parallelepiped> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<ModuleVector> vs;
    for (int k = 0; k < d; ++k) vs.push_back(brs_test::rand_lattice(rng, d, range));
    double D = std::fabs(det_module(vs).to_double(ctx));
    if (D < 0.05 || D > 6) continue;
    out.push_back(Parallelepiped{brs_test::rand_module(rng, d, 3, 4), vs});
  }
  return out;
}

std::vector<double> rand_point(std::mt19937_64& rng, int d) {
  std::vector<double> x(d);
  for (auto& v : x) v = brs_test::rand_unit(rng);
  return x;
}

}  // namespace

TEST_CASE("build_surface examples") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto s = build_surface(strip(c2), c2);
  REQUIRE(s.facets.size() == 1);
  CHECK(s.facets[0].r == 0);
  CHECK(s.facets[0].j == 0);
  CHECK(s.facets[0].gens == std::vector<ModuleVector>{iv({0, 1})});
  CHECK(s.omega == std::vector<long>{1, 0});
  CHECK(s.D == ScalarModule::alpha(2, 0));

  auto cube = build_surface(Parallelepiped{ModuleVector(2), {iv({1, 0}), iv({0, 1})}}, c2);
  CHECK(cube.facets.empty());
  CHECK(cube.omega == std::vector<long>{0, 0});

  auto two = build_surface(Parallelepiped{ModuleVector(2), {iv({1, 0}, 2), iv({0, 1})}}, c2);
  REQUIRE(two.facets.size() == 2);
  CHECK(two.facets[0].j == 0);
  CHECK(two.facets[1].j == 1);
  CHECK(two.facets[1].base == ModuleVector::alpha(2));
  // omega = D * 2 * v_1^* with v_1^* = (1/(2a_1 + 1), 0) and D = 2a_1 + 1.
  CHECK(two.omega == std::vector<long>{2, 0});

  auto neg = build_surface(Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2, -1), iv({0, 1})}}, c2);
  REQUIRE(neg.facets.size() == 1);
  CHECK(neg.facets[0].j == -1);
  CHECK(neg.facets[0].sign == -1);
  CHECK(neg.omega == std::vector<long>{1, 0});

  CHECK_THROWS_AS(build_surface(Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2, Rational(1, 2)), iv({0, 1})}}, c2),
                  Error);
}

TEST_CASE("property: facet count is sum |q_r|") {
  std::mt19937_64 rng(17);
  for (int d = 1; d <= 3; ++d) {
    auto ctx = AlphaContext::standard(d);
    for (const auto& P : random_lattice_pipeds(rng, d, 10, 3)) {
      auto s = build_surface(P, ctx);
      long want = 0;
      for (const auto& v : P.gens) want += std::labs(v.r().get_num().get_si());
      CHECK(static_cast<long>(s.facets.size()) == want);
    }
  }
}

TEST_CASE("strip transfer is -{x_1} up to a constant") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto s = build_surface(strip(c2), c2);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto x = rand_point(rng, 2), y = rand_point(rng, 2);
    CHECK(eval_transfer(s, x) - eval_transfer(s, y) == doctest::Approx(-(frac(x[0]) - frac(y[0]))).epsilon(1e-12));
  }
  // Base point pins the constant.
  CHECK(eval_transfer(s, s.x0) == doctest::Approx(0.0));
}

TEST_CASE("1D surface reproduces the Hecke transfer") {
  auto c1 = AlphaContext::preset("sqrt2");
  // [0, 1 - 2a), q = -2.
  Parallelepiped P{ModuleVector(1), {ModuleVector(-2, {1})}};
  auto s = build_surface(P, c1);
  CHECK(s.facets.size() == 2);
  double a = c1.alpha_d[0];
  auto h = hecke_transfer(-2, 0.0, a);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    double x = brs_test::rand_unit(rng), y = brs_test::rand_unit(rng);
    CHECK(eval_transfer(s, {x}) - eval_transfer(s, {y}) == doctest::Approx(h({x}) - h({y})).epsilon(1e-12));
  }
  SetDescription S = module_parallelepiped(P.base, P.gens, c1);
  CHECK(cohomology_residual(S, h, 5000, c1) < 1e-12);
}

TEST_CASE("unit cube surface gives the zero function") {
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  auto s = build_surface(Parallelepiped{ModuleVector(3), {iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})}}, c3);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) CHECK(eval_transfer(s, rand_point(rng, 3)) == 0.0);
  SetDescription cube = Parallelepiped{ModuleVector(3), {iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})}};
  CHECK(cohomology_residual(cube, [](const std::vector<double>&) { return 0.0; }, 2000, c3) < 1e-12);
}

TEST_CASE("property: closed lattice loops satisfy #(Pi . gamma) = <b - a, omega>") {
  std::mt19937_64 rng(5);
  for (int d = 1; d <= 3; ++d) {
    auto ctx = AlphaContext::standard(d);
    for (const auto& P : random_lattice_pipeds(rng, d, 6, 2)) {
      auto s = build_surface(P, ctx);
      int done = 0;
      for (int it = 0; it < 60 && done < 20; ++it) {
        auto a = rand_point(rng, d);
        std::vector<double> b = a;
        long want = 0;
        for (int i = 0; i < d; ++i) {
          long z = brs_test::rand_int(rng, -3, 3);
          b[i] += z;
          want += z * s.omega[i];
        }
        try {
          REQUIRE(intersection_number(s, a, b) == want);
          ++done;
        } catch (const Error& e) {
          REQUIRE(e.code() == Errc::degenerate_path);
        }
      }
      CHECK(done >= 18);
    }
  }
}

TEST_CASE("property: path independence and loop identity") {
  std::mt19937_64 rng(6);
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  for (const auto& P : random_lattice_pipeds(rng, 2, 5, 3)) {
    auto s = build_surface(P, c2);
    auto alt = build_surface(P, c2, std::vector<double>{0.61803, 0.41421});
    double offset = eval_transfer(alt, s.x0);
    for (int i = 0; i < 100; ++i) {
      auto x = rand_point(rng, 2);
      CHECK(eval_transfer(s, x) - eval_transfer(alt, x) == doctest::Approx(-offset).epsilon(1e-9));
      // x0 -> x -> x0 along straight segments has zero net count after the omega term.
      auto lift = x;
      long there = intersection_number(s, s.x0, lift);
      long back = intersection_number(s, lift, s.x0);
      CHECK(there + back == 0);
    }
  }
}

TEST_CASE("property: cohomology residual vanishes on lattice parallelepipeds") {
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 3; ++d) {
    auto ctx = AlphaContext::standard(d);
    for (const auto& P : random_lattice_pipeds(rng, d, d == 3 ? 3 : 5, 2)) {
      SetDescription S = P;
      auto g = surface_transfer(build_surface(P, ctx));
      double res = cohomology_residual(S, g, d == 3 ? 1500 : 4000, ctx, 11);
      INFO("d=" << d);
      CHECK(res < 1e-8);
    }
  }
}

TEST_CASE("property: transfer values stay bounded as sampling grows") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto s = build_surface(Parallelepiped{ModuleVector(2), {iv({1, 2}, 2), iv({-1, 1}, 1)}}, c2);
  std::mt19937_64 rng(10);
  auto range = [&](long n) {
    double lo = 1e300, hi = -1e300;
    for (long i = 0; i < n; ++i) {
      double g = eval_transfer(s, rand_point(rng, 2));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    return hi - lo;
  };
  double r4 = range(10000), r5 = range(100000);
  CHECK(std::isfinite(r5));
  CHECK(r5 < 50);
  CHECK(std::fabs(r5 - r4) < 0.25);
}

TEST_CASE("cohomology residual negative control") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  SetDescription S = strip(c2);
  auto wrong = [](const std::vector<double>& x) { return frac(x[0]); };
  CHECK(cohomology_residual(S, wrong, 2000, c2) >= 0.1);
  auto right = [](const std::vector<double>& x) { return -frac(x[0]); };
  CHECK(cohomology_residual(S, right, 2000, c2) < 1e-12);
}

TEST_CASE("transfer_for covers zonotopes, measures and unions") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  std::vector<std::pair<SetDescription, const AlphaContext*>> sets{
      {lattice_zonotope(ModuleVector(2), {ModuleVector::alpha(2), iv({2, 0}), iv({0, 1})}, c2), &c2},
      {measure_parallelepiped(ScalarModule(2, {-1, 1}), c2), &c2},
      {measure_parallelepiped(ScalarModule(0, {1, 1, -1}), c3), &c3},
      {sheared_parallelepiped({ModuleVector::alpha(2), iv({0, 1})}, {{}, {3}}, c2), &c2},
  };
  DisjointUnion u;
  u.members.push_back(module_parallelepiped(ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}, c2));
  u.members.push_back(module_parallelepiped(ModuleVector(Rational(1, 2), {0, 0}), {ModuleVector::alpha(2), iv({0, 1})}, c2));
  sets.push_back({SetDescription(u), &c2});
  for (auto& [S, ctx] : sets) {
    INFO(S.kind());
    CHECK(cohomology_residual(S, transfer_for(S, *ctx), 3000, *ctx, 2) < 1e-8);
  }
  CHECK_THROWS_AS(transfer_for(sheared_parallelepiped_real({ModuleVector::alpha(2), iv({0, 1})}, {{}, {0.3}}, c2), c2),
                  Error);
}

TEST_CASE("cylinder transfers") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  SUBCASE("v = e_d reduces to h(x) - vol * {y}") {
    auto h = [](const std::vector<double>& x) { return -frac(x[0]); };
    auto g = cylinder_transfer(h, 0.3, {0.0, 1.0});
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
      auto p = rand_point(rng, 2);
      CHECK(g(p) == doctest::Approx(-frac(p[0]) - 0.3 * frac(p[1])).epsilon(1e-14));
    }
    CHECK_THROWS_AS(cylinder_transfer(h, 0.3, {1.0, 0.0}), Error);
  }
  SUBCASE("Szusz parallelograms at 10^4 points") {
    int built = 0;
    for (auto [sq, sp] : std::vector<std::pair<long, long>>{{1, 0}, {2, -1}, {-1, 1}}) {
      for (const auto& v : {ModuleVector(1, {0, 1}), ModuleVector(-1, {1, 0}), ModuleVector(2, {-1, 1})}) {
        SetDescription S;
        try {
          S = szusz_parallelogram(v, sq, sp, c2);
        } catch (const Error&) {
          continue;
        }
        ++built;
        INFO(format_vector(v) << " sigma " << sq << "," << sp);
        CHECK(cohomology_residual(S, transfer_for(S, c2), 10000, c2, 3) < 1e-8);
      }
    }
    CHECK(built >= 6);
  }
  SUBCASE("double cylinder over a Hecke base in d = 3") {
    auto s2 = szusz_parallelogram(ModuleVector(1, {0, 1}), 1, 0, c2);
    int built = 0;
    for (const auto& v : {ModuleVector(1, {0, 0, 1}), ModuleVector(-1, {0, 1, 1}), ModuleVector(2, {1, 0, -1}),
                          ModuleVector(1, {1, 0, -1}), iv({0, 0, 1})}) {
      SetDescription S;
      try {
        S = liardet_cylinder(s2, v, c3);
      } catch (const Error& e) {
        // The base interval can turn negative under the induced rotation.
        CHECK(e.code() == Errc::invalid_parametrization);
        continue;
      }
      ++built;
      INFO(format_vector(v));
      CHECK(cohomology_residual(S, transfer_for(S, c3), 3000, c3, 4) < 1e-8);
    }
    CHECK(built >= 3);
  }
}

TEST_CASE("chain_transfer") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto A = hecke_interval(ScalarModule::alpha(1, 0), c1);
  auto gA = transfer_for(A, c1);
  // Identity decomposition leaves g unchanged.
  auto same = chain_transfer(gA, {{A, 0}}, c1);
  CHECK(same({0.3}) == gA({0.3}));
  // [0, a) moved by a lands on [a, 2a).
  SetDescription B = IntervalUnion1D{{{ScalarModule::alpha(1, 0), ScalarModule::alpha(1, 0, 2)}}};
  auto gB = chain_transfer(gA, {{A, 1}}, c1);
  CHECK(cohomology_residual(B, gB, 5000, c1) < 1e-8);
  // And back again with n = -1.
  auto gA2 = chain_transfer(gB, {{B, -1}}, c1);
  CHECK(cohomology_residual(A, gA2, 5000, c1) < 1e-8);
  // Unmoved half plus a half shifted by 2a - 1 (n = 2).
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto P = module_parallelepiped(ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}, c2);
  auto gP = transfer_for(P, c2);
  SetDescription top = Parallelepiped{ModuleVector(Rational(0), {0, Rational(1, 2)}), {ModuleVector::alpha(2), iv({0, 1}) * Rational(1, 2)}};
  SetDescription bottom = Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1}) * Rational(1, 2)}};
  DisjointUnion target;
  target.members = {bottom, translate(top, ModuleVector::alpha(2, 2), c2)};
  auto gT = chain_transfer(gP, {{top, 2}}, c2);
  CHECK(cohomology_residual(SetDescription(target), gT, 5000, c2) < 1e-8);
}

TEST_CASE("fourier_check") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto r = fourier_check(strip(c2), 1, 512, c2);
  for (const auto& e : r.entries) {
    if (e.lambda == std::vector<long>{0, 1}) CHECK(std::abs(e.c) < 1e-15);
    if (e.lambda == std::vector<long>{1, 0}) {
      // c = 1 / (2 pi i).
      CHECK(e.c.real() == doctest::Approx(0.0));
      CHECK(e.c.imag() == doctest::Approx(-1 / (2 * std::numbers::pi)).epsilon(1e-12));
      CHECK(std::abs(e.g_hat - e.c) < 1e-3);
    }
  }
  CHECK(r.entries.size() == 8);
  CHECK(r.max_error < 1e-3);

  auto cube = fourier_check(Parallelepiped{ModuleVector(2), {iv({1, 0}), iv({0, 1})}}, 2, 256, c2);
  for (const auto& e : cube.entries) {
    CHECK(std::abs(e.c) < 1e-15);
    CHECK(std::abs(e.g_hat) < 1e-15);
  }

  auto tilted = fourier_check(Parallelepiped{ModuleVector(2), {iv({1, 1}, 1), iv({0, 1}, -1)}}, 2, 1024, c2);
  CHECK(tilted.max_error < 5e-3);
  CHECK_THROWS_AS(fourier_check(strip(c2), 1, 100, c2), Error);
}
