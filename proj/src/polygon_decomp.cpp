#include <cmath>

#include "brs/equidecomp.hpp"
#include "brs/error.hpp"
#include "brs/invariants.hpp"

namespace brs {

namespace {

using Poly = std::vector<ModuleVector>;

Poly clean(Poly v, const AlphaContext& ctx) {
  auto p = normalize_polygon(std::move(v), ctx);
  if (p.vertices.size() < 3) return {};
  return std::move(p.vertices);
}

// num / den when the two are proportional, i.e. when the quotient is rational.
Rational module_ratio(const ScalarModule& num, const ScalarModule& den) {
  Rational q;
  if (den.c0() != 0) {
    q = num.c0() / den.c0();
  } else {
    int i = 0;
    while (i < den.dim() && den.c(i) == 0) ++i;
    if (i == den.dim()) throw Error(Errc::degenerate_geometry, "clip against a degenerate edge");
    q = num.c(i) / den.c(i);
  }
  q.canonicalize();
  if (den * q != num)
    throw Error(Errc::degenerate_geometry, "cut through (" + format_scalar(num) + ")/(" + format_scalar(den) +
                                               ") leaves Z*alpha + Q^2");
  return q;
}

Poly translated(Poly p, const ModuleVector& v) {
  for (auto& x : p) x += v;
  return p;
}

bool lattice(const ModuleVector& v) { return is_lattice_member(v); }

struct Placed {
  Poly piece;
  ModuleVector shift;
};

struct Dec {
  std::vector<Placed> pieces;
  std::vector<Parallelepiped> targets;
  int levels = 0;
};

double extreme_x(const std::vector<Parallelepiped>& ps, bool want_max, const AlphaContext& ctx) {
  double best = want_max ? -HUGE_VAL : HUGE_VAL;
  for (const auto& p : ps)
    for (const auto& v : parallelogram_polygon(p, ctx).vertices) {
      const double x = v.component(0).to_double(ctx);
      best = want_max ? std::max(best, x) : std::min(best, x);
    }
  return best;
}

// Moves the targets of `d` by an integer vector so they sit to the right of `taken`.
void place_right_of(Dec& d, const std::vector<Parallelepiped>& taken, const AlphaContext& ctx) {
  if (taken.empty() || d.targets.empty()) return;
  const long k = static_cast<long>(std::ceil(extreme_x(taken, true, ctx) - extreme_x(d.targets, false, ctx))) + 1;
  if (k <= 0) return;
  const ModuleVector lambda = ModuleVector::integer({k, 0});
  for (auto& t : d.targets) t.base += lambda;
  for (auto& p : d.pieces) p.shift += lambda;
}

// Parallelogram base + [0,1)a + [0,1)b with one lattice generator: identity or a shear.
Dec parallelogram_case(const ModuleVector& base, const ModuleVector& a, const ModuleVector& b,
                       const AlphaContext& ctx) {
  Parallelepiped p{base, {a, b}};
  Dec out;
  if (lattice(a) && lattice(b)) {
    out.pieces.push_back({parallelogram_polygon(p, ctx).vertices, ModuleVector(2)});
    out.targets.push_back(p);
    return out;
  }
  const int j = lattice(a) ? 0 : lattice(b) ? 1 : -1;
  if (j < 0) throw Error(Errc::test_failure, "parallelogram without a lattice generator");
  const int k = 1 - j;
  auto sol = line_lattice_solutions(p.gens[k], p.gens[j]);
  if (!sol) throw Error(Errc::test_failure, "no shear of the parallelogram reaches the lattice");
  auto sh = shear_decompose(p, j, k, sol->t0, ctx);
  for (const auto& piece : sh.pieces) out.pieces.push_back({as_polygon(piece.piece, ctx)->vertices, piece.shift});
  out.targets.push_back(sh.target);
  return out;
}

Dec zonogon_case(const ModuleVector& base, const std::vector<ModuleVector>& gens, const AlphaContext& ctx);

// One level of the five-piece partition for the window f starting at vertex bs.
Dec five_pieces(const ModuleVector& bs, const std::vector<ModuleVector>& f, const Rational& t, const AlphaContext& ctx) {
  const size_t n = f.size();
  ModuleVector sum(2);
  for (const auto& v : f) sum += v;
  const ModuleVector g1 = sum - f[n - 1];
  const ModuleVector g2 = sum - f[0] * t;
  std::vector<ModuleVector> w(2 * n);
  w[0] = ModuleVector(2);
  for (size_t i = 0; i + 1 < n; ++i) w[i + 1] = w[i] + f[i];
  for (size_t i = 0; i < n; ++i) w[n + i] = sum - w[i];
  const ModuleVector zero(2);

  Poly s3{zero, g1, sum, g2}, s2{zero, g2, f[n - 1]}, s4{zero, f[0] * t, g1};
  Poly s5{f[0] * t};
  for (size_t i = 1; i < n; ++i) s5.push_back(w[i]);
  Poly s1{g2};
  for (size_t i = n + 1; i < 2 * n; ++i) s1.push_back(w[i]);

  Dec out;
  out.targets.push_back(Parallelepiped{bs, {g1, g2}});
  auto add = [&](const Poly& rel, const ModuleVector& shift) {
    Poly p = clean(translated(rel, bs), ctx);
    if (!p.empty()) out.pieces.push_back({std::move(p), shift});
  };
  add(s3, zero);
  add(s2, g1);
  add(s4, g2);
  out.levels = 1;

  std::vector<ModuleVector> sub_gens;
  if (t != 1) sub_gens.push_back(f[0] * (1 - t));
  for (size_t i = 1; i + 1 < n; ++i) sub_gens.push_back(f[i]);
  if (sub_gens.size() < 2) return out;

  // S' = (S1 - g2) u (S5 - g1), glued along its main diagonal.
  Dec sub = zonogon_case(bs + f[0] * t - g1, sub_gens, ctx);
  place_right_of(sub, out.targets, ctx);
  const Poly h1 = clean(translated(s1, bs - g2), ctx);
  const Poly h5 = clean(translated(s5, bs - g1), ctx);
  for (const auto& q : sub.pieces) {
    if (!h1.empty()) {
      Poly a = intersect_convex(q.piece, h1, ctx);
      if (!a.empty()) out.pieces.push_back({translated(std::move(a), g2), q.shift - g2});
    }
    if (!h5.empty()) {
      Poly b = intersect_convex(q.piece, h5, ctx);
      if (!b.empty()) out.pieces.push_back({translated(std::move(b), g1), q.shift - g1});
    }
  }
  out.targets.insert(out.targets.end(), sub.targets.begin(), sub.targets.end());
  out.levels = sub.levels + 1;
  return out;
}

// Zonogon base + sum [0,1)gens, gens in counterclockwise order. Tries each
// window of n consecutive edges until every cut of the flattening is exact.
Dec zonogon_case(const ModuleVector& base, const std::vector<ModuleVector>& gens, const AlphaContext& ctx) {
  const size_t n = gens.size();
  if (n == 2) return parallelogram_case(base, gens[0], gens[1], ctx);
  std::vector<ModuleVector> e = gens;
  for (const auto& g : gens) e.push_back(-g);
  std::vector<ModuleVector> v{base};
  for (size_t i = 0; i + 1 < e.size(); ++i) v.push_back(v.back() + e[i]);
  std::string last = "no window has gamma_1 and gamma_2 in the lattice";
  for (size_t s = 0; s < 2 * n; ++s) {
    std::vector<ModuleVector> f;
    ModuleVector sum(2);
    for (size_t i = 0; i < n; ++i) {
      f.push_back(e[(s + i) % (2 * n)]);
      sum += f.back();
    }
    if (!lattice(sum - f[n - 1])) continue;
    auto ts = segment_lattice_solutions(sum, -f[0], Rational(0), Rational(1));
    if (ts.empty()) continue;
    try {
      return five_pieces(v[s], f, ts.front(), ctx);
    } catch (const Error& err) {
      if (err.code() != Errc::degenerate_geometry) throw;
      last = "window " + std::to_string(s) + ": " + err.what();
    }
  }
  throw Error(Errc::degenerate_geometry, last);
}

// Shephard tiles, each moved to a lattice parallelogram on its own.
Dec tiled_shears(const ModuleVector& base, const std::vector<ModuleVector>& gens, const AlphaContext& ctx) {
  Dec out;
  for (const auto& tile : shephard_tiling(Zonotope{base, gens}, ctx)) {
    Dec t = parallelogram_case(tile.base, tile.gens[0], tile.gens[1], ctx);
    place_right_of(t, out.targets, ctx);
    out.pieces.insert(out.pieces.end(), t.pieces.begin(), t.pieces.end());
    out.targets.insert(out.targets.end(), t.targets.begin(), t.targets.end());
  }
  return out;
}

}  // namespace

std::vector<ModuleVector> clip_left(const std::vector<ModuleVector>& poly, const ModuleVector& a,
                                    const ModuleVector& dir, const AlphaContext& ctx) {
  const size_t n = poly.size();
  if (n == 0) return {};
  std::vector<ScalarModule> side(n);
  std::vector<int> sg(n);
  for (size_t i = 0; i < n; ++i) {
    side[i] = cross(dir, poly[i] - a);
    sg[i] = sign(side[i], ctx);
  }
  Poly out;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    if (sg[i] >= 0) out.push_back(poly[i]);
    if (sg[i] * sg[j] < 0) {
      const Rational lambda = module_ratio(side[i], side[i] - side[j]);
      out.push_back(poly[i] + (poly[j] - poly[i]) * lambda);
    }
  }
  return clean(std::move(out), ctx);
}

std::vector<ModuleVector> intersect_convex(const std::vector<ModuleVector>& p, const std::vector<ModuleVector>& q,
                                           const AlphaContext& ctx) {
  Poly r = p;
  for (size_t i = 0; i < q.size() && !r.empty(); ++i) r = clip_left(r, q[i], q[(i + 1) % q.size()] - q[i], ctx);
  return r;
}

bool interiors_disjoint(const std::vector<ModuleVector>& p, const std::vector<ModuleVector>& q,
                        const AlphaContext& ctx) {
  if (p.size() < 3 || q.size() < 3) return true;
  auto separates = [&](const Poly& x, const Poly& y) {
    for (size_t i = 0; i < x.size(); ++i) {
      const ModuleVector e = x[(i + 1) % x.size()] - x[i];
      bool all_right = true;
      for (const auto& pt : y)
        if (sign(cross(e, pt - x[i]), ctx) > 0) {
          all_right = false;
          break;
        }
      if (all_right) return true;
    }
    return false;
  };
  return separates(p, q) || separates(q, p);
}

bool convex_contains(const std::vector<ModuleVector>& q, const std::vector<ModuleVector>& p, const AlphaContext& ctx) {
  for (size_t i = 0; i < q.size(); ++i) {
    const ModuleVector e = q[(i + 1) % q.size()] - q[i];
    for (const auto& pt : p)
      if (sign(cross(e, pt - q[i]), ctx) < 0) return false;
  }
  return true;
}

PolygonDecomposition decompose_convex_polygon(const Polygon2D& s, const AlphaContext& ctx) {
  if (ctx.d != 2) throw Error(Errc::dimension_mismatch, "decompose_convex_polygon needs d=2");
  auto rep = convex_polygon_test(s, ctx);
  if (!rep.brs) throw Error(Errc::test_failure, "convex polygon criterion fails: " + rep.failure);
  const Poly v = normalize_polygon(s.vertices, ctx).vertices;
  const size_t n = v.size() / 2;
  std::vector<ModuleVector> gens;
  for (size_t i = 0; i < n; ++i) gens.push_back(v[i + 1] - v[i]);
  size_t nonlattice = 0;
  for (const auto& g : gens) nonlattice += !lattice(g);

  Dec d;
  if (n == 2) {
    d = parallelogram_case(v[0], gens[0], gens[1], ctx);
  } else if (nonlattice == 0) {
    for (const auto& tile : shephard_tiling(Zonotope{v[0], gens}, ctx)) {
      d.pieces.push_back({parallelogram_polygon(tile, ctx).vertices, ModuleVector(2)});
      d.targets.push_back(tile);
    }
  } else {
    try {
      d = zonogon_case(v[0], gens, ctx);
    } catch (const Error& e) {
      // With a single non-lattice generator every tile is a shearable parallelogram.
      if (e.code() != Errc::degenerate_geometry || nonlattice != 1) throw;
      d = tiled_shears(v[0], gens, ctx);
    }
  }

  PolygonDecomposition out;
  out.levels = d.levels;
  for (auto& p : d.pieces) out.pieces.push_back({Polygon2D{std::move(p.piece)}, std::move(p.shift)});
  if (d.targets.size() == 1) {
    out.target = d.targets.front();
  } else {
    DisjointUnion u;
    for (auto& t : d.targets) u.members.emplace_back(std::move(t));
    out.target = std::move(u);
  }
  return out;
}

}  // namespace brs
