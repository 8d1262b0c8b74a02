#include "brs/invariants.hpp"

#include <algorithm>
#include <map>

#include "brs/error.hpp"

namespace brs {

namespace {

Rational frac_q(const Rational& q) { return canonical(q - Rational(floor_q(q))); }

// Representative of v + Z*alpha + Z^d with all coefficients in [0, 1).
ModuleVector reduce(const ModuleVector& v) {
  std::vector<Rational> m;
  for (const auto& x : v.m()) m.push_back(frac_q(x));
  return ModuleVector(frac_q(v.r()), m);
}

std::vector<Rational> coords(const ModuleVector& v) {
  std::vector<Rational> c{v.r()};
  c.insert(c.end(), v.m().begin(), v.m().end());
  return c;
}

// t with e = t*u; both parallel nonzero module vectors.
Rational ratio(const ModuleVector& e, const ModuleVector& u) {
  auto ec = coords(e), uc = coords(u);
  size_t i = 0;
  while (i < uc.size() && uc[i] == 0) ++i;
  if (i == uc.size()) throw Error(Errc::invalid_direction, "zero reference direction");
  Rational t = canonical(ec[i] / uc[i]);
  for (size_t k = 0; k < uc.size(); ++k)
    if (canonical(t * uc[k]) != canonical(ec[k]))
      throw Error(Errc::internal_consistency, "parallel edges " + format_vector(e) + " and " + format_vector(u) +
                                                  " are not rational multiples");
  return t;
}

ModuleVector point1d(const ScalarModule& s) { return ModuleVector(s.c(0), {s.c0()}); }

struct Edge {
  ModuleVector p, q;  // directed, interior on the left
};

// Signed boundary data of a set: endpoints (d = 1) or directed edges (d = 2).
struct Boundary {
  int d = 0;
  std::vector<std::pair<ScalarModule, int>> points;
  std::vector<Edge> edges;
};

void require_dim(Boundary& b, int d) {
  if (b.d != 0 && b.d != d) throw Error(Errc::dimension_mismatch, "mixed dimensions in Hadwiger input");
  b.d = d;
}

void add_polygon(Boundary& b, const Polygon2D& poly, const AlphaContext& ctx, bool reversed) {
  require_dim(b, 2);
  auto p = normalize_polygon(poly.vertices, ctx);
  const size_t n = p.vertices.size();
  if (n < 3) throw Error(Errc::degenerate_geometry, "polygon has fewer than three vertices");
  for (size_t i = 0; i < n; ++i) {
    const auto& a = p.vertices[i];
    const auto& c = p.vertices[(i + 1) % n];
    b.edges.push_back(reversed ? Edge{c, a} : Edge{a, c});
  }
}

void collect(Boundary& b, const SetDescription& s, const AlphaContext& ctx, bool reversed) {
  if (!s.is_exact())
    throw Error(Errc::non_module_coordinates, "Hadwiger invariants need module coordinates (" + s.kind() + ")");
  if (s.dim() > 2) throw Error(Errc::unsupported_shape, "Hadwiger invariants are computed for d <= 2 only");
  const int sg = reversed ? -1 : 1;
  if (auto* u = std::get_if<DisjointUnion>(&s.shape)) {
    for (const auto& m : u->members) collect(b, m, ctx, reversed);
    return;
  }
  if (auto* iu = std::get_if<IntervalUnion1D>(&s.shape)) {
    require_dim(b, 1);
    for (const auto& iv : iu->intervals) {
      b.points.push_back({iv.a, sg});
      b.points.push_back({iv.b, -sg});
    }
    return;
  }
  if (s.dim() == 1) {
    if (auto* p = std::get_if<Parallelepiped>(&s.shape)) {
      require_dim(b, 1);
      ScalarModule a = p->base.component(0), c = a + p->gens[0].component(0);
      if (sign(c - a, ctx) < 0) std::swap(a, c);
      b.points.push_back({a, sg});
      b.points.push_back({c, -sg});
      return;
    }
    throw Error(Errc::unsupported_shape, "unsupported one-dimensional shape " + s.kind());
  }
  if (auto poly = as_polygon(s, ctx)) {
    add_polygon(b, *poly, ctx, reversed);
    return;
  }
  throw Error(Errc::unsupported_shape, "no Hadwiger support for " + s.kind());
}

struct Orbit {
  Flag flag;
  ModuleVector anchor;     // a point of the orbit (k = 0) or of the line (k = 1)
  ModuleVector direction;  // d = 2 only
  ModuleVector reference;
  Rational sum;
};

HadwigerEntry to_entry(const Orbit& o) {
  HadwigerEntry e;
  e.representative = o.flag;
  e.q = o.sum;
  e.reference = o.reference;
  e.ref_magnitude = o.flag.k == 0 ? "1" : "|" + format_vector(o.reference) + "|";
  return e;
}

HadwigerReport finish(std::vector<Orbit>& orbits) {
  HadwigerReport r;
  for (auto& o : orbits) {
    o.sum.canonicalize();
    if (o.sum != 0) r.entries.push_back(to_entry(o));
  }
  r.all_zero = r.entries.empty();
  return r;
}

std::vector<Orbit> rank0_1d(const Boundary& b) {
  // Orbit of c0 + c1*alpha is keyed by the fractional parts of both coefficients.
  std::map<std::pair<Rational, Rational>, Orbit> by_key;
  for (const auto& [pt, s] : b.points) {
    auto key = std::make_pair(frac_q(pt.c0()), frac_q(pt.c(0)));
    auto [it, fresh] = by_key.try_emplace(key);
    if (fresh) {
      it->second.flag.k = 0;
      it->second.flag.base = ModuleVector(key.second, {key.first});
      it->second.flag.orientations = {1};
      it->second.reference = ModuleVector(1);
    }
    it->second.sum += s;
  }
  std::vector<Orbit> out;
  for (auto& [k, o] : by_key) out.push_back(std::move(o));
  return out;
}

// Index of the parallel class of e, creating one if needed.
size_t parallel_class(std::vector<ModuleVector>& classes, const ModuleVector& e) {
  for (size_t i = 0; i < classes.size(); ++i)
    if (cross(classes[i], e).is_zero()) return i;
  classes.push_back(e);
  return classes.size() - 1;
}

std::vector<Orbit> rank1_2d(const Boundary& b) {
  std::vector<ModuleVector> classes;
  std::vector<Orbit> orbits;
  std::vector<size_t> orbit_class;
  for (const auto& ed : b.edges) {
    const ModuleVector e = ed.q - ed.p;
    const size_t c = parallel_class(classes, e);
    const ModuleVector& u = classes[c];
    size_t hit = orbits.size();
    for (size_t i = 0; i < orbits.size() && hit == orbits.size(); ++i)
      if (orbit_class[i] == c && line_lattice_solutions(ed.p - orbits[i].anchor, u)) hit = i;
    if (hit == orbits.size()) {
      Orbit o;
      o.flag.k = 1;
      o.flag.base = reduce(ed.p);
      o.flag.directions = {u};
      o.flag.orientations = {1, 1};
      o.anchor = ed.p;
      o.direction = u;
      o.reference = u;
      orbits.push_back(o);
      orbit_class.push_back(c);
    } else if (reduce(ed.p).lex_less(orbits[hit].flag.base)) {
      orbits[hit].flag.base = reduce(ed.p);
    }
    // Interior lies left of e; relative to the reference direction the signed
    // length is exactly the ratio.
    orbits[hit].sum += ratio(e, u);
  }
  return orbits;
}

std::vector<Orbit> rank0_2d(const Boundary& b) {
  std::vector<ModuleVector> classes;
  std::map<std::pair<size_t, std::vector<Rational>>, Orbit> by_key;
  auto add = [&](const ModuleVector& pt, size_t c, int s) {
    const ModuleVector red = reduce(pt);
    auto [it, fresh] = by_key.try_emplace({c, coords(red)});
    if (fresh) {
      it->second.flag.k = 0;
      it->second.flag.base = red;
      it->second.flag.directions = {classes[c]};
      it->second.flag.orientations = {1, 1};
      it->second.reference = ModuleVector(2);
    }
    it->second.sum += s;
  };
  for (const auto& ed : b.edges) {
    const size_t c = parallel_class(classes, ed.q - ed.p);
    // Ray and half-plane orientations flip together between the two
    // endpoints, so start and end contribute opposite signs.
    add(ed.p, c, 1);
    add(ed.q, c, -1);
  }
  std::vector<Orbit> out;
  for (auto& [k, o] : by_key) out.push_back(std::move(o));
  return out;
}

HadwigerReport from_boundary(const Boundary& b, int rank) {
  std::vector<Orbit> orbits;
  if (b.d == 1) {
    if (rank > 0) throw Error(Errc::invalid_direction, "rank must be 0 in dimension one");
    orbits = rank0_1d(b);
  } else {
    if (rank > 1) throw Error(Errc::invalid_direction, "rank must be 0 or 1 in dimension two");
    if (rank != 1) orbits = rank0_2d(b);
    if (rank != 0) {
      auto r1 = rank1_2d(b);
      orbits.insert(orbits.end(), r1.begin(), r1.end());
    }
  }
  return finish(orbits);
}

std::optional<Interval> single_interval(const SetDescription& s, const AlphaContext& ctx) {
  if (auto* iu = std::get_if<IntervalUnion1D>(&s.shape); iu && iu->intervals.size() == 1) return iu->intervals[0];
  if (auto* p = std::get_if<Parallelepiped>(&s.shape); p && p->base.dim() == 1) {
    ScalarModule a = p->base.component(0), c = a + p->gens[0].component(0);
    if (sign(c - a, ctx) < 0) std::swap(a, c);
    return Interval{a, c};
  }
  return std::nullopt;
}

}  // namespace

HadwigerReport hadwiger(const SetDescription& s, const AlphaContext& ctx, int rank) {
  Boundary b;
  collect(b, s, ctx, false);
  return from_boundary(b, rank);
}

HadwigerComparison compare_hadwiger(const SetDescription& a, const SetDescription& b, const AlphaContext& ctx) {
  Boundary bd;
  collect(bd, a, ctx, false);
  collect(bd, b, ctx, true);
  HadwigerComparison out;
  out.difference = from_boundary(bd, -1);
  out.equal = out.difference.all_zero;
  auto ia = single_interval(a, ctx), ib = single_interval(b, ctx);
  if (ia && ib && ia->b - ia->a == ib->b - ib->a)
    out.interval_criterion = is_lattice_member(ia->b - ia->a) || is_lattice_member(ib->a - ia->a);
  return out;
}

OrenResult oren_test(const IntervalUnion1D& s) {
  const int n = static_cast<int>(s.intervals.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (is_lattice_member(s.intervals[j].b - s.intervals[i].a)) adj[i].push_back(j);
  // Kuhn's augmenting paths; owner[j] is the a-index matched to b_j.
  std::vector<int> owner(n, -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, int i) -> bool {
    for (int j : adj[i]) {
      if (seen[j]) continue;
      seen[j] = 1;
      if (owner[j] < 0 || self(self, owner[j])) {
        owner[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    seen.assign(n, 0);
    if (!augment(augment, i)) return {};
  }
  OrenResult r;
  r.brs = true;
  r.sigma.assign(n, -1);
  for (int j = 0; j < n; ++j) r.sigma[owner[j]] = j;
  return r;
}

ConvexPolygonReport convex_polygon_test(const Polygon2D& s, const AlphaContext& ctx) {
  auto p = normalize_polygon(s.vertices, ctx);
  if (p.vertices.size() < 3 || !is_convex_ccw(p, ctx))
    throw Error(Errc::non_convex, "convex_polygon_test needs a convex polygon");
  const auto& v = p.vertices;
  const size_t n = v.size();
  auto edge = [&](size_t i) { return v[(i + 1) % n] - v[i]; };
  ConvexPolygonReport r;
  if (n % 2 != 0) {
    r.failure = "odd number of edges";
    return r;
  }
  const size_t h = n / 2;
  r.centrally_symmetric = true;
  for (size_t i = 0; i < h; ++i)
    if (edge(i) != -edge(i + h)) r.centrally_symmetric = false;
  if (!r.centrally_symmetric) {
    r.failure = "opposite edges are not equal and antiparallel";
    return r;
  }
  r.brs = true;
  for (size_t i = 0; i < h; ++i) {
    EdgePairWitness w;
    w.e = static_cast<int>(i);
    w.e_opposite = static_cast<int>(i + h);
    const ModuleVector e = edge(i);
    const ModuleVector diff = v[i + h] - v[i];
    auto sol = segment_lattice_solutions(diff, -e, Rational(0), Rational(2));
    w.common_lattice_points = !sol.empty();
    if (w.common_lattice_points) w.u = sol.front();
    w.midpoints_differ_by_lattice = is_lattice_member(diff - e);
    w.edges_in_lattice = is_lattice_member(e);
    w.condition_ii = w.midpoints_differ_by_lattice || w.edges_in_lattice;
    if (r.brs && !(w.common_lattice_points && w.condition_ii)) {
      r.brs = false;
      r.failure = "edge pair " + std::to_string(i) + "/" + std::to_string(i + h) + " fails condition " +
                  (w.common_lattice_points ? "(ii)" : "(i)");
    }
    r.pairs.push_back(std::move(w));
  }
  return r;
}

bool vertex_pairing_test(const std::vector<ModuleVector>& vertices) {
  for (size_t i = 0; i < vertices.size(); ++i) {
    bool found = false;
    for (size_t j = 0; j < vertices.size() && !found; ++j)
      found = j != i && is_lattice_member(vertices[j] - vertices[i]);
    if (!found) return false;
  }
  return true;
}

std::optional<std::vector<ModuleVector>> polytope_vertices(const SetDescription& s, const AlphaContext& ctx) {
  if (auto* h = std::get_if<Polyhedron3D>(&s.shape)) return h->vertices;
  if (auto* iu = std::get_if<IntervalUnion1D>(&s.shape); iu && iu->intervals.size() == 1)
    return std::vector<ModuleVector>{point1d(iu->intervals[0].a), point1d(iu->intervals[0].b)};
  if (auto* p = std::get_if<Parallelepiped>(&s.shape)) {
    const int k = static_cast<int>(p->gens.size());
    std::vector<ModuleVector> out;
    for (int mask = 0; mask < (1 << k); ++mask) {
      ModuleVector x = p->base;
      for (int i = 0; i < k; ++i)
        if (mask & (1 << i)) x += p->gens[i];
      out.push_back(x);
    }
    return out;
  }
  if (auto poly = as_polygon(s, ctx)) return normalize_polygon(poly->vertices, ctx).vertices;
  return std::nullopt;
}

bool box_test(const std::vector<ScalarModule>& lengths) {
  const int d = static_cast<int>(lengths.size());
  auto integral = [](const ScalarModule& x) { return x.is_rational() && is_integer(x.c0()); };
  for (int j = 0; j < d; ++j) {
    const auto& l = lengths[j];
    bool ok = is_integer(l.c0()) && is_integer(l.c(j));
    for (int i = 0; i < l.dim() && ok; ++i) ok = i == j || l.c(i) == 0;
    for (int i = 0; i < d && ok; ++i) ok = i == j || integral(lengths[i]);
    if (ok) return true;
  }
  return false;
}

SymmetryReport symmetry_tests(const Polyhedron3D& s) {
  const int nv = static_cast<int>(s.vertices.size());
  std::map<std::pair<int, int>, int> used;
  for (const auto& f : s.faces) {
    if (f.size() < 3) throw Error(Errc::non_manifold, "face with fewer than three vertices");
    for (size_t i = 0; i < f.size(); ++i) {
      const int a = f[i], b = f[(i + 1) % f.size()];
      if (a < 0 || a >= nv || b < 0 || b >= nv) throw Error(Errc::non_manifold, "face index out of range");
      ++used[{a, b}];
    }
  }
  for (const auto& [e, cnt] : used) {
    auto rev = used.find({e.second, e.first});
    if (cnt != 1 || rev == used.end() || rev->second != 1)
      throw Error(Errc::non_manifold, "edge " + std::to_string(e.first) + "-" + std::to_string(e.second) +
                                          " is not shared by exactly two oppositely oriented faces");
  }
  SymmetryReport r;
  ModuleVector sum(3);
  for (const auto& v : s.vertices) sum += v;
  const ModuleVector twice_center = sum * canonical(Rational(2, nv));
  r.central_symmetric = std::all_of(s.vertices.begin(), s.vertices.end(), [&](const ModuleVector& v) {
    const ModuleVector w = twice_center - v;
    return std::find(s.vertices.begin(), s.vertices.end(), w) != s.vertices.end();
  });
  r.faces_symmetric = std::all_of(s.faces.begin(), s.faces.end(), [&](const std::vector<int>& f) {
    const size_t k = f.size();
    if (k % 2 != 0) return false;
    const ModuleVector c = s.vertices[f[0]] + s.vertices[f[k / 2]];
    for (size_t i = 1; i < k / 2; ++i)
      if (s.vertices[f[i]] + s.vertices[f[i + k / 2]] != c) return false;
    return true;
  });
  const bool lattice = std::all_of(s.vertices.begin(), s.vertices.end(),
                                   [](const ModuleVector& v) { return is_lattice_member(v); });
  // Convex polytopes with centrally symmetric facets are zonohedra.
  if (lattice) r.zonohedron_brs = r.central_symmetric && r.faces_symmetric;
  return r;
}

}  // namespace brs
