#include "brs/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "brs/error.hpp"
#include "brs/indicator.hpp"
#include "brs/linalg.hpp"

namespace brs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ScalarModule polygon_area_q(const std::vector<std::pair<Rational, Rational>>& r, int d) {
  Rational a = 0;
  for (size_t i = 0; i < r.size(); ++i) {
    const auto& p = r[i];
    const auto& q = r[(i + 1) % r.size()];
    a += p.first * q.second - p.second * q.first;
  }
  return ScalarModule::constant(d, a / 2);
}

ScalarModule abs_det(const std::vector<ModuleVector>& cols, const AlphaContext& ctx) {
  return abs(det_module(cols), ctx);
}

// Visit all k-subsets of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& f) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

int orient(const ModuleVector& p, const ModuleVector& q, const ModuleVector& r,
           const AlphaContext& ctx) {
  return sign(cross(q - p, r - p), ctx);
}

bool on_segment(const ModuleVector& p, const ModuleVector& q, const ModuleVector& r,
                const AlphaContext& ctx) {
  // r collinear with pq; inside the closed segment?
  for (int i = 0; i < 2; ++i) {
    ScalarModule a = p.component(i), b = q.component(i), c = r.component(i);
    if (compare(a, b, ctx) > 0) std::swap(a, b);
    if (compare(c, a, ctx) < 0 || compare(c, b, ctx) > 0) return false;
  }
  return true;
}

bool segments_meet(const ModuleVector& p1, const ModuleVector& p2, const ModuleVector& p3,
                   const ModuleVector& p4, const AlphaContext& ctx) {
  int d1 = orient(p3, p4, p1, ctx), d2 = orient(p3, p4, p2, ctx);
  int d3 = orient(p1, p2, p3, ctx), d4 = orient(p1, p2, p4, ctx);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(p3, p4, p1, ctx)) return true;
  if (d2 == 0 && on_segment(p3, p4, p2, ctx)) return true;
  if (d3 == 0 && on_segment(p1, p2, p3, ctx)) return true;
  if (d4 == 0 && on_segment(p1, p2, p4, ctx)) return true;
  return false;
}

void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

ModuleVector polyhedron_centroid(const Polyhedron3D& p) {
  ModuleVector c(3);
  for (const auto& v : p.vertices) c += v;
  return c * Rational(1, static_cast<long>(p.vertices.size()));
}

}  // namespace

int set_dim(const Shape& s) {
  return std::visit(overloaded{
                        [](const IntervalUnion1D&) { return 1; },
                        [](const Polygon2D&) { return 2; },
                        [](const Parallelepiped& p) { return p.base.dim(); },
                        [](const Zonotope& z) { return z.base.dim(); },
                        [](const Polyhedron3D&) { return 3; },
                        [](const RealParallelepiped& r) { return static_cast<int>(r.base.size()); },
                        [](const FramedPolygon& f) { return f.frame.base.dim(); },
                        [](const DisjointUnion& u) {
                          return u.members.empty() ? 0 : u.members.front().dim();
                        },
                    },
                    s);
}

int SetDescription::dim() const { return set_dim(shape); }

bool SetDescription::is_exact() const {
  if (std::holds_alternative<RealParallelepiped>(shape)) return false;
  if (auto* u = std::get_if<DisjointUnion>(&shape))
    return std::all_of(u->members.begin(), u->members.end(),
                       [](const SetDescription& m) { return m.is_exact(); });
  return true;
}

std::string SetDescription::kind() const {
  static const char* names[] = {"interval_union", "polygon",             "parallelepiped",
                                "zonotope",       "polyhedron",          "real_parallelepiped",
                                "framed_polygon", "disjoint_union"};
  return names[shape.index()];
}

BBox bounding_box(const SetDescription& s, const AlphaContext& ctx) {
  const int d = s.dim();
  BBox b{std::vector<double>(d, HUGE_VAL), std::vector<double>(d, -HUGE_VAL)};
  auto include = [&](const std::vector<double>& p) {
    for (int i = 0; i < d; ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  };
  auto span = [&](std::vector<double> base, const std::vector<std::vector<double>>& gens) {
    std::vector<double> lo = base, hi = base;
    for (const auto& g : gens)
      for (int i = 0; i < d; ++i) (g[i] < 0 ? lo : hi)[i] += g[i];
    include(lo);
    include(hi);
  };
  auto span_exact = [&](const ModuleVector& base, const std::vector<ModuleVector>& gens) {
    std::vector<std::vector<double>> g;
    for (const auto& v : gens) g.push_back(v.to_double(ctx));
    span(base.to_double(ctx), g);
  };
  std::visit(overloaded{
                 [&](const IntervalUnion1D& u) {
                   for (const auto& iv : u.intervals) {
                     include({iv.a.to_double(ctx)});
                     include({iv.b.to_double(ctx)});
                   }
                 },
                 [&](const Polygon2D& p) {
                   for (const auto& v : p.vertices) include(v.to_double(ctx));
                 },
                 [&](const Parallelepiped& p) { span_exact(p.base, p.gens); },
                 [&](const Zonotope& z) { span_exact(z.base, z.gens); },
                 [&](const Polyhedron3D& p) {
                   for (const auto& v : p.vertices) include(v.to_double(ctx));
                 },
                 [&](const RealParallelepiped& r) { span(r.base, r.gens); },
                 [&](const FramedPolygon& f) { span_exact(f.frame.base, f.frame.gens); },
                 [&](const DisjointUnion& u) {
                   for (const auto& m : u.members) {
                     BBox mb = bounding_box(m, ctx);
                     include(mb.lo);
                     include(mb.hi);
                   }
                 },
             },
             s.shape);
  return b;
}

int multiplicity(const SetDescription& s, const std::vector<double>& x, const AlphaContext& ctx) {
  if (static_cast<int>(x.size()) != s.dim())
    throw Error(Errc::dimension_mismatch, "multiplicity: point dimension");
  return Indicator(s, ctx).count(x);
}

ScalarModule volume_symbolic(const SetDescription& s, const AlphaContext& ctx) {
  const int d = s.dim();
  return std::visit(
      overloaded{
          [&](const IntervalUnion1D& u) {
            ScalarModule v(1);
            for (const auto& iv : u.intervals) v += iv.b - iv.a;
            return v;
          },
          [&](const Polygon2D& p) { return abs(polygon_area(p.vertices), ctx); },
          [&](const Parallelepiped& p) { return abs_det(p.gens, ctx); },
          [&](const Zonotope& z) {
            ScalarModule v(d);
            for_each_subset(static_cast<int>(z.gens.size()), d, [&](const std::vector<int>& idx) {
              std::vector<ModuleVector> sub;
              for (int i : idx) sub.push_back(z.gens[i]);
              v += abs_det(sub, ctx);
            });
            return v;
          },
          [&](const Polyhedron3D& p) {
            // Fan each face from its first vertex and cone from the centroid.
            ModuleVector c = polyhedron_centroid(p);
            ScalarModule v(3);
            for (const auto& f : p.faces)
              for (size_t i = 1; i + 1 < f.size(); ++i)
                v += abs_det({p.vertices[f[0]] - c, p.vertices[f[i]] - c, p.vertices[f[i + 1]] - c},
                             ctx);
            return v * Rational(1, 6);
          },
          [&](const RealParallelepiped&) -> ScalarModule {
            throw Error(Errc::unsupported_shape, "volume_symbolic: numeric-only parallelepiped");
          },
          [&](const FramedPolygon& f) {
            ScalarModule a = polygon_area_q(f.region, d);
            return abs_det(f.frame.gens, ctx) * abs(a, ctx).c0();
          },
          [&](const DisjointUnion& u) {
            ScalarModule v(d);
            for (const auto& m : u.members) v += volume_symbolic(m, ctx);
            return v;
          },
      },
      s.shape);
}

double volume_numeric(const SetDescription& s, const AlphaContext& ctx) {
  if (auto* r = std::get_if<RealParallelepiped>(&s.shape)) {
    Matrix<double> m(r->gens.size(), std::vector<double>(r->gens.size()));
    for (size_t k = 0; k < r->gens.size(); ++k)
      for (size_t i = 0; i < r->gens.size(); ++i) m[i][k] = r->gens[k][i];
    return std::fabs(det_double(m));
  }
  if (auto* u = std::get_if<DisjointUnion>(&s.shape)) {
    double v = 0;
    for (const auto& m : u->members) v += volume_numeric(m, ctx);
    return v;
  }
  return volume_symbolic(s, ctx).to_double(ctx);
}

bool is_simple(const SetDescription& s, const AlphaContext& ctx) {
  if (auto* u = std::get_if<IntervalUnion1D>(&s.shape)) {
    ScalarModule total(1);
    for (const auto& iv : u->intervals) total += iv.b - iv.a;
    if (compare(total, ScalarModule::constant(1, 1), ctx) > 0) return false;
    const size_t n = u->intervals.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        const auto &A = u->intervals[i], &B = u->intervals[j];
        // [a_i,b_i) meets [a_j+k,b_j+k) iff a_i - b_j < k < b_i - a_j.
        Integer kmin = floor_exact(A.a - B.b, ctx) + 1;
        Integer kmax = -floor_exact(B.a - A.b, ctx) - 1;
        if (kmin > kmax) continue;
        if (i != j) return false;
        if (kmin != 0 || kmax != 0) return false;
      }
    return true;
  }
  if (auto* p = std::get_if<Parallelepiped>(&s.shape)) {
    const int d = p->base.dim();
    ScalarModule D = det_module(p->gens);
    if (D.is_zero()) throw Error(Errc::degenerate, "is_simple: degenerate parallelepiped");
    ScalarModule absD = abs(D, ctx);
    Matrix<double> g(d, std::vector<double>(d));
    std::vector<long> range(d);
    for (int k = 0; k < d; ++k) {
      auto v = p->gens[k].to_double(ctx);
      for (int i = 0; i < d; ++i) {
        g[i][k] = v[i];
      }
    }
    for (int i = 0; i < d; ++i) {
      double w = 0;
      for (int k = 0; k < d; ++k) w += std::fabs(g[i][k]);
      range[i] = static_cast<long>(std::ceil(w));
    }
    Matrix<double> inv = inverse_double(g);
    std::vector<long> z(d);
    for (int i = 0; i < d; ++i) z[i] = -range[i];
    while (true) {
      bool nonzero = std::any_of(z.begin(), z.end(), [](long v) { return v != 0; });
      if (nonzero) {
        bool maybe = true;
        for (int r = 0; r < d && maybe; ++r) {
          double t = 0;
          for (int i = 0; i < d; ++i) t += inv[r][i] * static_cast<double>(z[i]);
          if (std::fabs(t) > 1 + 1e-9) maybe = false;
        }
        if (maybe) {
          std::vector<Rational> zq(z.begin(), z.end());
          bool inside = true;
          for (int k = 0; k < d && inside; ++k)
            inside = compare(abs(det_with_column(p->gens, k, zq), ctx), absD, ctx) < 0;
          if (inside) return false;
        }
      }
      int i = 0;
      while (i < d && z[i] == range[i]) {
        z[i] = -range[i];
        ++i;
      }
      if (i == d) break;
      ++z[i];
    }
    return true;
  }
  throw Error(Errc::unsupported_shape, "is_simple: only parallelepipeds and interval unions");
}

SetDescription translate(const SetDescription& s, const ModuleVector& v, const AlphaContext& ctx) {
  if (v.dim() != s.dim()) throw Error(Errc::dimension_mismatch, "translate");
  Shape out = std::visit(
      overloaded{
          [&](IntervalUnion1D u) -> Shape {
            ScalarModule c = v.component(0);
            for (auto& iv : u.intervals) {
              iv.a += c;
              iv.b += c;
            }
            return u;
          },
          [&](Polygon2D p) -> Shape {
            for (auto& x : p.vertices) x += v;
            return p;
          },
          [&](Parallelepiped p) -> Shape {
            p.base += v;
            return p;
          },
          [&](Zonotope z) -> Shape {
            z.base += v;
            return z;
          },
          [&](Polyhedron3D p) -> Shape {
            for (auto& x : p.vertices) x += v;
            return p;
          },
          [&](RealParallelepiped r) -> Shape {
            auto vd = v.to_double(ctx);
            for (size_t i = 0; i < r.base.size(); ++i) r.base[i] += vd[i];
            r.recipe.reset();
            return r;
          },
          [&](FramedPolygon f) -> Shape {
            f.frame.base += v;
            return f;
          },
          [&](DisjointUnion u) -> Shape {
            for (auto& m : u.members) m = translate(m, v, ctx);
            return u;
          },
      },
      s.shape);
  SetDescription r;
  r.shape = std::move(out);
  r.certificate = s.certificate;
  return r;
}

void validate(const SetDescription& s, const AlphaContext& ctx) {
  const int d = s.dim();
  std::visit(
      overloaded{
          [&](const IntervalUnion1D& u) {
            require(!u.intervals.empty(), Errc::degenerate, "empty interval union");
            for (size_t i = 0; i < u.intervals.size(); ++i) {
              const auto& iv = u.intervals[i];
              require(iv.a.dim() == 1 && iv.b.dim() == 1, Errc::dimension_mismatch,
                      "interval endpoints must be d=1 module elements");
              require(compare(iv.a, iv.b, ctx) < 0, Errc::degenerate, "interval with a >= b");
              if (i + 1 < u.intervals.size())
                require(compare(iv.b, u.intervals[i + 1].a, ctx) <= 0, Errc::degenerate,
                        "intervals must be sorted and disjoint");
            }
          },
          [&](const Polygon2D& p) {
            const size_t n = p.vertices.size();
            require(n >= 3, Errc::degenerate, "polygon needs 3 vertices");
            for (const auto& v : p.vertices)
              require(v.dim() == 2, Errc::dimension_mismatch, "polygon vertex dimension");
            for (size_t i = 0; i < n; ++i) {
              const auto& a = p.vertices[(i + n - 1) % n];
              const auto& b = p.vertices[i];
              const auto& c = p.vertices[(i + 1) % n];
              require(!cross(b - a, c - b).is_zero(), Errc::degenerate,
                      "polygon has collinear consecutive vertices");
            }
            for (size_t i = 0; i < n; ++i)
              for (size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                require(!segments_meet(p.vertices[i], p.vertices[(i + 1) % n], p.vertices[j],
                                       p.vertices[(j + 1) % n], ctx),
                        Errc::degenerate, "polygon is not simple");
              }
            require(sign(polygon_area(p.vertices), ctx) > 0, Errc::degenerate,
                    "polygon must be counterclockwise with positive area");
          },
          [&](const Parallelepiped& p) {
            require(static_cast<int>(p.gens.size()) == d, Errc::dimension_mismatch,
                    "parallelepiped needs d generators");
            for (const auto& g : p.gens)
              require(g.dim() == d, Errc::dimension_mismatch, "generator dimension");
            ScalarModule D = det_module(p.gens);
            require(!D.is_zero() && std::fabs(D.to_double(ctx)) > 1e-12, Errc::degenerate,
                    "parallelepiped has zero volume");
          },
          [&](const Zonotope& z) {
            require(static_cast<int>(z.gens.size()) >= d, Errc::dimension_mismatch,
                    "zonotope needs at least d generators");
            for (const auto& g : z.gens)
              require(g.dim() == d, Errc::dimension_mismatch, "generator dimension");
            require(!volume_symbolic(z, ctx).is_zero(), Errc::degenerate,
                    "zonotope generators do not span");
          },
          [&](const Polyhedron3D& p) {
            require(p.vertices.size() >= 4 && p.faces.size() >= 4, Errc::degenerate,
                    "polyhedron needs 4 vertices and 4 faces");
            for (const auto& v : p.vertices)
              require(v.dim() == 3, Errc::dimension_mismatch, "polyhedron vertex dimension");
            for (const auto& f : p.faces) {
              require(f.size() >= 3, Errc::degenerate, "face needs 3 vertices");
              for (int i : f)
                require(i >= 0 && i < static_cast<int>(p.vertices.size()), Errc::parse_error,
                        "face index out of range");
            }
            require(!volume_symbolic(p, ctx).is_zero(), Errc::degenerate,
                    "polyhedron has zero volume");
          },
          [&](const RealParallelepiped& r) {
            require(static_cast<int>(r.gens.size()) == d, Errc::dimension_mismatch,
                    "parallelepiped needs d generators");
            require(volume_numeric(r, ctx) > 1e-12, Errc::degenerate,
                    "parallelepiped has zero volume");
          },
          [&](const FramedPolygon& f) {
            validate(SetDescription(f.frame), ctx);
            require(f.j != f.k && f.j >= 0 && f.k >= 0 && f.j < d && f.k < d,
                    Errc::dimension_mismatch, "framed polygon coordinate pair");
            require(f.region.size() >= 3, Errc::degenerate, "region needs 3 vertices");
            for (const auto& [a, b] : f.region)
              require(a >= 0 && a <= 1 && b >= 0 && b <= 1, Errc::degenerate,
                      "region must lie in the unit square");
            require(polygon_area_q(f.region, d).c0() > 0, Errc::degenerate,
                    "region must be counterclockwise");
          },
          [&](const DisjointUnion& u) {
            require(!u.members.empty(), Errc::degenerate, "empty disjoint union");
            for (const auto& m : u.members) {
              require(m.dim() == d, Errc::dimension_mismatch, "union member dimension");
              validate(m, ctx);
            }
          },
      },
      s.shape);
}

ScalarModule polygon_area(const std::vector<ModuleVector>& verts) {
  ScalarModule a(2);
  const size_t n = verts.size();
  for (size_t i = 0; i < n; ++i) a += cross(verts[i], verts[(i + 1) % n]);
  return a * Rational(1, 2);
}

bool is_convex_ccw(const Polygon2D& p, const AlphaContext& ctx) {
  const size_t n = p.vertices.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const auto& a = p.vertices[i];
    const auto& b = p.vertices[(i + 1) % n];
    const auto& c = p.vertices[(i + 2) % n];
    if (sign(cross(b - a, c - b), ctx) <= 0) return false;
  }
  // All left turns; a simple polygon with this property winds once.
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_meet(p.vertices[i], p.vertices[(i + 1) % n], p.vertices[j],
                        p.vertices[(j + 1) % n], ctx))
        return false;
    }
  return true;
}

Polygon2D normalize_polygon(std::vector<ModuleVector> v, const AlphaContext& ctx) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (size_t i = 0; i < v.size(); ++i) {
      const size_t n = v.size();
      const auto& a = v[(i + n - 1) % n];
      const auto& b = v[i];
      const auto& c = v[(i + 1) % n];
      if (a == b || cross(b - a, c - b).is_zero()) {
        v.erase(v.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (v.size() >= 3 && sign(polygon_area(v), ctx) < 0) std::reverse(v.begin(), v.end());
  return Polygon2D{std::move(v)};
}

Polygon2D zonogon_polygon(const Zonotope& z, const AlphaContext& ctx) {
  if (z.base.dim() != 2) throw Error(Errc::dimension_mismatch, "zonogon_polygon needs d=2");
  ModuleVector start = z.base;
  std::vector<ModuleVector> up;
  for (const auto& g : z.gens) {
    if (g.is_zero()) continue;
    int sy = sign(g.component(1), ctx);
    int sx = sign(g.component(0), ctx);
    if (sy < 0 || (sy == 0 && sx < 0)) {
      start += g;
      up.push_back(-g);
    } else {
      up.push_back(g);
    }
  }
  std::sort(up.begin(), up.end(), [&](const ModuleVector& a, const ModuleVector& b) {
    return sign(cross(a, b), ctx) > 0;
  });
  std::vector<ModuleVector> merged;
  for (const auto& g : up) {
    if (!merged.empty() && cross(merged.back(), g).is_zero())
      merged.back() += g;
    else
      merged.push_back(g);
  }
  std::vector<ModuleVector> verts{start};
  for (const auto& g : merged) verts.push_back(verts.back() + g);
  for (size_t i = 0; i + 1 < merged.size(); ++i) verts.push_back(verts.back() - merged[i]);
  return Polygon2D{std::move(verts)};
}

Polygon2D parallelogram_polygon(const Parallelepiped& p, const AlphaContext& ctx) {
  if (p.base.dim() != 2) throw Error(Errc::dimension_mismatch, "parallelogram_polygon needs d=2");
  const auto &a = p.gens[0], &b = p.gens[1];
  std::vector<ModuleVector> v{p.base, p.base + a, p.base + a + b, p.base + b};
  if (sign(cross(a, b), ctx) < 0) std::reverse(v.begin(), v.end());
  return Polygon2D{std::move(v)};
}

ModuleVector frame_point(const Parallelepiped& frame, const std::vector<Rational>& t) {
  ModuleVector p = frame.base;
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] != 0) p += frame.gens[i] * t[i];
  return p;
}

std::optional<Polygon2D> as_polygon(const SetDescription& s, const AlphaContext& ctx) {
  if (s.dim() != 2) return std::nullopt;
  if (auto* p = std::get_if<Polygon2D>(&s.shape)) return *p;
  if (auto* p = std::get_if<Parallelepiped>(&s.shape)) return parallelogram_polygon(*p, ctx);
  if (auto* z = std::get_if<Zonotope>(&s.shape)) return zonogon_polygon(*z, ctx);
  if (auto* f = std::get_if<FramedPolygon>(&s.shape)) {
    std::vector<ModuleVector> v;
    for (const auto& [a, b] : f->region) {
      std::vector<Rational> t(2);
      t[f->j] = a;
      t[f->k] = b;
      v.push_back(frame_point(f->frame, t));
    }
    return normalize_polygon(std::move(v), ctx);
  }
  return std::nullopt;
}

std::vector<Parallelepiped> shephard_tiling(const Zonotope& z, const AlphaContext& ctx,
                                            unsigned seed) {
  const int d = z.base.dim();
  std::vector<ModuleVector> gens;
  for (const auto& g : z.gens)
    if (!g.is_zero()) gens.push_back(g);
  const int n = static_cast<int>(gens.size());
  std::vector<std::vector<Real>> gv;
  for (const auto& g : gens) gv.push_back(g.value(ctx));
  std::mt19937_64 rng(seed + 0x5eed);
  const Real tiny = make_real(1e-40);
  for (int attempt = 0; attempt < 16; ++attempt) {
    // Generic lifting heights.
    std::vector<Real> h(n);
    for (auto& x : h)
      x = to_real(Rational(static_cast<long>(rng() % 1000003) + 1, 1000003)) + make_real(0.5);
    std::vector<Parallelepiped> tiles;
    bool ok = true;
    for_each_subset(n, d, [&](const std::vector<int>& idx) {
      if (!ok) return;
      std::vector<ModuleVector> sub;
      for (int i : idx) sub.push_back(gens[i]);
      if (det_module(sub).is_zero()) return;
      // Lower facet normal (lambda, 1): <g_i, lambda> = -h_i for i in idx.
      Matrix<Real> m(d, std::vector<Real>(d));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m[r][c] = gv[idx[r]][c];
      Matrix<Real> inv = inverse_real(m);
      std::vector<Real> lambda(d, make_real(0));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) lambda[r] -= inv[r][c] * h[idx[c]];
      ModuleVector base = z.base;
      for (int j = 0; j < n; ++j) {
        if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
        Real s = h[j];
        for (int c = 0; c < d; ++c) s += gv[j][c] * lambda[c];
        if (abs(s) < tiny) {
          ok = false;
          return;
        }
        if (s < 0) base += gens[j];
      }
      tiles.push_back(Parallelepiped{base, sub});
    });
    if (ok) return tiles;
  }
  throw Error(Errc::degenerate, "shephard_tiling: no generic lifting found");
}

RealizedCylinder realize_cylinder(const CylinderRecipe& r, const std::vector<double>& alpha) {
  const int d = r.dim();
  if (static_cast<int>(alpha.size()) != d)
    throw Error(Errc::dimension_mismatch, "realize_cylinder: alpha dimension");
  const int L = static_cast<int>(r.levels.size());
  RealizedCylinder out;
  out.rotations.assign(L + 1, {});
  out.rotations[L] = alpha;
  std::vector<std::vector<double>> vs(L);
  for (int li = L - 1; li >= 0; --li) {
    const auto& lv = r.levels[li];
    const auto& rho = out.rotations[li + 1];
    const int k = li + 2;
    std::vector<double> v(k);
    if (lv.prism) {
      v[k - 1] = 1.0;
      out.rotations[li].assign(rho.begin(), rho.end() - 1);
    } else {
      if (static_cast<int>(lv.p.size()) != k)
        throw Error(Errc::dimension_mismatch, "cylinder level vector dimension");
      for (int i = 0; i < k; ++i) v[i] = static_cast<double>(lv.q) * rho[i] + static_cast<double>(lv.p[i]);
      if (v[k - 1] == 0.0 || (lv.q == 0 && lv.p[k - 1] == 0))
        throw Error(Errc::invalid_parametrization, "cylinder direction has zero last coordinate");
      out.rotations[li].resize(k - 1);
      for (int i = 0; i + 1 < k; ++i) out.rotations[li][i] = v[i] / v[k - 1];
    }
    vs[li] = std::move(v);
  }
  double l = static_cast<double>(r.base_q) * out.rotations[0][0] + static_cast<double>(r.base_p);
  if (!(l > 0)) throw Error(Errc::invalid_parametrization, "cylinder base length must be positive");
  out.base_length = l;
  RealParallelepiped& g = out.geometry;
  g.base = {r.start_q.get_d() * out.rotations[0][0] + r.start_p.get_d()};
  g.gens = {{l}};
  for (int li = 0; li < L; ++li) {
    g.base.push_back(0.0);
    for (auto& v : g.gens) v.push_back(0.0);
    g.gens.push_back(vs[li]);
  }
  g.recipe = r;
  return out;
}

}  // namespace brs
