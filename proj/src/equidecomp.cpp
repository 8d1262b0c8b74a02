#include <algorithm>
#include <tuple>

#include "brs/equidecomp.hpp"
#include "brs/error.hpp"
#include "brs/invariants.hpp"

namespace brs {

namespace {

bool less(const ScalarModule& a, const ScalarModule& b, const AlphaContext& ctx) { return compare(a, b, ctx) < 0; }

Integer ceil_exact(const ScalarModule& s, const AlphaContext& ctx) { return -floor_exact(-s, ctx); }

// ---------------------------------------------------------------- 1D

struct RawPiece {
  Interval iv;
  long n;
  Integer k;
};

// Integer lifts [lo + k, hi + k) of the cell lying in some interval of u, ascending.
std::vector<Integer> cell_lifts(const IntervalUnion1D& u, const ScalarModule& lo, const ScalarModule& hi,
                                const AlphaContext& ctx) {
  std::vector<Integer> out;
  for (const auto& i : u.intervals)
    for (Integer k = ceil_exact(i.a - lo, ctx), kmax = floor_exact(i.b - hi, ctx); k <= kmax; ++k) out.push_back(k);
  return out;
}

std::optional<std::vector<Interval>> as_intervals(const SetDescription& s, const AlphaContext& ctx) {
  if (auto* u = std::get_if<IntervalUnion1D>(&s.shape)) return u->intervals;
  if (auto* p = std::get_if<Parallelepiped>(&s.shape); p && p->base.dim() == 1) {
    ScalarModule a = p->base.component(0), b = a + p->gens[0].component(0);
    if (less(b, a, ctx)) std::swap(a, b);
    return std::vector<Interval>{{a, b}};
  }
  if (auto* d = std::get_if<DisjointUnion>(&s.shape)) {
    std::vector<Interval> out;
    for (const auto& m : d->members) {
      auto sub = as_intervals(m, ctx);
      if (!sub) return std::nullopt;
      out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
  }
  return std::nullopt;
}

// Pieces sorted, pairwise disjoint, and with union equal to `whole`.
std::optional<std::string> tiles_exactly(std::vector<Interval> parts, const std::vector<Interval>& whole,
                                         const AlphaContext& ctx) {
  std::sort(parts.begin(), parts.end(), [&](const Interval& x, const Interval& y) { return less(x.a, y.a, ctx); });
  for (size_t i = 0; i < parts.size(); ++i) {
    if (!less(parts[i].a, parts[i].b, ctx)) return "empty piece [" + format_scalar(parts[i].a) + ", ...)";
    if (i + 1 < parts.size() && less(parts[i + 1].a, parts[i].b, ctx))
      return "pieces overlap near " + format_scalar(parts[i + 1].a);
  }
  if (!same_set(canonical_union(parts, ctx), canonical_union(whole, ctx), ctx)) return "union of pieces differs";
  return std::nullopt;
}

// ---------------------------------------------------------------- 2D

using Poly = std::vector<ModuleVector>;

std::optional<std::vector<Poly>> convex_members(const SetDescription& s, const AlphaContext& ctx) {
  if (auto* d = std::get_if<DisjointUnion>(&s.shape)) {
    std::vector<Poly> out;
    for (const auto& m : d->members) {
      auto sub = convex_members(m, ctx);
      if (!sub) return std::nullopt;
      out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
  }
  auto p = as_polygon(s, ctx);
  if (!p) return std::nullopt;
  auto n = normalize_polygon(p->vertices, ctx);
  if (n.vertices.size() < 3 || !is_convex_ccw(n, ctx)) return std::nullopt;
  return std::vector<Poly>{n.vertices};
}

std::optional<std::string> packs_into(const std::vector<Poly>& parts, const std::vector<Poly>& whole,
                                      const AlphaContext& ctx) {
  for (size_t i = 0; i < parts.size(); ++i) {
    bool inside = std::any_of(whole.begin(), whole.end(),
                              [&](const Poly& w) { return convex_contains(w, parts[i], ctx); });
    if (!inside) return "piece " + std::to_string(i) + " is not inside a single member";
  }
  for (size_t i = 0; i < parts.size(); ++i)
    for (size_t j = i + 1; j < parts.size(); ++j)
      if (!interiors_disjoint(parts[i], parts[j], ctx))
        return "pieces " + std::to_string(i) + " and " + std::to_string(j) + " overlap";
  return std::nullopt;
}

// ---------------------------------------------------------------- frames (d >= 3)

using QPoint = std::pair<Rational, Rational>;
using QPoly = std::vector<QPoint>;

Rational qcross(const QPoint& o, const QPoint& a, const QPoint& b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

QPoly ccw(QPoly p) {
  Rational area = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    area += a.first * b.second - a.second * b.first;
  }
  if (area < 0) std::reverse(p.begin(), p.end());
  return p;
}

bool in_unit_square(const QPoly& p) {
  return std::all_of(p.begin(), p.end(), [](const QPoint& x) {
    return x.first >= 0 && x.first <= 1 && x.second >= 0 && x.second <= 1;
  });
}

bool q_disjoint(const QPoly& p, const QPoly& q) {
  auto separates = [](const QPoly& x, const QPoly& y) {
    for (size_t i = 0; i < x.size(); ++i) {
      const auto& a = x[i];
      const auto& b = x[(i + 1) % x.size()];
      if (std::all_of(y.begin(), y.end(), [&](const QPoint& pt) { return qcross(a, b, pt) <= 0; })) return true;
    }
    return false;
  };
  return separates(p, q) || separates(q, p);
}

std::vector<Rational> coords(const ModuleVector& v) {
  std::vector<Rational> c{v.r()};
  c.insert(c.end(), v.m().begin(), v.m().end());
  return c;
}

// (c, e) with x = c*u + e*w over Q, if it exists.
std::optional<std::pair<Rational, Rational>> solve_plane(const ModuleVector& x, const ModuleVector& u,
                                                         const ModuleVector& w) {
  const auto cx = coords(x), cu = coords(u), cw = coords(w);
  for (size_t i = 0; i < cx.size(); ++i)
    for (size_t j = i + 1; j < cx.size(); ++j) {
      const Rational det = cu[i] * cw[j] - cu[j] * cw[i];
      if (det == 0) continue;
      Rational c = (cx[i] * cw[j] - cx[j] * cw[i]) / det;
      Rational e = (cu[i] * cx[j] - cu[j] * cx[i]) / det;
      c.canonicalize();
      e.canonicalize();
      if (u * c + w * e != x) return std::nullopt;
      return std::make_pair(c, e);
    }
  return std::nullopt;
}

bool same_frame(const Parallelepiped& a, const Parallelepiped& b) { return a.base == b.base && a.gens == b.gens; }

VerificationResult verify_frames(const SetDescription& a, const SetDescription& b,
                                 const std::vector<DecompositionPiece>& pieces) {
  auto unsupported = [](std::string why) { return VerificationResult{false, "unsupported", std::move(why)}; };
  auto* pa = std::get_if<Parallelepiped>(&a.shape);
  auto* pb = std::get_if<Parallelepiped>(&b.shape);
  if (!pa || !pb) return unsupported("d >= 3 needs parallelepiped source and target");
  std::vector<const FramedPolygon*> fp;
  for (const auto& p : pieces) {
    auto* f = std::get_if<FramedPolygon>(&p.piece.shape);
    if (!f || !same_frame(f->frame, *pa)) return unsupported("pieces must be framed polygons of the source");
    if (!fp.empty() && (f->j != fp.front()->j || f->k != fp.front()->k))
      return unsupported("pieces use different shear planes");
    fp.push_back(f);
  }
  if (fp.empty()) return unsupported("no pieces");
  const int j = fp.front()->j, k = fp.front()->k;
  const int d = static_cast<int>(pa->gens.size());
  if (pb->base != pa->base) return {false, "target", "target base differs from the source frame"};
  for (int i = 0; i < d; ++i)
    if (i != k && pb->gens[i] != pa->gens[i]) return {false, "target", "target is not a shear of the source"};
  auto sh = solve_plane(pb->gens[k] - pa->gens[k], pa->gens[j], pa->gens[k]);
  if (!sh || sh->second != 0) return {false, "target", "target is not a shear along v_j"};
  const Rational s = sh->first;

  std::vector<QPoly> src, dst;
  for (size_t n = 0; n < pieces.size(); ++n) {
    QPoly r;
    for (const auto& [x, y] : fp[n]->region) r.push_back({x, y});
    src.push_back(ccw(r));
    auto ce = solve_plane(pieces[n].shift, pa->gens[j], pa->gens[k]);
    if (!ce) return {false, "target", "shift of piece " + std::to_string(n) + " leaves the shear plane"};
    QPoly t;
    for (const auto& [x, y] : r) {
      const Rational yy = y + ce->second;
      t.push_back({x + ce->first - s * yy, yy});
    }
    dst.push_back(ccw(t));
  }
  for (auto [parts, name] : {std::pair{&src, "source"}, std::pair{&dst, "target"}}) {
    for (size_t n = 0; n < parts->size(); ++n)
      if (!in_unit_square((*parts)[n])) return {false, name, "piece " + std::to_string(n) + " leaves the frame"};
    for (size_t n = 0; n < parts->size(); ++n)
      for (size_t m = n + 1; m < parts->size(); ++m)
        if (!q_disjoint((*parts)[n], (*parts)[m]))
          return {false, name, "pieces " + std::to_string(n) + " and " + std::to_string(m) + " overlap"};
  }
  return {true, "", ""};
}

// Rational half-plane clip of a polygon in (t_j, t_k) coordinates: keep A*x + B*y + C >= 0.
QPoly clip_q(const QPoly& p, const Rational& A, const Rational& B, const Rational& C) {
  QPoly out;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    const Rational fu = A * u.first + B * u.second + C, fv = A * v.first + B * v.second + C;
    if (fu >= 0) out.push_back(u);
    if ((fu > 0 && fv < 0) || (fu < 0 && fv > 0)) {
      Rational lam = fu / (fu - fv);
      lam.canonicalize();
      out.push_back({u.first + lam * (v.first - u.first), u.second + lam * (v.second - u.second)});
    }
  }
  QPoly clean;
  for (const auto& x : out)
    if (clean.empty() || clean.back() != x) clean.push_back(x);
  while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
  return clean;
}

Rational q_area(const QPoly& p) {
  Rational a = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u.first * v.second - u.second * v.first;
  }
  return a / 2;
}

}  // namespace

std::vector<DecompositionPiece> decompose_1d(const IntervalUnion1D& a, const IntervalUnion1D& b,
                                             const AlphaContext& ctx, long n_max) {
  if (ctx.d != 1) throw Error(Errc::dimension_mismatch, "decompose_1d needs d=1");
  IntervalUnion1D ra = canonical_union(a.intervals, ctx), rb = canonical_union(b.intervals, ctx);
  if (total_length(ra) != total_length(rb))
    throw Error(Errc::unequal_measures,
                "measures " + format_scalar(total_length(ra)) + " and " + format_scalar(total_length(rb)) + " differ");
  if (!oren_test(ra).brs || !oren_test(rb).brs)
    throw Error(Errc::oren_failure, "an input fails the endpoint matching condition");

  std::vector<RawPiece> raw;
  const ScalarModule one = ScalarModule::constant(1, 1);
  for (long n = 0; !ra.intervals.empty(); ++n) {
    if (n > n_max) throw Error(Errc::n_max_exceeded, "pieces remain after n = " + std::to_string(n_max));
    const ScalarModule na = ScalarModule::alpha(1, 0, n);
    std::vector<ScalarModule> cuts{ScalarModule(1)};
    for (const auto& i : ra.intervals) {
      cuts.push_back(torus_reduce(i.a, ctx));
      cuts.push_back(torus_reduce(i.b, ctx));
    }
    for (const auto& i : rb.intervals) {
      cuts.push_back(torus_reduce(i.a - na, ctx));
      cuts.push_back(torus_reduce(i.b - na, ctx));
    }
    std::sort(cuts.begin(), cuts.end(), [&](const ScalarModule& x, const ScalarModule& y) { return less(x, y, ctx); });
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Interval> used_a, used_b;
    for (size_t c = 0; c < cuts.size(); ++c) {
      const ScalarModule& lo = cuts[c];
      const ScalarModule hi = c + 1 < cuts.size() ? cuts[c + 1] : one;
      const auto la = cell_lifts(ra, lo, hi, ctx);
      if (la.empty()) continue;
      const auto lb = cell_lifts(rb, lo + na, hi + na, ctx);
      for (size_t m = 0; m < std::min(la.size(), lb.size()); ++m) {
        const ScalarModule ka = ScalarModule::constant(1, Rational(la[m]));
        const ScalarModule kb = ScalarModule::constant(1, Rational(lb[m]));
        raw.push_back({{lo + ka, hi + ka}, n, lb[m] - la[m]});
        used_a.push_back({lo + ka, hi + ka});
        used_b.push_back({lo + na + kb, hi + na + kb});
      }
    }
    ra = interval_difference(ra, canonical_union(used_a, ctx), ctx);
    rb = interval_difference(rb, canonical_union(used_b, ctx), ctx);
  }

  std::sort(raw.begin(), raw.end(), [&](const RawPiece& x, const RawPiece& y) {
    if (x.n != y.n) return x.n < y.n;
    if (x.k != y.k) return x.k < y.k;
    return less(x.iv.a, y.iv.a, ctx);
  });
  std::vector<DecompositionPiece> out;
  const RawPiece* prev = nullptr;
  for (const auto& p : raw) {
    if (prev && prev->n == p.n && prev->k == p.k &&
        std::get<IntervalUnion1D>(out.back().piece.shape).intervals[0].b == p.iv.a) {
      std::get<IntervalUnion1D>(out.back().piece.shape).intervals[0].b = p.iv.b;
    } else {
      out.push_back({IntervalUnion1D{{p.iv}}, ModuleVector(Rational(p.n), {Rational(p.k)})});
    }
    prev = &p;
  }
  return out;
}

ShearDecomposition shear_decompose(const Parallelepiped& p, int j, int k, const Rational& s, const AlphaContext& ctx) {
  const int d = p.base.dim();
  if (static_cast<int>(p.gens.size()) != d || j < 0 || k < 0 || j >= d || k >= d || j == k)
    throw Error(Errc::invalid_parametrization, "shear needs distinct generator indices j, k");
  if (!is_lattice_member(p.gens[j]))
    throw Error(Errc::non_lattice_generator, "v_j = " + format_vector(p.gens[j]) + " is not in Z*alpha + Z^d");
  (void)ctx;
  ShearDecomposition out;
  out.target = p;
  out.target.gens[k] += p.gens[j] * s;
  const QPoly square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  // Piece c holds the (t_j, t_k) with s*t_k - c <= t_j < s*t_k - c + 1 and moves by c*v_j.
  const Integer lo = floor_q(std::min(Rational(0), s)) - 1, hi = ceil_q(std::max(Rational(0), s)) + 1;
  for (Integer c = lo; c <= hi; ++c) {
    const Rational cq(c);
    QPoly r = clip_q(square, 1, -s, cq);
    r = clip_q(r, -1, s, 1 - cq);
    if (r.size() < 3 || q_area(r) <= 0) continue;
    FramedPolygon f{p, j, k, {}};
    for (const auto& x : r) f.region.push_back(x);
    out.pieces.push_back({std::move(f), p.gens[j] * cq});
  }
  return out;
}

VerificationResult verify_decomposition(const SetDescription& a, const SetDescription& b,
                                        const std::vector<DecompositionPiece>& pieces, const AlphaContext& ctx) {
  for (size_t i = 0; i < pieces.size(); ++i)
    if (!is_lattice_member(pieces[i].shift))
      return {false, "shift", "shift " + format_vector(pieces[i].shift) + " of piece " + std::to_string(i) +
                                  " is not in Z*alpha + Z^d"};
  const int d = a.dim();
  if (b.dim() != d || d != ctx.d) return {false, "unsupported", "dimensions differ"};
  bool exact = a.is_exact() && b.is_exact();
  for (const auto& p : pieces) exact = exact && p.piece.is_exact() && p.piece.dim() == d;
  if (!exact) return {false, "unsupported", "numeric-only sets cannot be verified exactly"};

  ScalarModule sum(d);
  for (const auto& p : pieces) sum += volume_symbolic(p.piece, ctx);
  const ScalarModule va = volume_symbolic(a, ctx), vb = volume_symbolic(b, ctx);
  if (sum != va || va != vb)
    return {false, "measure",
            "pieces " + format_scalar(sum) + ", source " + format_scalar(va) + ", target " + format_scalar(vb)};

  if (d == 1) {
    auto ia = as_intervals(a, ctx), ib = as_intervals(b, ctx);
    if (!ia || !ib) return {false, "unsupported", "1D sets must be interval unions"};
    std::vector<Interval> src, dst;
    for (const auto& p : pieces) {
      auto iv = as_intervals(p.piece, ctx);
      if (!iv) return {false, "unsupported", "1D pieces must be interval unions"};
      const ScalarModule t = p.shift.component(0);
      for (const auto& i : *iv) {
        src.push_back(i);
        dst.push_back({i.a + t, i.b + t});
      }
    }
    if (auto why = tiles_exactly(src, *ia, ctx)) return {false, "source", *why};
    if (auto why = tiles_exactly(dst, *ib, ctx)) return {false, "target", *why};
    return {true, "", ""};
  }

  if (d == 2) {
    auto ma = convex_members(a, ctx), mb = convex_members(b, ctx);
    if (!ma || !mb) return {false, "unsupported", "2D sets must be unions of convex polygons"};
    std::vector<Poly> src, dst;
    for (const auto& p : pieces) {
      auto m = convex_members(p.piece, ctx);
      if (!m || m->size() != 1) return {false, "unsupported", "2D pieces must be convex polygons"};
      src.push_back(m->front());
      Poly moved = m->front();
      for (auto& x : moved) x += p.shift;
      dst.push_back(std::move(moved));
    }
    if (auto why = packs_into(src, *ma, ctx)) return {false, "source", *why};
    if (auto why = packs_into(dst, *mb, ctx)) return {false, "target", *why};
    return {true, "", ""};
  }

  return verify_frames(a, b, pieces);
}

TransferFn chain_transfer(TransferFn g_source, const SetDescription& a, const SetDescription& b,
                          const std::vector<DecompositionPiece>& pieces, const AlphaContext& ctx) {
  auto v = verify_decomposition(a, b, pieces, ctx);
  if (!v.ok) throw Error(Errc::unverified_decomposition, v.failed_check + ": " + v.detail);
  std::vector<ChainPiece> chain;
  for (const auto& p : pieces) chain.push_back({p.piece, p.shift.r().get_num().get_si()});
  return chain_transfer(std::move(g_source), chain, ctx);
}

}  // namespace brs
