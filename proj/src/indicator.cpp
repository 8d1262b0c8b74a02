#include "brs/indicator.hpp"

#include <algorithm>
#include <cmath>

#include "brs/error.hpp"
#include "brs/linalg.hpp"

namespace brs {

namespace {

// Integer shifts k with x + k possibly in [lo, hi] for some x in [0,1)^d.
std::vector<std::vector<long>> shift_box(const std::vector<double>& lo, const std::vector<double>& hi,
                                         size_t dims) {
  std::vector<std::vector<long>> out{{}};
  for (size_t i = 0; i < dims; ++i) {
    long a = static_cast<long>(std::floor(lo[i])) - 1;
    long b = static_cast<long>(std::ceil(hi[i]));
    std::vector<std::vector<long>> next;
    for (const auto& s : out)
      for (long k = a; k <= b; ++k) {
        auto t = s;
        t.push_back(k);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

constexpr int kMaxDim = 16;

inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

double seg_dist(double px, double py, double ax, double ay, double bx, double by) {
  double dx = bx - ax, dy = by - ay;
  double l2 = dx * dx + dy * dy;
  double t = l2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double ex = ax + t * dx - px, ey = ay + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

Indicator::Indicator(const SetDescription& s, const AlphaContext& ctx) : d_(s.dim()) {
  if (d_ < 1 || d_ > kMaxDim) throw Error(Errc::dimension_mismatch, "Indicator: unsupported dimension");
  add(s, ctx);
}

void Indicator::add(const SetDescription& s, const AlphaContext& ctx) {
  auto dbl = [&](const std::vector<ModuleVector>& vs) {
    std::vector<std::vector<double>> g;
    for (const auto& v : vs) g.push_back(v.to_double(ctx));
    return g;
  };
  if (auto* u = std::get_if<IntervalUnion1D>(&s.shape)) {
    for (const auto& iv : u->intervals) intervals_.push_back({iv.a.to_double(ctx), iv.b.to_double(ctx)});
  } else if (auto* p = std::get_if<Parallelepiped>(&s.shape)) {
    add_frame(p->base.to_double(ctx), dbl(p->gens), nullptr);
  } else if (auto* r = std::get_if<RealParallelepiped>(&s.shape)) {
    add_frame(r->base, r->gens, nullptr);
  } else if (auto* f = std::get_if<FramedPolygon>(&s.shape)) {
    add_frame(f->frame.base.to_double(ctx), dbl(f->frame.gens), f);
  } else if (auto* z = std::get_if<Zonotope>(&s.shape)) {
    if (d_ == 2) {
      add(SetDescription(zonogon_polygon(*z, ctx)), ctx);
    } else {
      for (const auto& t : shephard_tiling(*z, ctx)) add_frame(t.base.to_double(ctx), dbl(t.gens), nullptr);
    }
  } else if (auto* pg = std::get_if<Polygon2D>(&s.shape)) {
    Poly poly;
    poly.lo[0] = poly.lo[1] = HUGE_VAL;
    poly.hi[0] = poly.hi[1] = -HUGE_VAL;
    for (const auto& v : pg->vertices) {
      auto p2 = v.to_double(ctx);
      poly.xs.push_back(p2[0]);
      poly.ys.push_back(p2[1]);
      for (int i = 0; i < 2; ++i) {
        poly.lo[i] = std::min(poly.lo[i], p2[i]);
        poly.hi[i] = std::max(poly.hi[i], p2[i]);
      }
    }
    poly.shifts = shift_box({poly.lo[0], poly.lo[1]}, {poly.hi[0], poly.hi[1]}, 2);
    polys_.push_back(std::move(poly));
  } else if (auto* ph = std::get_if<Polyhedron3D>(&s.shape)) {
    Halfspaces h;
    std::vector<std::vector<double>> vs = dbl(ph->vertices);
    double cen[3] = {0, 0, 0};
    for (const auto& v : vs)
      for (int i = 0; i < 3; ++i) cen[i] += v[i] / static_cast<double>(vs.size());
    for (const auto& f : ph->faces) {
      const auto &a = vs[f[0]], &b = vs[f[1]], &c = vs[f[2]];
      double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
      double w[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
      double n[3] = {u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
      double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
      for (double& x : n) x /= len;
      double off = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
      if (n[0] * cen[0] + n[1] * cen[1] + n[2] * cen[2] > off) {
        for (double& x : n) x = -x;
        off = -off;
      }
      h.n.insert(h.n.end(), n, n + 3);
      h.c.push_back(off);
    }
    BBox bb = bounding_box(s, ctx);
    h.shifts = shift_box(bb.lo, bb.hi, 3);
    hulls_.push_back(std::move(h));
  } else if (auto* du = std::get_if<DisjointUnion>(&s.shape)) {
    for (const auto& m : du->members) add(m, ctx);
  }
}

void Indicator::add_frame(const std::vector<double>& base, const std::vector<std::vector<double>>& gens,
                          const FramedPolygon* region) {
  const int d = d_;
  Frame f;
  f.base = base;
  Matrix<double> g(d, std::vector<double>(d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) g[i][k] = gens[k][i];
  Matrix<double> inv = inverse_double(g);
  f.w.resize(d * d);
  f.rownorm.resize(d);
  for (int r = 0; r < d; ++r) {
    double s = 0;
    for (int i = 0; i < d; ++i) {
      f.w[r * d + i] = inv[r][i];
      s += inv[r][i] * inv[r][i];
    }
    f.rownorm[r] = std::sqrt(s);
  }
  std::vector<double> lo = base, hi = base;
  for (const auto& v : gens)
    for (int i = 0; i < d; ++i) (v[i] < 0 ? lo : hi)[i] += v[i];
  f.head = shift_box(lo, hi, d - 1);
  f.klo = static_cast<long>(std::floor(lo[d - 1])) - 1;
  f.khi = static_cast<long>(std::ceil(hi[d - 1]));
  for (const auto& h : f.head)
    for (int r = 0; r < d; ++r) {
      double s = 0;
      for (int i = 0; i + 1 < d; ++i) s += f.w[r * d + i] * static_cast<double>(h[i]);
      f.whead.push_back(s);
    }
  if (region) {
    f.j = region->j;
    f.k = region->k;
    const auto& R = region->region;
    for (size_t i = 0; i < R.size(); ++i) {
      const auto& p = R[i];
      const auto& q = R[(i + 1) % R.size()];
      double px = p.first.get_d(), py = p.second.get_d();
      double a = Rational(q.second - p.second).get_d();
      double b = -Rational(q.first - p.first).get_d();
      f.ra.push_back(a);
      f.rb.push_back(b);
      f.rc.push_back(a * px + b * py);
    }
  }
  frames_.push_back(std::move(f));
}

int Indicator::frame_count(const Frame& f, const double* x, double slack, double* nearest) const {
  const int d = d_;
  double pwy[kMaxDim];
  for (int r = 0; r < d; ++r) {
    double s = 0;
    for (int i = 0; i < d; ++i) s += f.w[r * d + i] * (x[i] - f.base[i]);
    pwy[r] = s;
  }
  int count = 0;
  double c[kMaxDim], t[kMaxDim];
  for (size_t h = 0; h < f.head.size(); ++h) {
    double klo = static_cast<double>(f.klo), khi = static_cast<double>(f.khi);
    bool empty = false;
    for (int r = 0; r < d && !empty; ++r) {
      c[r] = pwy[r] + f.whead[h * d + r];
      const double w = f.w[r * d + d - 1];
      const double s = slack * f.rownorm[r];
      if (w == 0.0) {
        if (c[r] < -s - 1e-12 || c[r] > 1 + s + 1e-12) empty = true;
        continue;
      }
      double a = (-s - c[r]) / w, b = (1 + s - c[r]) / w;
      if (a > b) std::swap(a, b);
      klo = std::max(klo, std::ceil(a - 1e-9));
      khi = std::min(khi, std::floor(b + 1e-9));
      if (klo > khi) empty = true;
    }
    if (empty) continue;
    for (double kd = klo; kd <= khi; kd += 1.0) {
      bool in = true;
      for (int r = 0; r < d && in; ++r) {
        t[r] = c[r] + f.w[r * d + d - 1] * kd;
        const double s = slack * f.rownorm[r];
        in = t[r] >= -s && t[r] < 1 + s;
      }
      if (in && f.j >= 0) {
        for (size_t e = 0; e < f.ra.size() && in; ++e) {
          double lhs = f.ra[e] * t[f.j] + f.rb[e] * t[f.k];
          double s = slack * std::max(f.rownorm[f.j], f.rownorm[f.k]) *
                     std::hypot(f.ra[e], f.rb[e]);
          bool strict = f.ra[e] > 0 || (f.ra[e] == 0 && f.rb[e] > 0);
          in = strict ? lhs < f.rc[e] + s : lhs <= f.rc[e] + s;
        }
      }
      if (in) {
        ++count;
        if (nearest) {
          for (int r = 0; r < d; ++r)
            *nearest = std::min({*nearest, std::fabs(t[r]) / f.rownorm[r],
                                 std::fabs(1 - t[r]) / f.rownorm[r]});
        }
      }
    }
  }
  return count;
}

int Indicator::count(const double* x) const {
  double px[kMaxDim];
  for (int i = 0; i < d_; ++i) px[i] = frac(x[i]);
  int n = 0;
  for (const auto& iv : intervals_)
    n += static_cast<int>(std::ceil(iv.b - px[0]) - std::ceil(iv.a - px[0]));
  for (const auto& f : frames_) n += frame_count(f, px, 0.0, nullptr);
  for (const auto& p : polys_) {
    for (const auto& k : p.shifts) {
      double qx = px[0] + static_cast<double>(k[0]), qy = px[1] + static_cast<double>(k[1]);
      if (qx < p.lo[0] || qx > p.hi[0] || qy < p.lo[1] || qy > p.hi[1]) continue;
      bool inside = false;
      const size_t m = p.xs.size();
      for (size_t i = 0, j = m - 1; i < m; j = i++) {
        if ((p.ys[i] > qy) != (p.ys[j] > qy) &&
            qx < (p.xs[j] - p.xs[i]) * (qy - p.ys[i]) / (p.ys[j] - p.ys[i]) + p.xs[i])
          inside = !inside;
      }
      n += inside;
    }
  }
  for (const auto& h : hulls_) {
    for (const auto& k : h.shifts) {
      double q[3] = {px[0] + static_cast<double>(k[0]), px[1] + static_cast<double>(k[1]),
                     px[2] + static_cast<double>(k[2])};
      bool in = true;
      for (size_t fi = 0; fi < h.c.size() && in; ++fi)
        in = h.n[3 * fi] * q[0] + h.n[3 * fi + 1] * q[1] + h.n[3 * fi + 2] * q[2] < h.c[fi];
      n += in;
    }
  }
  return n;
}

bool Indicator::near_boundary(const double* x, double eps) const {
  std::vector<double> xr(d_);
  for (int i = 0; i < d_; ++i) xr[i] = frac(x[i]);
  for (const auto& iv : intervals_) {
    double da = frac(xr[0] - iv.a), db = frac(xr[0] - iv.b);
    if (std::min(da, 1 - da) < eps || std::min(db, 1 - db) < eps) return true;
  }
  for (const auto& f : frames_) {
    if (frame_count(f, xr.data(), eps, nullptr) != frame_count(f, xr.data(), -eps, nullptr)) return true;
  }
  for (const auto& p : polys_) {
    for (const auto& k : p.shifts) {
      double qx = xr[0] + static_cast<double>(k[0]), qy = xr[1] + static_cast<double>(k[1]);
      if (qx < p.lo[0] - eps || qx > p.hi[0] + eps || qy < p.lo[1] - eps || qy > p.hi[1] + eps) continue;
      const size_t m = p.xs.size();
      for (size_t i = 0, j = m - 1; i < m; j = i++)
        if (seg_dist(qx, qy, p.xs[j], p.ys[j], p.xs[i], p.ys[i]) < eps) return true;
    }
  }
  for (const auto& h : hulls_) {
    for (const auto& k : h.shifts) {
      double q[3] = {xr[0] + static_cast<double>(k[0]), xr[1] + static_cast<double>(k[1]),
                     xr[2] + static_cast<double>(k[2])};
      bool inside_expanded = true, touches = false;
      for (size_t fi = 0; fi < h.c.size(); ++fi) {
        double v = h.n[3 * fi] * q[0] + h.n[3 * fi + 1] * q[1] + h.n[3 * fi + 2] * q[2] - h.c[fi];
        if (v > eps) inside_expanded = false;
        if (std::fabs(v) <= eps) touches = true;
      }
      if (inside_expanded && touches) return true;
    }
  }
  return false;
}

}  // namespace brs
