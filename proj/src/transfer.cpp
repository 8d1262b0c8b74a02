#include "brs/transfer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "brs/constructions.hpp"
#include "brs/error.hpp"
#include "brs/indicator.hpp"
#include "brs/linalg.hpp"

namespace brs {

namespace {

constexpr double kTol = 1e-11;  // spatial tolerance for touching a facet boundary

double frac(double x) { return x - std::floor(x); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

long as_long(const Rational& q) { return q.get_num().get_si(); }

// Integer translates z for which facet f + z can meet the box [lo, hi].
template <class F>
void for_each_translate(const TransferSurface& s, const TransferFacet& f, const std::vector<double>& lo,
                        const std::vector<double>& hi, double pad, F&& fn) {
  const int d = s.d;
  std::vector<long> zlo(d), zhi(d);
  for (int i = 0; i < d; ++i) {
    double fmin = f.base_d[i], fmax = f.base_d[i];
    for (int k = 0; k < d; ++k) {
      if (k == f.r) continue;
      const double g = s.gens_d[k][i];
      (g < 0 ? fmin : fmax) += g;
    }
    zlo[i] = static_cast<long>(std::ceil(lo[i] - fmax - pad));
    zhi[i] = static_cast<long>(std::floor(hi[i] - fmin + pad));
    if (zlo[i] > zhi[i]) return;
  }
  std::vector<long> z = zlo;
  while (true) {
    fn(z);
    int i = 0;
    for (; i < d; ++i) {
      if (++z[i] <= zhi[i]) break;
      z[i] = zlo[i];
    }
    if (i == d) return;
  }
}

std::vector<double> dnorms(const TransferSurface& s) {
  std::vector<double> n;
  for (const auto& w : s.duals) n.push_back(norm(w));
  return n;
}

std::vector<double> pick_base_point(const TransferSurface& s) {
  std::mt19937_64 rng(0x7f4a7c15u);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<double> x(s.d);
    for (auto& v : x) v = U(rng);
    if (!near_surface(s, x, 1e-6)) return x;
  }
  throw Error(Errc::internal_consistency, "no base point away from the transfer surface");
}

TransferFn sum_of(std::vector<TransferFn> fs) {
  if (fs.size() == 1) return fs[0];
  return [fs = std::move(fs)](const std::vector<double>& x) {
    double t = 0;
    for (const auto& f : fs) t += f(x);
    return t;
  };
}

std::complex<double> unit_phase(const Real& xi) {
  // e(-xi) with xi reduced in high precision first.
  const double t = to_double(real_frac(xi));
  return std::polar(1.0, -2 * std::numbers::pi * t);
}

// Fourier transform of the indicator of [0,1) at xi.
std::complex<double> hat_unit(const ScalarModule& xi, const AlphaContext& ctx) {
  if (xi.is_rational() && is_integer(xi.c0())) return xi.c0() == 0 ? 1.0 : 0.0;
  const double x = xi.to_double(ctx);
  return (1.0 - unit_phase(xi.value(ctx))) / std::complex<double>(0, 2 * std::numbers::pi * x);
}

}  // namespace

TransferSurface build_surface(const Parallelepiped& P, const AlphaContext& ctx,
                              std::optional<std::vector<double>> x0) {
  const int d = static_cast<int>(P.gens.size());
  if (d < 1 || P.base.dim() != d || ctx.d != d) throw Error(Errc::dimension_mismatch, "build_surface dimension");
  for (const auto& v : P.gens)
    if (!is_lattice_member(v)) throw Error(Errc::non_lattice_generator, "generator " + format_vector(v));
  TransferSurface s;
  s.d = d;
  s.D = abs(det_module(P.gens), ctx);
  if (s.D.is_zero()) throw Error(Errc::degenerate, "generators are dependent");

  Matrix<Real> A(d, std::vector<Real>(d));
  for (int k = 0; k < d; ++k) {
    auto v = P.gens[k].value(ctx);
    for (int i = 0; i < d; ++i) A[i][k] = v[i];
  }
  const Matrix<Real> W = inverse_real(A);  // row r is v_r^*
  s.duals.assign(d, std::vector<double>(d));
  s.gens_d.assign(d, std::vector<double>(d));
  for (int r = 0; r < d; ++r)
    for (int i = 0; i < d; ++i) {
      s.duals[r][i] = to_double(W[r][i]);
      s.gens_d[r][i] = to_double(A[i][r]);
    }

  for (int r = 0; r < d; ++r) {
    const long q = as_long(P.gens[r].r());
    const long jlo = q > 0 ? 0 : q, jhi = q > 0 ? q : 0;
    for (long j = jlo; j < jhi; ++j) {
      TransferFacet f;
      f.r = r;
      f.j = j;
      f.base = P.base + ModuleVector::alpha(d, j);
      for (int k = 0; k < d; ++k)
        if (k != r) f.gens.push_back(P.gens[k]);
      f.sign = q > 0 ? 1 : -1;
      for (const auto& c : f.base.value(ctx)) f.base_d.push_back(to_double(real_frac(c)));
      s.facets.push_back(std::move(f));
    }
  }

  const Real D = s.D.value(ctx);
  s.omega.assign(d, 0);
  for (int i = 0; i < d; ++i) {
    Real w = make_real(0);
    for (int r = 0; r < d; ++r) w += D * W[r][i] * Real(as_long(P.gens[r].r()));
    const double wd = to_double(w);
    const double rounded = std::round(wd);
    s.omega_residual = std::max(s.omega_residual, std::fabs(wd - rounded));
    if (std::fabs(wd - rounded) > 1e-9)
      throw Error(Errc::internal_consistency, "omega is not integral (precision exhausted)");
    s.omega[i] = static_cast<long>(rounded);
  }

  s.x0 = x0 ? *x0 : pick_base_point(s);
  if (static_cast<int>(s.x0.size()) != d) throw Error(Errc::dimension_mismatch, "base point dimension");

  // Basic cycles: the count along y -> y + e_k must equal omega_k.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < d; ++k) {
    bool checked = false;
    for (int attempt = 0; attempt < 16 && !checked; ++attempt) {
      std::vector<double> y(d);
      for (auto& v : y) v = U(rng);
      auto e = y;
      e[k] += 1.0;
      try {
        if (intersection_number(s, y, e) != s.omega[k])
          throw Error(Errc::internal_consistency, "surface is not closed: basic cycle count differs from omega");
        checked = true;
      } catch (const Error& err) {
        if (err.code() != Errc::degenerate_path) throw;
      }
    }
    if (!checked) throw Error(Errc::internal_consistency, "no generic basic cycle found");
  }
  return s;
}

long intersection_number(const TransferSurface& s, const std::vector<double>& a, const std::vector<double>& b) {
  const int d = s.d;
  if (static_cast<int>(a.size()) != d || static_cast<int>(b.size()) != d)
    throw Error(Errc::dimension_mismatch, "path dimension");
  std::vector<double> u(d), lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    u[i] = b[i] - a[i];
    lo[i] = std::min(a[i], b[i]);
    hi[i] = std::max(a[i], b[i]);
  }
  const double ulen = norm(u);
  const auto wn = dnorms(s);
  std::vector<double> du(d);
  for (int k = 0; k < d; ++k) du[k] = dot(u, s.duals[k]);
  long count = 0;
  std::vector<double> ca0(d), rel(d);
  for (const auto& f : s.facets) {
    const int r = f.r;
    for (int i = 0; i < d; ++i) rel[i] = a[i] - f.base_d[i];
    for (int k = 0; k < d; ++k) ca0[k] = dot(rel, s.duals[k]);
    for_each_translate(s, f, lo, hi, 1e-9, [&](const std::vector<long>& z) {
      auto coord = [&](int k, double t) {
        double c = ca0[k] + t * du[k];
        for (int i = 0; i < d; ++i) c -= static_cast<double>(z[i]) * s.duals[k][i];
        return c;
      };
      auto inside = [&](double t, double slack) {
        for (int k = 0; k < d; ++k) {
          if (k == r) continue;
          const double c = coord(k, t), m = slack * wn[k];
          if (c < -m || c > 1 + m) return false;
        }
        return true;
      };
      const double cr0 = coord(r, 0.0), cr1 = coord(r, 1.0);
      const double tolr = kTol * wn[r];
      if (std::fabs(du[r]) <= 1e-13 * ulen * wn[r]) {
        if (std::fabs(cr0) < tolr) throw Error(Errc::degenerate_path, "path runs inside a facet");
        return;
      }
      if (std::fabs(cr0) < tolr && inside(0.0, kTol)) throw Error(Errc::degenerate_path, "path starts on the surface");
      if (std::fabs(cr1) < tolr && inside(1.0, kTol)) throw Error(Errc::degenerate_path, "path ends on the surface");
      const double t = -cr0 / du[r];
      if (!(t > 0 && t < 1)) return;
      bool in = true;
      for (int k = 0; k < d; ++k) {
        if (k == r) continue;
        const double c = coord(k, t), m = kTol * wn[k];
        if (std::fabs(c) < m || std::fabs(c - 1) < m) throw Error(Errc::degenerate_path, "path meets a facet edge");
        if (c < 0 || c >= 1) in = false;
      }
      if (in) count += f.sign * (du[r] > 0 ? 1 : -1);
    });
  }
  return count;
}

bool near_surface(const TransferSurface& s, const std::vector<double>& x, double eps) {
  const int d = s.d;
  const auto wn = dnorms(s);
  std::vector<double> rel(d);
  bool hit = false;
  for (const auto& f : s.facets) {
    for (int i = 0; i < d; ++i) rel[i] = x[i] - f.base_d[i];
    for_each_translate(s, f, x, x, eps + 1e-9, [&](const std::vector<long>& z) {
      if (hit) return;
      for (int k = 0; k < d; ++k) {
        double c = dot(rel, s.duals[k]);
        for (int i = 0; i < d; ++i) c -= static_cast<double>(z[i]) * s.duals[k][i];
        const double m = eps * wn[k];
        if (k == f.r ? std::fabs(c) >= m : (c < -m || c > 1 + m)) return;
      }
      hit = true;
    });
    if (hit) return true;
  }
  return false;
}

double eval_transfer(const TransferSurface& s, const std::vector<double>& x) {
  const int d = s.d;
  if (static_cast<int>(x.size()) != d) throw Error(Errc::dimension_mismatch, "eval_transfer dimension");
  std::vector<double> y(d);
  for (int i = 0; i < d; ++i) y[i] = frac(x[i]);
  if (s.facets.empty()) return 0.0;
  if (near_surface(s, y, 1e-10)) throw Error(Errc::degenerate_path, "point lies on the transfer surface");
  double lin = 0;
  for (int i = 0; i < d; ++i) lin += (y[i] - s.x0[i]) * static_cast<double>(s.omega[i]);
  try {
    return static_cast<double>(intersection_number(s, s.x0, y)) - lin;
  } catch (const Error& e) {
    if (e.code() != Errc::degenerate_path) throw;
  }
  std::mt19937_64 rng(0x51ed27u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double scale = 1e-9;
  for (int attempt = 0; attempt < 8; ++attempt, scale *= 100) {
    std::vector<double> m(d);
    for (int i = 0; i < d; ++i) m[i] = 0.5 * (s.x0[i] + y[i]) + scale * U(rng);
    try {
      return static_cast<double>(intersection_number(s, s.x0, m) + intersection_number(s, m, y)) - lin;
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_path) throw;
    }
  }
  throw Error(Errc::degenerate_path, "no generic path found after 8 jitters");
}

TransferFn surface_transfer(TransferSurface s) {
  auto p = std::make_shared<const TransferSurface>(std::move(s));
  return [p](const std::vector<double>& x) { return eval_transfer(*p, x); };
}

TransferFn hecke_transfer(long q, double start, double beta) {
  return [q, start, beta](const std::vector<double>& x) {
    double g = 0;
    if (q > 0)
      for (long j = 0; j < q; ++j) g -= frac(x[0] - start - static_cast<double>(j) * beta);
    else
      for (long j = q; j < 0; ++j) g += frac(x[0] - start - static_cast<double>(j) * beta);
    return g;
  };
}

TransferFn cylinder_transfer(TransferFn h, double sigma_volume, const std::vector<double>& v) {
  const int d = static_cast<int>(v.size());
  if (d < 2) throw Error(Errc::dimension_mismatch, "cylinder direction needs d >= 2");
  const double vd = v[d - 1];
  if (vd == 0.0) throw Error(Errc::invalid_parametrization, "cylinder direction has v_d = 0");
  std::vector<double> ratio(v.begin(), v.end() - 1);
  for (auto& c : ratio) c /= vd;
  // For v_d < 0 the cylinder is S(Sigma, -v) - (-v), whose transfer with
  // respect to v is minus the formula below.
  const double sgn = vd > 0 ? 1.0 : -1.0;
  return [h = std::move(h), ratio, sigma_volume, sgn, d](const std::vector<double>& p) {
    const double fy = frac(p[d - 1]);
    std::vector<double> x(d - 1);
    for (int i = 0; i + 1 < d; ++i) x[i] = p[i] - ratio[i] * fy;
    return sgn * (h(x) - sigma_volume * fy);
  };
}

TransferFn rotation_transfer(TransferFn g, long q, const std::vector<double>& rho) {
  if (q == 0) throw Error(Errc::invalid_direction, "rotation multiple must be nonzero");
  return [g = std::move(g), q, rho](const std::vector<double>& x) {
    std::vector<double> y(x.size());
    double t = 0;
    const long lo = q > 0 ? 0 : 1, hi = q > 0 ? q - 1 : -q;
    const double dir = q > 0 ? -1.0 : 1.0;
    for (long k = lo; k <= hi; ++k) {
      for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] + dir * static_cast<double>(k) * rho[i];
      t += g(y);
    }
    return q > 0 ? t : -t;
  };
}

TransferFn recipe_transfer(const CylinderRecipe& r, const AlphaContext& ctx) {
  const auto rc = realize_cylinder(r, ctx.alpha_d);
  const double rho1 = rc.rotations[0][0];
  TransferFn T = hecke_transfer(r.base_q, r.start_q.get_d() * rho1 + r.start_p.get_d(), rho1);
  double vol = rc.base_length;
  for (size_t li = 0; li < r.levels.size(); ++li) {
    const auto& lv = r.levels[li];
    const auto& full = rc.geometry.gens[li + 1];  // padded with zeros above this level
    const std::vector<double> v(full.begin(), full.begin() + static_cast<long>(li) + 2);
    if (lv.prism) {
      T = [h = std::move(T)](const std::vector<double>& p) {
        return h(std::vector<double>(p.begin(), p.end() - 1));
      };
      continue;
    }
    if (lv.q == 0) throw Error(Errc::invalid_direction, "cylinder direction is an integer vector");
    T = rotation_transfer(cylinder_transfer(std::move(T), vol, v), lv.q, rc.rotations[li + 1]);
    vol *= std::fabs(v.back());
  }
  return T;
}

TransferFn transfer_for(const SetDescription& s, const AlphaContext& ctx) {
  if (const auto* u = std::get_if<IntervalUnion1D>(&s.shape)) {
    std::vector<TransferFn> fs;
    for (const auto& iv : u->intervals) {
      const ScalarModule len = iv.b - iv.a;
      if (!len.all_integer()) throw Error(Errc::unsupported_shape, "interval length outside Z + Z*alpha");
      fs.push_back(hecke_transfer(as_long(len.c(0)), iv.a.to_double(ctx), ctx.alpha_d[0]));
    }
    if (fs.empty()) return [](const std::vector<double>&) { return 0.0; };
    return sum_of(std::move(fs));
  }
  if (const auto* p = std::get_if<Parallelepiped>(&s.shape)) {
    for (const auto& v : p->gens)
      if (!is_lattice_member(v)) throw Error(Errc::unsupported_shape, "parallelepiped generators are not lattice vectors");
    return surface_transfer(build_surface(*p, ctx));
  }
  if (const auto* z = std::get_if<Zonotope>(&s.shape)) {
    std::vector<TransferFn> fs;
    for (const auto& t : zonotope_tiling(*z, ctx)) fs.push_back(surface_transfer(build_surface(t, ctx)));
    return sum_of(std::move(fs));
  }
  if (const auto* rp = std::get_if<RealParallelepiped>(&s.shape)) {
    if (!rp->recipe) throw Error(Errc::unsupported_shape, "numeric parallelepiped without a cylinder recipe");
    return recipe_transfer(*rp->recipe, ctx);
  }
  if (const auto* du = std::get_if<DisjointUnion>(&s.shape)) {
    std::vector<TransferFn> fs;
    for (const auto& m : du->members) fs.push_back(transfer_for(m, ctx));
    return sum_of(std::move(fs));
  }
  throw Error(Errc::unsupported_shape, "no transfer construction for " + s.kind());
}

TransferFn chain_transfer(TransferFn g_source, const std::vector<ChainPiece>& pieces, const AlphaContext& ctx) {
  struct Orbit {
    std::shared_ptr<const Indicator> ind;
    long n;
  };
  std::vector<Orbit> orbits;
  for (const auto& p : pieces)
    if (p.n != 0) orbits.push_back({std::make_shared<const Indicator>(p.piece, ctx), p.n});
  const std::vector<double> alpha = ctx.alpha_d;
  return [g = std::move(g_source), orbits, alpha](const std::vector<double>& x) {
    double t = g(x);
    std::vector<double> y(x.size());
    for (const auto& o : orbits) {
      // n > 0: sum_{0<=k<n} chi(x - k alpha); n < 0: -sum_{1<=k<=|n|} chi(x + k alpha).
      const long lo = o.n > 0 ? 0 : 1, hi = o.n > 0 ? o.n - 1 : -o.n;
      const double dir = o.n > 0 ? -1.0 : 1.0;
      long c = 0;
      for (long k = lo; k <= hi; ++k) {
        for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] + dir * static_cast<double>(k) * alpha[i];
        c += o.ind->count(y);
      }
      t -= o.n > 0 ? static_cast<double>(c) : -static_cast<double>(c);
    }
    return t;
  };
}

double cohomology_residual(const SetDescription& S, const TransferFn& g, long n_samples, const AlphaContext& ctx,
                           unsigned long long seed) {
  const int d = S.dim();
  const Indicator ind(S, ctx);
  const double vol = volume_numeric(S, ctx);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x(d), xm(d);
  double worst = 0;
  long done = 0;
  for (long tries = 0; done < n_samples; ++tries) {
    if (tries > 20 * n_samples + 100) throw Error(Errc::degenerate_path, "too many degenerate samples");
    for (int i = 0; i < d; ++i) {
      x[i] = U(rng);
      xm[i] = frac(x[i] - ctx.alpha_d[i]);
    }
    if (ind.near_boundary(x.data(), 1e-9)) continue;
    double gx, gm;
    try {
      gx = g(x);
      gm = g(xm);
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_path) throw;
      continue;
    }
    worst = std::max(worst, std::fabs(ind.count(x) - vol - gx + gm));
    ++done;
  }
  return worst;
}

FourierReport fourier_check(const Parallelepiped& P, long lambda_max, long grid, const AlphaContext& ctx,
                            int threads) {
  const int d = static_cast<int>(P.gens.size());
  if (d < 1 || d > 3) throw Error(Errc::dimension_mismatch, "fourier_check supports d <= 3");
  if (grid < 256 || (grid & (grid - 1)) != 0)
    throw Error(Errc::invalid_parametrization, "grid must be a power of two >= 256");
  if (lambda_max < 1) throw Error(Errc::invalid_parametrization, "lambda_max must be >= 1");
  const TransferSurface surf = build_surface(P, ctx);
  const double D = surf.D.to_double(ctx);

  FourierReport rep;
  std::vector<std::vector<long>> lams;
  {
    std::vector<long> l(d, -lambda_max);
    while (true) {
      if (std::any_of(l.begin(), l.end(), [](long v) { return v != 0; })) lams.push_back(l);
      int i = 0;
      for (; i < d; ++i) {
        if (++l[i] <= lambda_max) break;
        l[i] = -lambda_max;
      }
      if (i == d) break;
    }
  }
  std::vector<std::vector<long>> kept;
  for (const auto& l : lams) {
    ScalarModule al(d), bl(d);
    for (int i = 0; i < d; ++i) {
      al += ScalarModule::alpha(d, i, l[i]);
      bl += P.base.component(i) * Rational(l[i]);
    }
    const std::complex<double> denom = 1.0 - unit_phase(al.value(ctx));
    if (std::abs(denom) < 1e-6) {
      rep.small_divisors.push_back(l);
      continue;
    }
    std::complex<double> c = D * unit_phase(bl.value(ctx)) / denom;
    for (const auto& v : P.gens) {
      ScalarModule xi(d);
      for (int i = 0; i < d; ++i) xi += v.component(i) * Rational(l[i]);
      c *= hat_unit(xi, ctx);
    }
    rep.entries.push_back({l, 0.0, c});
    kept.push_back(l);
  }

  // Per-axis phase tables e(-lambda_i x) at midpoints.
  const long G = grid;
  const long L = 2 * lambda_max + 1;
  std::vector<std::complex<double>> phase(L * G);
  for (long m = -lambda_max; m <= lambda_max; ++m)
    for (long i = 0; i < G; ++i)
      phase[(m + lambda_max) * G + i] =
          std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(m) * (static_cast<double>(i) + 0.5) / G);

  const size_t nl = kept.size();
  const long rows = G;
  std::vector<std::vector<std::complex<double>>> partial(rows, std::vector<std::complex<double>>(nl));
  auto do_row = [&](long r0) {
    std::vector<long> idx(d, 0);
    idx[0] = r0;
    std::vector<double> x(d);
    const long inner = d == 1 ? 1 : (d == 2 ? G : G * G);
    for (long t = 0; t < inner; ++t) {
      if (d >= 2) idx[1] = t % G;
      if (d == 3) idx[2] = t / G;
      for (int i = 0; i < d; ++i) x[i] = (static_cast<double>(idx[i]) + 0.5) / G;
      double g;
      try {
        g = eval_transfer(surf, x);
      } catch (const Error& e) {
        if (e.code() != Errc::degenerate_path) throw;
        // A grid point on the surface: the jump is O(1/G) in the quadrature.
        for (int i = 0; i < d; ++i) x[i] += 1e-7 * (i + 1);
        g = eval_transfer(surf, x);
      }
      for (size_t k = 0; k < nl; ++k) {
        std::complex<double> ph = 1.0;
        for (int i = 0; i < d; ++i) ph *= phase[(kept[k][i] + lambda_max) * G + idx[i]];
        partial[r0][k] += g * ph;
      }
    }
  };
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::clamp(nt, 1, 64);
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex fm;
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (long r; (r = next++) < rows;) {
        try {
          do_row(r);
        } catch (...) {
          std::lock_guard<std::mutex> lk(fm);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  const double cells = std::pow(static_cast<double>(G), d);
  for (size_t k = 0; k < nl; ++k) {
    std::complex<double> s = 0;
    for (long r = 0; r < rows; ++r) s += partial[r][k];
    rep.entries[k].g_hat = s / cells;
    rep.max_error = std::max(rep.max_error, std::abs(rep.entries[k].g_hat - rep.entries[k].c));
  }
  return rep;
}

}  // namespace brs
