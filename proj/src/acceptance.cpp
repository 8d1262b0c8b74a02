#include "brs/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "brs/constructions.hpp"
#include "brs/equidecomp.hpp"
#include "brs/error.hpp"
#include "brs/invariants.hpp"
#include "brs/linmaps.hpp"
#include "brs/transfer.hpp"

namespace brs {

namespace {

using Rng = std::mt19937_64;

long rand_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
double rand_unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Rational rand_rational(Rng& rng, long num, long max_den) {
  return canonical(Rational(rand_int(rng, -num, num), rand_int(rng, 1, max_den)));
}

ModuleVector rand_lattice(Rng& rng, int d, long range) {
  std::vector<Rational> m(d);
  for (auto& x : m) x = rand_int(rng, -range, range);
  return ModuleVector(rand_int(rng, -range, range), m);
}

ModuleVector rand_module(Rng& rng, int d, long num, long den) {
  std::vector<Rational> m(d);
  for (auto& x : m) x = rand_rational(rng, num, den);
  return ModuleVector(rand_rational(rng, num, den), m);
}

std::vector<double> rand_point(Rng& rng, int d) {
  std::vector<double> x(d);
  for (auto& v : x) v = rand_unit(rng);
  return x;
}

// Lattice generators with |det| in [0.05, 6], so that surfaces stay small.
std::vector<ModuleVector> rand_lattice_gens(Rng& rng, const AlphaContext& ctx, long range) {
  while (true) {
    std::vector<ModuleVector> vs;
    for (int k = 0; k < ctx.d; ++k) vs.push_back(rand_lattice(rng, ctx.d, range));
    const double D = std::fabs(det_module(vs).to_double(ctx));
    if (D >= 0.05 && D <= 6) return vs;
  }
}

struct Scaler {
  double s;
  long count(long full, long floor = 1) const {
    return std::max(floor, static_cast<long>(std::lround(static_cast<double>(full) * s)));
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------- criteria

bool hecke_boundedness(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  auto c1 = AlphaContext::preset("sqrt2");
  ReportOptions opt;
  opt.starts = static_cast<int>(sc.count(100, 10));
  opt.N = sc.count(100000, 10000);
  opt.checkpoints = decade_checkpoints(100, opt.N);
  opt.seed = o.seed;
  opt.threads = o.threads;
  opt.config = o.config;
  const auto t0 = std::chrono::steady_clock::now();
  auto r = discrepancy_report(hecke_interval(ScalarModule::alpha(1, 0), c1), c1, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0;
  for (const auto& row : r.max_abs) worst = std::max(worst, row.back());
  detail = std::to_string(opt.starts) + " starts, N=" + std::to_string(opt.N) + ": max|D_n| = " + fmt(worst) +
           " (bound 1), " + fmt(secs) + " s";
  return worst <= 1 + 1e-6 && secs < 10;
}

bool kesten_control(const AcceptanceOptions& o, const Scaler&, std::string& detail) {
  auto c1 = AlphaContext::preset("sqrt2");
  IntervalUnion1D half{{{ScalarModule(1), ScalarModule::constant(1, Rational(1, 2))}}};
  ReportOptions opt;
  opt.starts = 50;
  // Growth is logarithmic, so the orbit length is not scaled down; this is cheap.
  opt.N = 1000000;
  opt.checkpoints = decade_checkpoints(10, opt.N);  // first decade: n <= 10
  opt.seed = o.seed;
  opt.threads = o.threads;
  opt.config = o.config;
  auto r = discrepancy_report(SetDescription(half), c1, opt);
  int grown = 0;
  for (const auto& row : r.max_abs) grown += row.back() >= row.front() + o.config.growth_margin;
  detail = "N=" + std::to_string(opt.N) + ": diagnostic " + to_string(r.verdict) + ", " + std::to_string(grown) +
           "/50 starts grew by >= " + fmt(o.config.growth_margin);
  return r.verdict == Diagnostic::growth;
}

bool cohomology(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 3);
  const long samples = sc.count(10000, 1000);
  double worst = 0;
  int sets = 0;
  for (int d : {2, 3}) {
    auto ctx = AlphaContext::standard(d);
    const long n = sc.count(d == 2 ? 25 : 5, 2);
    for (long i = 0; i < n; ++i) {
      auto S = module_parallelepiped(rand_module(rng, d, 3, 4), rand_lattice_gens(rng, ctx, 2), ctx);
      worst = std::max(worst, cohomology_residual(S, transfer_for(S, ctx), samples, ctx, o.seed + i));
      ++sets;
    }
  }
  detail = std::to_string(sets) + " parallelepipeds x " + std::to_string(samples) + " samples: max residual " +
           fmt(worst);
  return worst < 1e-8;
}

bool fourier(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 4);
  auto c2 = AlphaContext::standard(2);
  const long grid = sc.s >= 1 ? 1024 : 512;
  std::vector<Parallelepiped> ps{Parallelepiped{ModuleVector(2), {ModuleVector::alpha(2), ModuleVector::integer({0, 1})}}};
  while (ps.size() < 6) {
    std::vector<ModuleVector> vs{rand_lattice(rng, 2, 1), rand_lattice(rng, 2, 1)};
    if (cross(vs[0], vs[1]).is_zero()) continue;
    ps.push_back(Parallelepiped{rand_module(rng, 2, 3, 4), vs});
  }
  double worst = 0;
  for (const auto& p : ps) worst = std::max(worst, fourier_check(p, 3, grid, c2, o.threads).max_error);
  detail = "strip + 5 parallelograms, grid " + std::to_string(grid) + ": max |g^ - c| = " + fmt(worst);
  return worst <= 1e-3;
}

bool hadwiger_vanishing(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 5);
  auto c1 = AlphaContext::standard(1), c2 = AlphaContext::standard(2);
  const long n = sc.count(50, 10);
  long zero = 0, made = 0;
  while (made < n) {
    SetDescription s;
    const AlphaContext* ctx = &c2;
    try {
      switch (made % 5) {
        case 0: {
          ScalarModule beta(rand_int(rng, -3, 3), {Rational(rand_int(rng, -3, 3))});
          if (beta.to_double(c1) <= 0) continue;
          s = hecke_interval(beta, c1);
          ctx = &c1;
          break;
        }
        case 1: {
          std::vector<ModuleVector> vs{rand_lattice(rng, 2, 3), rand_lattice(rng, 2, 3)};
          if (cross(vs[0], vs[1]).is_zero()) continue;
          s = module_parallelepiped(rand_module(rng, 2, 3, 5), vs, c2);
          break;
        }
        case 2: {
          std::vector<ModuleVector> vs{rand_lattice(rng, 2, 2), rand_lattice(rng, 2, 2)};
          if (cross(vs[0], vs[1]).is_zero()) continue;
          s = sheared_parallelepiped(vs, {{}, {rand_rational(rng, 4, 3)}}, c2);
          break;
        }
        case 3: {
          const int d = static_cast<int>(rand_int(rng, 1, 2));
          ctx = d == 1 ? &c1 : &c2;
          std::vector<Rational> c(d);
          for (auto& x : c) x = rand_int(rng, -4, 4);
          ScalarModule gamma(rand_int(rng, -3, 3), c);
          if (gamma.to_double(*ctx) <= 0) continue;
          s = measure_parallelepiped(gamma, *ctx);
          break;
        }
        default: {
          std::vector<ModuleVector> gens{rand_lattice(rng, 2, 2), rand_lattice(rng, 2, 2), rand_lattice(rng, 2, 2)};
          s = lattice_zonotope(rand_module(rng, 2, 3, 4), gens, c2);
          break;
        }
      }
    } catch (const Error&) {
      continue;  // degenerate random parameters
    }
    ++made;
    zero += hadwiger(s, *ctx).all_zero;
  }
  detail = std::to_string(zero) + "/" + std::to_string(made) + " constructed sets have all invariants zero";
  return zero == made;
}

bool oren_brute(const IntervalUnion1D& s) {
  const int n = static_cast<int>(s.intervals.size());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = is_lattice_member(s.intervals[p[j]].b - s.intervals[j].a);
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

bool oren_equivalence(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 6);
  auto c1 = AlphaContext::standard(1);
  const long n = sc.count(200, 20);
  long agree = 0, positives = 0;
  for (long inst = 0; inst < n; ++inst) {
    const int N = static_cast<int>(rand_int(rng, 1, 6));
    // Few distinct residues mod Z*alpha + Z, so that both outcomes occur.
    std::vector<ScalarModule> pts;
    while (static_cast<int>(pts.size()) < 2 * N) {
      ScalarModule p(canonical(Rational(rand_int(rng, -8, 8), 2 * rand_int(rng, 1, 2))),
                     {Rational(rand_int(rng, -2, 2))});
      if (std::none_of(pts.begin(), pts.end(), [&](const ScalarModule& q) { return q == p; })) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end(), [&](const ScalarModule& a, const ScalarModule& b) { return compare(a, b, c1) < 0; });
    IntervalUnion1D u;
    for (int j = 0; j < N; ++j) u.intervals.push_back({pts[2 * j], pts[2 * j + 1]});
    const bool fast = oren_test(u).brs;
    agree += fast == oren_brute(u);
    positives += fast;
  }
  detail = std::to_string(agree) + "/" + std::to_string(n) + " agree (" + std::to_string(positives) + " BRS)";
  return agree == n;
}

bool equidecomposition(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 7);
  auto c1 = AlphaContext::standard(1), c2 = AlphaContext::standard(2);
  auto s1 = [](Rational c0, Rational c1) { return ScalarModule(std::move(c0), {std::move(c1)}); };
  auto volume = [](const std::vector<DecompositionPiece>& ps, const AlphaContext& ctx) {
    ScalarModule v(ctx.d);
    for (const auto& p : ps) v += volume_symbolic(p.piece, ctx);
    return v;
  };

  const long n1 = sc.count(100, 10);
  long ok1 = 0;
  for (long inst = 0; inst < n1; ++inst) {
    // A = [x0, x0 + L), B = y0 + [0, c) u [c + delta, L + delta), delta in the lattice.
    ScalarModule L = s1(rand_int(rng, 0, 2), rand_int(rng, 0, 2));
    ScalarModule x0 = s1(rand_rational(rng, 3, 4), rand_int(rng, -1, 1));
    ScalarModule y0 = s1(rand_rational(rng, 3, 4), rand_int(rng, -1, 1));
    ScalarModule c = s1(rand_rational(rng, 4, 5), rand_int(rng, -1, 1));
    ScalarModule delta = s1(rand_int(rng, 0, 2), rand_int(rng, 0, 1));
    if (sign(L, c1) <= 0 || sign(c, c1) <= 0 || sign(L - c, c1) <= 0 || sign(delta, c1) <= 0) {
      --inst;
      continue;
    }
    IntervalUnion1D a{{{x0, x0 + L}}};
    IntervalUnion1D b{{{y0, y0 + c}, {y0 + c + delta, y0 + L + delta}}};
    auto pieces = decompose_1d(a, b, c1);
    ok1 += verify_decomposition(a, b, pieces, c1).ok && volume(pieces, c1) == total_length(a);
  }

  const long n2 = sc.count(20, 4);
  long ok2 = 0, made2 = 0;
  std::string first_failure;
  for (int attempt = 0; attempt < 20000 && made2 < n2; ++attempt) {
    const int n = static_cast<int>(rand_int(rng, 2, 4));
    std::vector<ModuleVector> gens;
    for (int i = 0; i < n; ++i)
      gens.push_back(ModuleVector(rand_int(rng, -1, 1), {canonical(Rational(rand_int(rng, -2, 2), 2)),
                                                         canonical(Rational(rand_int(rng, -2, 2), 2))}));
    Polygon2D poly;
    try {
      poly = zonogon_polygon(Zonotope{rand_module(rng, 2, 2, 3), gens}, c2);
    } catch (const Error&) {
      continue;
    }
    if (poly.vertices.size() < 4 || !convex_polygon_test(poly, c2).brs) continue;
    ++made2;
    try {
      auto dec = decompose_convex_polygon(poly, c2);
      auto v = verify_decomposition(poly, dec.target, dec.pieces, c2);
      if (v.ok && volume(dec.pieces, c2) == volume_symbolic(poly, c2)) ++ok2;
      else if (first_failure.empty()) first_failure = v.failed_check + ": " + v.detail;
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = std::string(e.code_name()) + ": " + e.what();
    }
  }
  detail = "1D " + std::to_string(ok1) + "/" + std::to_string(n1) + ", zonogons " + std::to_string(ok2) + "/" +
           std::to_string(n2) + " verified";
  if (!first_failure.empty()) detail += "; first failure " + first_failure;
  return ok1 == n1 && ok2 == n2 && made2 == n2;
}

bool prescribed_measure(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 8);
  const long n = sc.count(50, 10);
  long ok = 0, made = 0;
  while (made < n) {
    const int d = static_cast<int>(1 + made % 3);
    auto ctx = AlphaContext::standard(d);
    std::vector<Rational> c(d);
    for (auto& x : c) x = rand_int(rng, -4, 4);
    ScalarModule gamma(rand_int(rng, -3, 3), c);
    const double g = gamma.to_double(ctx);
    if (g <= 0 || g > 1) continue;
    ++made;
    auto p = measure_parallelepiped(gamma, ctx);
    ok += volume_symbolic(p, ctx) == gamma && is_simple(p, ctx);
  }
  detail = std::to_string(ok) + "/" + std::to_string(n) + " exact and simple (d = 1, 2, 3)";
  return ok == n;
}

Matrix<Integer> random_unimodular(Rng& rng, int n, int steps) {
  Matrix<Integer> u(n, std::vector<Integer>(n, 0));
  for (int i = 0; i < n; ++i) u[i][i] = 1;
  for (int s = 0; s < steps; ++s) {
    const int i = static_cast<int>(rand_int(rng, 0, n - 1));
    int j = static_cast<int>(rand_int(rng, 0, n - 2));
    if (j >= i) ++j;
    const long c = rand_int(rng, 0, 1) ? 1 : -1;
    for (int k = 0; k < n; ++k) u[i][k] += c * u[j][k];
  }
  return u;
}

bool linear_transport(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 9);
  auto c2 = AlphaContext::standard(2);
  ReportOptions opt;
  opt.starts = static_cast<int>(sc.count(10, 4));
  opt.N = 100000;
  opt.checkpoints = {1000, 10000, 100000};
  opt.threads = o.threads;
  opt.config = o.config;
  const long n = sc.count(20, 4);
  long bounded = 0, made = 0;
  double det_err = 0;
  while (made < n) {
    auto m = from_u_matrix(random_unimodular(rng, 3, 4), c2);
    // Huge beta components make the orbit crawl; the criterion is about generic maps.
    if (std::any_of(m.beta.begin(), m.beta.end(), [](const Real& b) { return std::fabs(b.get_d()) >= 50; })) continue;
    auto t = t_matrix(m);
    const double direct = to_double(t[0][0] * t[1][1] - t[0][1] * t[1][0]);
    const double formula = to_double(det_t_formula(m, c2));
    det_err = std::max(det_err, std::fabs(direct - formula) / (1 + std::fabs(formula)));
    auto par = module_parallelepiped(rand_module(rng, 2, 3, 4),
                                     {ModuleVector::alpha(2), ModuleVector::integer({rand_int(rng, 0, 1), 1})}, c2);
    auto img = push_set(m, par, c2);
    opt.seed = o.seed + static_cast<unsigned long long>(made);
    bounded += img.certificate && discrepancy_report(img, m.beta_context, opt).verdict == Diagnostic::no_growth;
    ++made;
  }
  detail = std::to_string(bounded) + "/" + std::to_string(n) + " images show no growth, det identity error " +
           fmt(det_err);
  return bounded == n && det_err < 1e-9;
}

bool surface_integrity(const AcceptanceOptions& o, const Scaler& sc, std::string& detail) {
  Rng rng(o.seed + 10);
  const long n = sc.count(30, 6);
  double residual = 0;
  long loops = 0, good = 0, short_sets = 0;
  for (long i = 0; i < n; ++i) {
    const int d = i % 3 == 2 ? 3 : 2;
    auto ctx = AlphaContext::standard(d);
    Parallelepiped P{rand_module(rng, d, 3, 4), rand_lattice_gens(rng, ctx, 2)};
    auto s = build_surface(P, ctx);
    residual = std::max(residual, s.omega_residual);
    int done = 0;
    for (int it = 0; it < 100 && done < 20; ++it) {
      auto a = rand_point(rng, d);
      auto b = a;
      long want = 0;
      for (int k = 0; k < d; ++k) {
        const long z = rand_int(rng, -3, 3);
        b[k] += static_cast<double>(z);
        want += z * s.omega[k];
      }
      try {
        good += intersection_number(s, a, b) == want;
        ++loops;
        ++done;
      } catch (const Error& e) {
        if (e.code() != Errc::degenerate_path) throw;
      }
    }
    short_sets += done < 20;
  }
  detail = std::to_string(n) + " surfaces: omega residual " + fmt(residual) + ", loop identity " +
           std::to_string(good) + "/" + std::to_string(loops);
  return residual < 1e-9 && good == loops && short_sets == 0;
}

struct Criterion {
  int id;
  const char* name;
  bool (*run)(const AcceptanceOptions&, const Scaler&, std::string&);
};

constexpr Criterion kCriteria[] = {
    {1, "Hecke interval boundedness", hecke_boundedness},
    {2, "Kesten negative control", kesten_control},
    {3, "cohomological residual", cohomology},
    {4, "Fourier check", fourier},
    {5, "Hadwiger vanishing", hadwiger_vanishing},
    {6, "Oren equivalence", oren_equivalence},
    {7, "equidecomposition soundness", equidecomposition},
    {8, "prescribed-measure construction", prescribed_measure},
    {9, "linear-map transport", linear_transport},
    {10, "surface integrity", surface_integrity},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* out) {
  const Scaler sc{std::clamp(opt.scale, 0.01, 1.0)};
  std::vector<CriterionResult> results;
  for (const auto& c : kCriteria) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end()) continue;
    CriterionResult r{c.id, c.name, false, "", 0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.pass = c.run(opt, sc, r.detail);
    } catch (const Error& e) {
      r.detail = std::string("error ") + e.code_name() + ": " + e.what();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out) {
      *out << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << " ("
           << fmt(r.seconds) << " s)" << std::endl;
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace brs
