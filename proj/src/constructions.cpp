#include "brs/constructions.hpp"

#include <cmath>

#include "brs/error.hpp"
#include "brs/linalg.hpp"

namespace brs {

namespace {

void require_lattice(const std::vector<ModuleVector>& vs) {
  for (const auto& v : vs)
    if (!is_lattice_member(v))
      throw Error(Errc::non_lattice_generator, "generator " + format_vector(v) + " is not in Z*alpha + Z^d");
}

void require_dims(const std::vector<ModuleVector>& vs, int d) {
  if (static_cast<int>(vs.size()) != d) throw Error(Errc::dimension_mismatch, "need exactly d generators");
  for (const auto& v : vs)
    if (v.dim() != d) throw Error(Errc::dimension_mismatch, "generator dimension");
}

void require_volume(const std::vector<ModuleVector>& vs, const AlphaContext& ctx) {
  ScalarModule D = det_module(vs);
  if (D.is_zero() || std::fabs(D.to_double(ctx)) < 1e-12)
    throw Error(Errc::degenerate, "generators are linearly dependent");
}

long to_long(const Rational& q) {
  if (!is_integer(q) || !q.get_num().fits_slong_p())
    throw Error(Errc::non_lattice_generator, "expected a machine integer, got " + to_string(q));
  return q.get_num().get_si();
}

Certificate certificate_for_cylinder(const CylinderRecipe& r) {
  Certificate c{cert::kLiardet, {}};
  c.params.push_back({"base", std::to_string(r.base_q) + "*rho + " + std::to_string(r.base_p)});
  for (size_t i = 0; i < r.levels.size(); ++i) {
    const auto& lv = r.levels[i];
    std::string v;
    if (lv.prism) {
      v = "prism";
    } else {
      v = std::to_string(lv.q) + "*rho + (";
      for (size_t k = 0; k < lv.p.size(); ++k) v += (k ? "," : "") + std::to_string(lv.p[k]);
      v += ")";
    }
    c.params.push_back({"level" + std::to_string(i + 2), v});
  }
  return c;
}

}  // namespace

SetDescription hecke_interval(const ScalarModule& beta, const AlphaContext& ctx) {
  if (beta.dim() != 1 || ctx.d != 1) throw Error(Errc::dimension_mismatch, "hecke_interval needs d = 1");
  if (!admissible_measure(beta))
    throw Error(Errc::kesten_obstruction, "length " + format_scalar(beta) + " is not in Z + Z*alpha");
  if (sign(beta, ctx) <= 0) throw Error(Errc::degenerate, "interval length must be positive");
  return SetDescription(IntervalUnion1D{{{ScalarModule(1), beta}}},
                        Certificate{cert::kHecke, {{"beta", format_scalar(beta)}}});
}

SetDescription module_parallelepiped(const ModuleVector& base, const std::vector<ModuleVector>& vs,
                                     const AlphaContext& ctx) {
  const int d = base.dim();
  require_dims(vs, d);
  require_lattice(vs);
  require_volume(vs, ctx);
  Certificate c{cert::kLatticeParallelepiped, {}};
  for (size_t k = 0; k < vs.size(); ++k) c.params.push_back({"v" + std::to_string(k + 1), format_vector(vs[k])});
  return SetDescription(Parallelepiped{base, vs}, c);
}

namespace {

template <class T>
std::vector<T> shear_row(const std::vector<std::vector<T>>& shear, size_t k, size_t d) {
  std::vector<T> row(k, T(0));
  if (k >= shear.size()) {
    if (!shear.empty()) throw Error(Errc::dimension_mismatch, "shear needs one row per generator");
    return row;
  }
  const auto& r = shear[k];
  if (r.size() == d) {
    for (size_t i = k; i < d; ++i)
      if (r[i] != T(0)) throw Error(Errc::invalid_parametrization, "shear must be strictly lower triangular");
  } else if (r.size() != k) {
    throw Error(Errc::dimension_mismatch, "shear row " + std::to_string(k) + " has the wrong length");
  }
  for (size_t i = 0; i < k; ++i) row[i] = r[i];
  return row;
}

}  // namespace

SetDescription sheared_parallelepiped(const std::vector<ModuleVector>& vs,
                                      const std::vector<std::vector<Rational>>& shear,
                                      const AlphaContext& ctx) {
  const int d = vs.empty() ? 0 : vs[0].dim();
  require_dims(vs, d);
  require_lattice(vs);
  std::vector<ModuleVector> w = vs;
  for (size_t k = 0; k < vs.size(); ++k) {
    auto row = shear_row(shear, k, vs.size());
    for (size_t i = 0; i < k; ++i)
      if (row[i] != 0) w[k] += vs[i] * row[i];
  }
  require_volume(w, ctx);
  Certificate c{cert::kShearedParallelepiped, {}};
  for (size_t k = 0; k < vs.size(); ++k) c.params.push_back({"v" + std::to_string(k + 1), format_vector(vs[k])});
  return SetDescription(Parallelepiped{ModuleVector(d), w}, c);
}

SetDescription sheared_parallelepiped_real(const std::vector<ModuleVector>& vs,
                                           const std::vector<std::vector<double>>& shear,
                                           const AlphaContext& ctx) {
  const int d = vs.empty() ? 0 : vs[0].dim();
  require_dims(vs, d);
  require_lattice(vs);
  require_volume(vs, ctx);
  std::vector<std::vector<double>> w;
  for (const auto& v : vs) w.push_back(v.to_double(ctx));
  for (size_t k = 0; k < vs.size(); ++k) {
    auto row = shear_row(shear, k, vs.size());
    for (size_t i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) w[k][j] += row[i] * w[i][j];
  }
  RealParallelepiped rp{std::vector<double>(d, 0.0), w, std::nullopt};
  Certificate c{cert::kShearedParallelepiped, {{"numeric_only", "true"}}};
  for (size_t k = 0; k < vs.size(); ++k) c.params.push_back({"v" + std::to_string(k + 1), format_vector(vs[k])});
  SetDescription s(rp, c);
  if (volume_numeric(s, ctx) < 1e-12) throw Error(Errc::degenerate, "sheared generators are dependent");
  return s;
}

SetDescription measure_parallelepiped(const ScalarModule& gamma, const AlphaContext& ctx) {
  const int d = gamma.dim();
  if (d != ctx.d) throw Error(Errc::dimension_mismatch, "measure_parallelepiped: context dimension");
  if (!admissible_measure(gamma))
    throw Error(Errc::kesten_obstruction, "measure " + format_scalar(gamma) + " is not in Z + Z*alpha_1 + ...");
  if (sign(gamma, ctx) <= 0) throw Error(Errc::degenerate, "measure must be positive");
  Certificate cert_{cert::kPregivenMeasure, {{"gamma", format_scalar(gamma)}}};
  if (d == 1) return SetDescription(Parallelepiped{ModuleVector(1), {ModuleVector(gamma.c(0), {gamma.c0()})}}, cert_);

  // gamma = q <alpha, m> + r with m primitive.
  Integer g = 0;
  for (const auto& c : gamma.c()) g = gcd(g, c.get_num());
  const Integer r = gamma.c0().get_num();
  std::vector<ModuleVector> gens;
  if (g == 0) {
    for (int i = 0; i < d; ++i) gens.push_back(ModuleVector::unit(d, i));
    gens.back() *= Rational(r);
  } else {
    std::vector<Integer> m(d);
    for (int i = 0; i < d; ++i) m[i] = gamma.c(i).get_num() / g;
    Matrix<Integer> M = complete_to_unimodular(m);
    // p_j: columns of M^{-T}, i.e. rows of M^{-1}.
    Matrix<Rational> Mq(d, std::vector<Rational>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Mq[i][j] = M[i][j];
    Matrix<Rational> inv = inverse_q(Mq);
    for (int j = 0; j < d; ++j) {
      std::vector<Rational> p(d);
      for (int i = 0; i < d; ++i) p[i] = inv[j][i];
      gens.push_back(ModuleVector(0, p));
    }
    gens.back() = ModuleVector::alpha(d, Rational(g)) + gens.back() * Rational(r);
  }
  // det(p_1, ..., p_{d-1}, g*alpha + r*p_d) = g<alpha, m> + r.
  if (det_module(gens) != gamma)
    throw Error(Errc::internal_consistency, "measure_parallelepiped: volume mismatch");
  for (int k = 0; k < d; ++k) cert_.params.push_back({"v" + std::to_string(k + 1), format_vector(gens[k])});
  return SetDescription(Parallelepiped{ModuleVector(d), gens}, cert_);
}

CylinderRecipe interval_recipe(long q, long p, const Rational& start_q, const Rational& start_p) {
  CylinderRecipe r;
  r.base_q = q;
  r.base_p = p;
  r.start_q = start_q;
  r.start_p = start_p;
  return r;
}

CylinderRecipe extend_recipe(const CylinderRecipe& sigma, const ModuleVector& v) {
  const int d = sigma.dim() + 1;
  if (v.dim() != d) throw Error(Errc::dimension_mismatch, "cylinder direction dimension");
  if (!is_lattice_member(v))
    throw Error(Errc::non_lattice_generator, "cylinder direction " + format_vector(v) + " is not a lattice vector");
  CylinderRecipe r = sigma;
  CylinderLevel lv;
  if (v == ModuleVector::unit(d, d - 1)) {
    lv.prism = true;
  } else {
    if (v.r() == 0) throw Error(Errc::invalid_direction, "cylinder direction must not be an integer vector");
    if (v.component(d - 1).is_zero()) throw Error(Errc::invalid_direction, "cylinder direction has v_d = 0");
    lv.q = to_long(v.r());
    for (int i = 0; i < d; ++i) lv.p.push_back(to_long(v.m(i)));
  }
  r.levels.push_back(lv);
  return r;
}

SetDescription cylinder_from_recipe(const CylinderRecipe& r, const AlphaContext& ctx) {
  if (r.dim() != ctx.d) throw Error(Errc::dimension_mismatch, "recipe dimension");
  auto rc = realize_cylinder(r, ctx.alpha_d);
  return SetDescription(rc.geometry, certificate_for_cylinder(r));
}

SetDescription liardet_cylinder(const SetDescription& sigma, const ModuleVector& v, const AlphaContext& ctx) {
  const int d = v.dim();
  if (sigma.dim() + 1 != d || ctx.d != d) throw Error(Errc::dimension_mismatch, "liardet_cylinder dimensions");
  std::optional<CylinderRecipe> base;
  if (auto* rp = std::get_if<RealParallelepiped>(&sigma.shape)) {
    if (rp->recipe) base = rp->recipe;
  } else if (auto* u = std::get_if<IntervalUnion1D>(&sigma.shape)) {
    if (u->intervals.size() != 1)
      throw Error(Errc::unsupported_shape, "cylinder base must be a single interval");
    const auto& iv = u->intervals[0];
    ScalarModule len = iv.b - iv.a;
    if (!admissible_measure(len))
      throw Error(Errc::kesten_obstruction, "base length " + format_scalar(len) + " is not in Z + Z*rho");
    base = interval_recipe(to_long(len.c(0)), to_long(len.c0()), iv.a.c(0), iv.a.c0());
  }
  if (base) return cylinder_from_recipe(extend_recipe(*base, v), ctx);

  // Prism over an exact parallelepiped, realized for the prefix rotation.
  if (v != ModuleVector::unit(d, d - 1))
    throw Error(Errc::unsupported_shape, "cylinder base must be an interval or a cylinder");
  if (!is_lattice_member(v)) throw Error(Errc::non_lattice_generator, "cylinder direction");
  auto* p = std::get_if<Parallelepiped>(&sigma.shape);
  if (!p) throw Error(Errc::unsupported_shape, "prism base must be a parallelepiped");
  std::vector<Real> prefix(ctx.alpha.begin(), ctx.alpha.end() - 1);
  AlphaContext sub = AlphaContext::from_reals(prefix, ctx.irrationality_verified, std::nullopt);
  RealParallelepiped out;
  out.base = p->base.to_double(sub);
  out.base.push_back(0.0);
  for (const auto& g : p->gens) {
    auto gd = g.to_double(sub);
    gd.push_back(0.0);
    out.gens.push_back(gd);
  }
  std::vector<double> top(d, 0.0);
  top[d - 1] = 1.0;
  out.gens.push_back(top);
  Certificate c{cert::kLiardet, {{"prism", "true"}}};
  if (sigma.certificate) c.params.push_back({"sigma", sigma.certificate->theorem});
  return SetDescription(out, c);
}

SetDescription szusz_parallelogram(const ModuleVector& v, long sigma_q, long sigma_p, const AlphaContext& ctx) {
  if (v.dim() != 2) throw Error(Errc::dimension_mismatch, "szusz_parallelogram needs d = 2");
  if (v.r() == 0) throw Error(Errc::invalid_direction, "v must not be an integer vector");
  if (sigma_q == 0 && sigma_p == 0) throw Error(Errc::degenerate, "sigma = 0");
  // sigma < 0 is handled by basing the interval at sigma: [sigma, 0).
  CylinderRecipe base = interval_recipe(sigma_q, sigma_p);
  CylinderRecipe neg = interval_recipe(-sigma_q, -sigma_p, sigma_q, sigma_p);
  CylinderRecipe r = extend_recipe(base, v);
  std::optional<SetDescription> out;
  try {
    out = cylinder_from_recipe(r, ctx);
  } catch (const Error& e) {
    if (e.code() != Errc::invalid_parametrization) throw;
    out = cylinder_from_recipe(extend_recipe(neg, v), ctx);
  }
  out->certificate->theorem = cert::kSzusz;
  out->certificate->params.insert(out->certificate->params.begin(),
                                  {{"v", format_vector(v)},
                                   {"sigma", std::to_string(sigma_q) + "*v1/v2 + " + std::to_string(sigma_p)}});
  return *out;
}

SetDescription lattice_zonotope(const ModuleVector& base, const std::vector<ModuleVector>& gens,
                                const AlphaContext& ctx) {
  const int d = base.dim();
  for (const auto& g : gens)
    if (g.dim() != d) throw Error(Errc::dimension_mismatch, "generator dimension");
  require_lattice(gens);
  Zonotope z{base, gens};
  if (volume_symbolic(z, ctx).is_zero()) throw Error(Errc::degenerate, "zonotope generators do not span");
  Certificate c{cert::kLatticeZonotope, {{"generators", std::to_string(gens.size())}}};
  return SetDescription(z, c);
}

std::vector<Parallelepiped> zonotope_tiling(const Zonotope& z, const AlphaContext& ctx) {
  require_lattice(z.gens);
  auto tiles = shephard_tiling(z, ctx);
  ScalarModule sum(z.base.dim());
  for (const auto& t : tiles) sum += abs(det_module(t.gens), ctx);
  if (sum != volume_symbolic(SetDescription(z), ctx))
    throw Error(Errc::internal_consistency, "zonotope tiling volume mismatch");
  return tiles;
}

}  // namespace brs
