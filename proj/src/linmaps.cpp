#include "brs/linmaps.hpp"

#include <algorithm>

#include "brs/constructions.hpp"
#include "brs/error.hpp"

namespace brs {

Matrix<Integer> ModuleMap::u_matrix() const {
  const int d = dim();
  Matrix<Integer> u(d + 1, std::vector<Integer>(d + 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) u[i][j] = A[i][j];
    u[i][d] = p[i];
    u[d][i] = q[i];
  }
  u[d][d] = r;
  return u;
}

ModuleMap from_integer_data(const Matrix<Integer>& A, const std::vector<Integer>& p, const std::vector<Integer>& q,
                            const Integer& r, const AlphaContext& ctx) {
  const int d = static_cast<int>(p.size());
  bool shape_ok = d == ctx.d && static_cast<int>(q.size()) == d && static_cast<int>(A.size()) == d;
  for (const auto& row : A) shape_ok = shape_ok && static_cast<int>(row.size()) == d;
  if (!shape_ok) throw Error(Errc::dimension_mismatch, "map data must be d x d, d, d, 1 with d = ctx.d");

  ModuleMap m;
  m.A = A;
  m.p = p;
  m.q = q;
  m.r = r;
  m.det_u = det_z(m.u_matrix());
  if (m.det_u == 0) throw Error(Errc::invalid_parametrization, "det U = 0");

  Real denom = to_real(r);
  for (int i = 0; i < d; ++i) denom -= to_real(q[i]) * ctx.alpha[i];
  if (abs(denom) < make_real(1e-60)) throw Error(Errc::invalid_parametrization, "r - <q, alpha> vanishes numerically");
  for (int i = 0; i < d; ++i) {
    Real num = -to_real(p[i]);
    for (int j = 0; j < d; ++j) num += to_real(A[i][j]) * ctx.alpha[j];
    m.beta.push_back(num / denom);
  }
  // An integer relation for beta pulls back through U to one for alpha.
  m.beta_context = AlphaContext::from_reals(m.beta, ctx.irrationality_verified, std::nullopt);
  return m;
}

ModuleMap from_u_matrix(const Matrix<Integer>& U, const AlphaContext& ctx) {
  const int d = static_cast<int>(U.size()) - 1;
  if (d < 1) throw Error(Errc::dimension_mismatch, "U must be at least 2 x 2");
  for (const auto& row : U)
    if (static_cast<int>(row.size()) != d + 1) throw Error(Errc::dimension_mismatch, "U must be square");
  Matrix<Integer> A(d, std::vector<Integer>(d));
  std::vector<Integer> p(d), q(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) A[i][j] = U[i][j];
    p[i] = U[i][d];
    q[i] = U[d][i];
  }
  return from_integer_data(A, p, q, U[d][d], ctx);
}

Matrix<Real> t_matrix(const ModuleMap& M) {
  const int d = M.dim();
  Matrix<Real> t(d, std::vector<Real>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t[i][j] = to_real(M.A[i][j]) + M.beta[i] * to_real(M.q[j]);
  return t;
}

Real det_t_formula(const ModuleMap& M, const AlphaContext& ctx) {
  Real denom = to_real(M.r);
  for (int i = 0; i < M.dim(); ++i) denom -= to_real(M.q[i]) * ctx.alpha[i];
  return to_real(M.det_u) / denom;
}

ModuleVector apply_to_module_vector(const ModuleMap& M, const ModuleVector& v) {
  const int d = M.dim();
  if (v.dim() != d) throw Error(Errc::dimension_mismatch, "vector and map dimensions differ");
  std::vector<Rational> m(d);
  Rational n = v.r() * Rational(M.r);
  for (int i = 0; i < d; ++i) {
    m[i] = Rational(M.p[i]) * v.r();
    for (int j = 0; j < d; ++j) m[i] += Rational(M.A[i][j]) * v.m(j);
    n += Rational(M.q[i]) * v.m(i);
  }
  return ModuleVector(n, std::move(m));
}

ScalarModule apply_to_scalar(const ModuleMap& M, const ScalarModule& s) {
  if (M.dim() != 1 || s.dim() != 1) throw Error(Errc::dimension_mismatch, "apply_to_scalar needs d = 1");
  auto v = apply_to_module_vector(M, ModuleVector(s.c(0), {s.c0()}));
  return ScalarModule(v.m(0), {v.r()});
}

bool is_equivalence(const ModuleMap& M) { return abs(M.det_u) == 1; }

ModuleMap compose(const ModuleMap& second, const ModuleMap& first, const AlphaContext& ctx) {
  if (second.dim() != first.dim()) throw Error(Errc::dimension_mismatch, "maps of different dimension");
  const auto a = second.u_matrix(), b = first.u_matrix();
  const size_t n = a.size();
  Matrix<Integer> u(n, std::vector<Integer>(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      for (size_t j = 0; j < n; ++j) u[i][j] += a[i][k] * b[k][j];
  return from_u_matrix(u, ctx);
}

namespace {

Shape push_shape(const ModuleMap& M, const Shape& s, bool reverses) {
  auto map = [&](const ModuleVector& v) { return apply_to_module_vector(M, v); };
  auto map_all = [&](std::vector<ModuleVector> vs) {
    for (auto& v : vs) v = map(v);
    return vs;
  };
  return std::visit(
      [&](const auto& x) -> Shape {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntervalUnion1D>) {
          IntervalUnion1D out;
          for (const auto& iv : x.intervals) {
            ScalarModule a = apply_to_scalar(M, iv.a), b = apply_to_scalar(M, iv.b);
            if (reverses) std::swap(a, b);
            out.intervals.push_back({a, b});
          }
          if (reverses) std::reverse(out.intervals.begin(), out.intervals.end());
          return out;
        } else if constexpr (std::is_same_v<T, Polygon2D>) {
          Polygon2D out{map_all(x.vertices)};
          if (reverses) std::reverse(out.vertices.begin(), out.vertices.end());
          return out;
        } else if constexpr (std::is_same_v<T, Parallelepiped> || std::is_same_v<T, Zonotope>) {
          return T{map(x.base), map_all(x.gens)};
        } else if constexpr (std::is_same_v<T, Polyhedron3D>) {
          Polyhedron3D out{map_all(x.vertices), x.faces};
          if (reverses)
            for (auto& f : out.faces) std::reverse(f.begin(), f.end());
          return out;
        } else if constexpr (std::is_same_v<T, FramedPolygon>) {
          FramedPolygon out = x;
          out.frame = Parallelepiped{map(x.frame.base), map_all(x.frame.gens)};
          return out;
        } else if constexpr (std::is_same_v<T, DisjointUnion>) {
          DisjointUnion out;
          for (const auto& m : x.members) out.members.emplace_back(push_shape(M, m.shape, reverses));
          return out;
        } else {
          throw Error(Errc::unsupported_shape, "numeric-only sets cannot be pushed exactly");
        }
      },
      s);
}

}  // namespace

SetDescription push_set(const ModuleMap& M, const SetDescription& s, const AlphaContext& ctx) {
  if (s.dim() != M.dim()) throw Error(Errc::dimension_mismatch, "set and map dimensions differ");
  const bool reverses = det_t_formula(M, ctx) < 0;
  SetDescription out(push_shape(M, s.shape, reverses));
  if (s.certificate && is_equivalence(M))
    out.certificate = Certificate{cert::kLinearImage, {{"source", s.certificate->theorem}, {"det_u", to_string(M.det_u)}}};
  return out;
}

}  // namespace brs
