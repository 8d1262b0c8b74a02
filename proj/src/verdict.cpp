#include <algorithm>

#include "brs/discrepancy.hpp"
#include "brs/error.hpp"
#include "brs/invariants.hpp"

namespace brs {

namespace {

Verdict make(VerdictKind k, std::string rule, std::string detail) {
  Verdict v;
  v.kind = k;
  v.rule = std::move(rule);
  v.detail = std::move(detail);
  return v;
}

bool all_lattice(const std::vector<ModuleVector>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const ModuleVector& v) { return is_lattice_member(v); });
}

// Side lengths if the generators are positive multiples of distinct unit vectors.
std::optional<std::vector<ScalarModule>> box_lengths(const Parallelepiped& p, const AlphaContext& ctx) {
  const int d = p.base.dim();
  std::vector<ScalarModule> len(d);
  std::vector<bool> seen(d, false);
  for (const auto& g : p.gens) {
    int axis = -1;
    for (int i = 0; i < d; ++i) {
      if (g.component(i).is_zero()) continue;
      if (axis >= 0) return std::nullopt;
      axis = i;
    }
    if (axis < 0 || seen[axis]) return std::nullopt;
    seen[axis] = true;
    len[axis] = abs(g.component(axis), ctx);
  }
  return len;
}

std::string describe(const HadwigerEntry& e) {
  return "rank-" + std::to_string(e.representative.k) + " flag at " + format_vector(e.representative.base) +
         " has invariant " + to_string(e.q) + " * " + e.ref_magnitude;
}

std::optional<Verdict> decide(const SetDescription& s, const AlphaContext& ctx) {
  const int d = s.dim();
  if (s.is_exact()) {
    const ScalarModule vol = volume_symbolic(s, ctx);
    if (!admissible_measure(vol))
      return make(VerdictKind::not_brs, "measure", "volume " + format_scalar(vol) + " is not in Z + Z*alpha_1 + ...");
  }

  if (d == 1 && s.is_exact()) {
    IntervalUnion1D u;
    if (auto* iu = std::get_if<IntervalUnion1D>(&s.shape)) {
      u = *iu;
    } else if (auto* p = std::get_if<Parallelepiped>(&s.shape)) {
      ScalarModule a = p->base.component(0), b = a + p->gens[0].component(0);
      if (sign(b - a, ctx) < 0) std::swap(a, b);
      u.intervals.push_back({a, b});
    }
    if (!u.intervals.empty()) {
      auto r = oren_test(u);
      if (r.brs) return make(VerdictKind::brs, "oren", "endpoints match up to Z*alpha + Z");
      return make(VerdictKind::not_brs, "oren", "no matching of right to left endpoints modulo Z*alpha + Z");
    }
  }

  if (d == 2 && s.is_exact()) {
    if (auto poly = as_polygon(s, ctx)) {
      auto np = normalize_polygon(poly->vertices, ctx);
      if (np.vertices.size() >= 3 && is_convex_ccw(np, ctx)) {
        auto r = convex_polygon_test(np, ctx);
        if (r.brs) return make(VerdictKind::brs, "convex-polygon", "edge pairs satisfy both lattice conditions");
        return make(VerdictKind::not_brs, "convex-polygon", r.failure);
      }
    }
  }

  if (s.certificate) return make(VerdictKind::brs, "certificate", s.certificate->theorem);

  if (auto* p = std::get_if<Parallelepiped>(&s.shape)) {
    if (all_lattice(p->gens)) return make(VerdictKind::brs, "lattice-generators", "parallelepiped spanned by Z*alpha + Z^d");
    if (auto len = box_lengths(*p, ctx)) {
      if (box_test(*len)) return make(VerdictKind::brs, "box", "one side in Z*alpha_j + Z, others integral");
      return make(VerdictKind::not_brs, "box", "side lengths violate the box criterion");
    }
  }
  if (auto* z = std::get_if<Zonotope>(&s.shape); z && all_lattice(z->gens))
    return make(VerdictKind::brs, "lattice-generators", "zonotope with generators in Z*alpha + Z^d");

  if (d <= 2 && s.is_exact()) {
    try {
      auto h = hadwiger(s, ctx);
      if (!h.all_zero) return make(VerdictKind::not_brs, "hadwiger", describe(h.entries.front()));
    } catch (const Error& e) {
      if (e.code() != Errc::unsupported_shape) throw;
    }
  }
  if (auto* ph = std::get_if<Polyhedron3D>(&s.shape)) {
    auto sym = symmetry_tests(*ph);
    if (!sym.central_symmetric) return make(VerdictKind::not_brs, "symmetry", "polyhedron is not centrally symmetric");
    if (!sym.faces_symmetric) return make(VerdictKind::not_brs, "symmetry", "a face is not centrally symmetric");
    if (sym.zonohedron_brs) return make(VerdictKind::brs, "symmetry", "zonohedron with lattice vertices");
  }
  if (s.is_exact()) {
    if (auto vs = polytope_vertices(s, ctx); vs && !vertex_pairing_test(*vs))
      return make(VerdictKind::not_brs, "vertex-pairing", "a vertex has no partner at a lattice difference");
  }
  return std::nullopt;
}

}  // namespace

Verdict brs_verdict(const SetDescription& s, const AlphaContext& ctx, const VerdictOptions& opt) {
  if (s.dim() != ctx.d) throw Error(Errc::dimension_mismatch, "set and rotation dimensions differ");
  if (auto v = decide(s, ctx)) return *v;
  Verdict v = make(VerdictKind::unknown, "diagnostic", "no decisive criterion applies");
  if (opt.run_diagnostic) v.diagnostic = discrepancy_report(s, ctx, opt.report).verdict;
  return v;
}

}  // namespace brs
