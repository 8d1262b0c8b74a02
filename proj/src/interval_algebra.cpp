#include <algorithm>

#include "brs/equidecomp.hpp"
#include "brs/error.hpp"

namespace brs {

namespace {

bool less(const ScalarModule& a, const ScalarModule& b, const AlphaContext& ctx) { return compare(a, b, ctx) < 0; }

const ScalarModule& min_of(const ScalarModule& a, const ScalarModule& b, const AlphaContext& ctx) {
  return less(b, a, ctx) ? b : a;
}
const ScalarModule& max_of(const ScalarModule& a, const ScalarModule& b, const AlphaContext& ctx) {
  return less(a, b, ctx) ? b : a;
}

// Sorted distinct points of [0, 1) including 0.
std::vector<ScalarModule> sorted_cells(std::vector<ScalarModule> pts, int d, const AlphaContext& ctx) {
  pts.push_back(ScalarModule(d));
  std::sort(pts.begin(), pts.end(), [&](const ScalarModule& a, const ScalarModule& b) { return less(a, b, ctx); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

ScalarModule torus_reduce(const ScalarModule& s, const AlphaContext& ctx) {
  return s - ScalarModule::constant(s.dim(), Rational(floor_exact(s, ctx)));
}

IntervalUnion1D canonical_union(std::vector<Interval> iv, const AlphaContext& ctx) {
  iv.erase(std::remove_if(iv.begin(), iv.end(), [&](const Interval& i) { return !less(i.a, i.b, ctx); }), iv.end());
  std::sort(iv.begin(), iv.end(), [&](const Interval& x, const Interval& y) { return less(x.a, y.a, ctx); });
  IntervalUnion1D out;
  for (auto& i : iv) {
    if (!out.intervals.empty() && !less(out.intervals.back().b, i.a, ctx))
      out.intervals.back().b = max_of(out.intervals.back().b, i.b, ctx);
    else
      out.intervals.push_back(std::move(i));
  }
  return out;
}

IntervalUnion1D interval_union(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx) {
  std::vector<Interval> all = a.intervals;
  all.insert(all.end(), b.intervals.begin(), b.intervals.end());
  return canonical_union(std::move(all), ctx);
}

IntervalUnion1D interval_intersection(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx) {
  auto x = canonical_union(a.intervals, ctx), y = canonical_union(b.intervals, ctx);
  std::vector<Interval> out;
  size_t i = 0, j = 0;
  while (i < x.intervals.size() && j < y.intervals.size()) {
    const auto& p = x.intervals[i];
    const auto& q = y.intervals[j];
    const ScalarModule& lo = max_of(p.a, q.a, ctx);
    const ScalarModule& hi = min_of(p.b, q.b, ctx);
    if (less(lo, hi, ctx)) out.push_back({lo, hi});
    if (less(p.b, q.b, ctx))
      ++i;
    else
      ++j;
  }
  return canonical_union(std::move(out), ctx);
}

IntervalUnion1D interval_difference(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx) {
  auto x = canonical_union(a.intervals, ctx), y = canonical_union(b.intervals, ctx);
  std::vector<Interval> out;
  size_t j = 0;
  for (const auto& p : x.intervals) {
    ScalarModule cur = p.a;
    while (j < y.intervals.size() && !less(cur, y.intervals[j].b, ctx)) ++j;
    size_t k = j;
    while (k < y.intervals.size() && less(y.intervals[k].a, p.b, ctx)) {
      if (less(cur, y.intervals[k].a, ctx)) out.push_back({cur, y.intervals[k].a});
      cur = max_of(cur, y.intervals[k].b, ctx);
      ++k;
    }
    if (less(cur, p.b, ctx)) out.push_back({cur, p.b});
  }
  return canonical_union(std::move(out), ctx);
}

IntervalUnion1D shift_union(const IntervalUnion1D& a, const ScalarModule& t) {
  IntervalUnion1D out = a;
  for (auto& i : out.intervals) {
    i.a += t;
    i.b += t;
  }
  return out;
}

bool same_set(const IntervalUnion1D& a, const IntervalUnion1D& b, const AlphaContext& ctx) {
  auto x = canonical_union(a.intervals, ctx), y = canonical_union(b.intervals, ctx);
  if (x.intervals.size() != y.intervals.size()) return false;
  for (size_t i = 0; i < x.intervals.size(); ++i)
    if (x.intervals[i].a != y.intervals[i].a || x.intervals[i].b != y.intervals[i].b) return false;
  return true;
}

ScalarModule total_length(const IntervalUnion1D& a) {
  ScalarModule s(1);
  for (const auto& i : a.intervals) s += i.b - i.a;
  return s;
}

StepFunctionTorus1D StepFunctionTorus1D::multiplicity(const IntervalUnion1D& s, const AlphaContext& ctx) {
  std::vector<ScalarModule> pts;
  for (const auto& i : s.intervals) {
    pts.push_back(torus_reduce(i.a, ctx));
    pts.push_back(torus_reduce(i.b, ctx));
  }
  StepFunctionTorus1D f;
  f.breakpoints = sorted_cells(std::move(pts), 1, ctx);
  f.values.assign(f.breakpoints.size(), 0);
  const ScalarModule one = ScalarModule::constant(1, 1);
  for (size_t c = 0; c < f.breakpoints.size(); ++c) {
    const ScalarModule& lo = f.breakpoints[c];
    const ScalarModule hi = c + 1 < f.breakpoints.size() ? f.breakpoints[c + 1] : one;
    // Lifts [lo + k, hi + k) inside [a, b): ceil(a - lo) <= k <= floor(b - hi).
    for (const auto& i : s.intervals) {
      Integer kmin = -floor_exact(lo - i.a, ctx);
      Integer kmax = floor_exact(i.b - hi, ctx);
      if (kmax >= kmin) f.values[c] += Integer(kmax - kmin + 1).get_si();
    }
  }
  return f;
}

long StepFunctionTorus1D::at(const ScalarModule& x, const AlphaContext& ctx) const {
  const ScalarModule y = torus_reduce(x, ctx);
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), y,
                             [&](const ScalarModule& a, const ScalarModule& b) { return less(a, b, ctx); });
  return values[static_cast<size_t>(it - breakpoints.begin()) - 1];
}

StepFunctionTorus1D StepFunctionTorus1D::shifted(const ScalarModule& t, const AlphaContext& ctx) const {
  std::vector<ScalarModule> pts;
  for (const auto& b : breakpoints) pts.push_back(torus_reduce(b - t, ctx));
  StepFunctionTorus1D f;
  f.breakpoints = sorted_cells(std::move(pts), 1, ctx);
  for (const auto& b : f.breakpoints) f.values.push_back(at(b + t, ctx));
  return f.simplified();
}

ScalarModule StepFunctionTorus1D::integral() const {
  ScalarModule s(1);
  const ScalarModule one = ScalarModule::constant(1, 1);
  for (size_t c = 0; c < breakpoints.size(); ++c) {
    const ScalarModule hi = c + 1 < breakpoints.size() ? breakpoints[c + 1] : one;
    s += (hi - breakpoints[c]) * Rational(values[c]);
  }
  return s;
}

StepFunctionTorus1D StepFunctionTorus1D::simplified() const {
  StepFunctionTorus1D f;
  for (size_t c = 0; c < breakpoints.size(); ++c) {
    if (c > 0 && values[c] == f.values.back()) continue;
    f.breakpoints.push_back(breakpoints[c]);
    f.values.push_back(values[c]);
  }
  return f;
}

namespace {

template <class Op>
StepFunctionTorus1D combine(const StepFunctionTorus1D& f, const StepFunctionTorus1D& g, const AlphaContext& ctx,
                            Op op) {
  std::vector<ScalarModule> pts = f.breakpoints;
  pts.insert(pts.end(), g.breakpoints.begin(), g.breakpoints.end());
  StepFunctionTorus1D h;
  h.breakpoints = sorted_cells(std::move(pts), 1, ctx);
  for (const auto& b : h.breakpoints) h.values.push_back(op(f.at(b, ctx), g.at(b, ctx)));
  return h.simplified();
}

}  // namespace

StepFunctionTorus1D pointwise_min(const StepFunctionTorus1D& f, const StepFunctionTorus1D& g,
                                  const AlphaContext& ctx) {
  return combine(f, g, ctx, [](long a, long b) { return std::min(a, b); });
}

bool same_function(const StepFunctionTorus1D& f, const StepFunctionTorus1D& g, const AlphaContext& ctx) {
  auto diff = combine(f, g, ctx, [](long a, long b) { return a - b; });
  return std::all_of(diff.values.begin(), diff.values.end(), [](long v) { return v == 0; });
}

}  // namespace brs
