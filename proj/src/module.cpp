#include "brs/module.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "brs/error.hpp"
#include "brs/linalg.hpp"

namespace brs {

namespace {

void check_dim(int a, int b, const char* what) {
  if (a != b)
    throw Error(Errc::dimension_mismatch, std::string(what) + ": dimension " +
                                              std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

// ---------------------------------------------------------------- ScalarModule

ScalarModule::ScalarModule(Rational c0, std::vector<Rational> c)
    : c0_(std::move(c0)), c_(std::move(c)) {
  c0_.canonicalize();
  for (auto& x : c_) x.canonicalize();
}

ScalarModule ScalarModule::constant(int d, const Rational& v) {
  ScalarModule s(d);
  s.c0_ = canonical(v);
  return s;
}

ScalarModule ScalarModule::alpha(int d, int i, const Rational& coef) {
  ScalarModule s(d);
  s.c_.at(i) = canonical(coef);
  return s;
}

bool ScalarModule::is_zero() const {
  if (c0_ != 0) return false;
  return std::all_of(c_.begin(), c_.end(), [](const Rational& x) { return x == 0; });
}

bool ScalarModule::is_rational() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& x) { return x == 0; });
}

bool ScalarModule::all_integer() const {
  if (!is_integer(c0_)) return false;
  return std::all_of(c_.begin(), c_.end(), [](const Rational& x) { return is_integer(x); });
}

Real ScalarModule::value(const AlphaContext& ctx) const {
  check_dim(dim(), ctx.d, "ScalarModule::value");
  Real v = to_real(c0_);
  for (int i = 0; i < dim(); ++i)
    if (c_[i] != 0) v += to_real(c_[i]) * ctx.alpha[i];
  return v;
}

double ScalarModule::to_double(const AlphaContext& ctx) const { return value(ctx).get_d(); }

ScalarModule& ScalarModule::operator+=(const ScalarModule& o) {
  check_dim(dim(), o.dim(), "ScalarModule +");
  c0_ += o.c0_;
  for (int i = 0; i < dim(); ++i) c_[i] += o.c_[i];
  return *this;
}

ScalarModule& ScalarModule::operator-=(const ScalarModule& o) {
  check_dim(dim(), o.dim(), "ScalarModule -");
  c0_ -= o.c0_;
  for (int i = 0; i < dim(); ++i) c_[i] -= o.c_[i];
  return *this;
}

ScalarModule& ScalarModule::operator*=(const Rational& k) {
  c0_ *= k;
  for (auto& x : c_) x *= k;
  return *this;
}

ScalarModule ScalarModule::operator-() const {
  ScalarModule s = *this;
  s *= Rational(-1);
  return s;
}

bool ScalarModule::operator==(const ScalarModule& o) const {
  return dim() == o.dim() && c0_ == o.c0_ && c_ == o.c_;
}

bool ScalarModule::lex_less(const ScalarModule& o) const {
  if (c0_ != o.c0_) return c0_ < o.c0_;
  for (int i = 0; i < dim(); ++i)
    if (c_[i] != o.c_[i]) return c_[i] < o.c_[i];
  return false;
}

// ---------------------------------------------------------------- ModuleVector

ModuleVector::ModuleVector(Rational r, std::vector<Rational> m)
    : r_(std::move(r)), m_(std::move(m)) {
  r_.canonicalize();
  for (auto& x : m_) x.canonicalize();
}

ModuleVector ModuleVector::integer(const std::vector<long>& m, long r) {
  std::vector<Rational> q(m.begin(), m.end());
  return ModuleVector(Rational(r), q);
}

ModuleVector ModuleVector::unit(int d, int i) {
  ModuleVector v(d);
  v.m_.at(i) = 1;
  return v;
}

ModuleVector ModuleVector::alpha(int d, const Rational& r) {
  ModuleVector v(d);
  v.r_ = canonical(r);
  return v;
}

ScalarModule ModuleVector::component(int i) const {
  std::vector<Rational> c(dim());
  c[i] = r_;
  return ScalarModule(m_[i], c);
}

bool ModuleVector::is_zero() const {
  if (r_ != 0) return false;
  return std::all_of(m_.begin(), m_.end(), [](const Rational& x) { return x == 0; });
}

std::vector<Real> ModuleVector::value(const AlphaContext& ctx) const {
  check_dim(dim(), ctx.d, "ModuleVector::value");
  std::vector<Real> out;
  out.reserve(dim());
  Real r = to_real(r_);
  for (int i = 0; i < dim(); ++i) {
    Real v = to_real(m_[i]);
    v += r * ctx.alpha[i];
    out.push_back(v);
  }
  return out;
}

std::vector<double> ModuleVector::to_double(const AlphaContext& ctx) const {
  auto v = value(ctx);
  std::vector<double> out;
  for (auto& x : v) out.push_back(x.get_d());
  return out;
}

ModuleVector& ModuleVector::operator+=(const ModuleVector& o) {
  check_dim(dim(), o.dim(), "ModuleVector +");
  r_ += o.r_;
  for (int i = 0; i < dim(); ++i) m_[i] += o.m_[i];
  return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& o) {
  check_dim(dim(), o.dim(), "ModuleVector -");
  r_ -= o.r_;
  for (int i = 0; i < dim(); ++i) m_[i] -= o.m_[i];
  return *this;
}

ModuleVector& ModuleVector::operator*=(const Rational& k) {
  r_ *= k;
  for (auto& x : m_) x *= k;
  return *this;
}

ModuleVector ModuleVector::operator-() const {
  ModuleVector v = *this;
  v *= Rational(-1);
  return v;
}

bool ModuleVector::operator==(const ModuleVector& o) const {
  return dim() == o.dim() && r_ == o.r_ && m_ == o.m_;
}

bool ModuleVector::lex_less(const ModuleVector& o) const {
  if (r_ != o.r_) return r_ < o.r_;
  for (int i = 0; i < dim(); ++i)
    if (m_[i] != o.m_[i]) return m_[i] < o.m_[i];
  return false;
}

// ---------------------------------------------------------------- free functions

bool is_lattice_member(const ModuleVector& v) {
  if (!is_integer(v.r())) return false;
  return std::all_of(v.m().begin(), v.m().end(), [](const Rational& x) { return is_integer(x); });
}

bool is_lattice_member(const ScalarModule& s) {
  check_dim(s.dim(), 1, "is_lattice_member(ScalarModule)");
  return s.all_integer();
}

std::vector<Real> evaluate(const ModuleVector& v, const AlphaContext& ctx) { return v.value(ctx); }

int sign(const ScalarModule& s, const AlphaContext& ctx) {
  if (s.is_zero()) return 0;
  Real v = s.value(ctx);
  Real scale = abs(to_real(s.c0()));
  for (const auto& x : s.c()) scale += abs(to_real(x));
  // Nonzero by independence; if it evaluates below ~2^-200 relative we cannot
  // trust the sign.
  Real floor_mag = scale;
  mpf_div_2exp(floor_mag.get_mpf_t(), scale.get_mpf_t(), 200);
  if (abs(v) <= floor_mag)
    throw Error(Errc::precision_exhausted,
                "nonzero module element " + format_scalar(s) + " is numerically indistinguishable from 0");
  return v > 0 ? 1 : -1;
}

int compare(const ScalarModule& a, const ScalarModule& b, const AlphaContext& ctx) {
  return sign(a - b, ctx);
}

ScalarModule abs(const ScalarModule& s, const AlphaContext& ctx) {
  return sign(s, ctx) < 0 ? -s : s;
}

Integer floor_exact(const ScalarModule& s, const AlphaContext& ctx) {
  Real v = s.value(ctx);
  Integer n(real_floor(v));
  const int d = s.dim();
  while (sign(s - ScalarModule::constant(d, Rational(n)), ctx) < 0) --n;
  while (sign(s - ScalarModule::constant(d, Rational(n + 1)), ctx) >= 0) ++n;
  return n;
}

ScalarModule cross(const ModuleVector& a, const ModuleVector& b) {
  check_dim(a.dim(), 2, "cross");
  check_dim(b.dim(), 2, "cross");
  const Rational &r = a.r(), &s = b.r();
  Rational c1 = r * b.m(1) - s * a.m(1);
  Rational c2 = s * a.m(0) - r * b.m(0);
  Rational c0 = a.m(0) * b.m(1) - a.m(1) * b.m(0);
  return ScalarModule(c0, {c1, c2});
}

ScalarModule det_module(const std::vector<ModuleVector>& cols) {
  const int d = static_cast<int>(cols.size());
  for (const auto& c : cols) check_dim(c.dim(), d, "det_module");
  Matrix<Rational> p(d, std::vector<Rational>(d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) p[i][k] = cols[k].m(i);
  Rational c0 = det_q(p);
  std::vector<Rational> c(d);
  for (int k = 0; k < d; ++k) {
    if (cols[k].r() == 0) continue;
    for (int i = 0; i < d; ++i) {
      // cofactor C_{ik}
      Matrix<Rational> minor;
      for (int a = 0; a < d; ++a) {
        if (a == i) continue;
        std::vector<Rational> row;
        for (int b = 0; b < d; ++b)
          if (b != k) row.push_back(p[a][b]);
        minor.push_back(std::move(row));
      }
      Rational cof = minor.empty() ? Rational(1) : det_q(minor);
      if ((i + k) % 2) cof = -cof;
      c[i] += cols[k].r() * cof;
    }
  }
  return ScalarModule(c0, c);
}

ScalarModule det_with_column(const std::vector<ModuleVector>& cols, int k,
                             const std::vector<Rational>& z) {
  std::vector<ModuleVector> c = cols;
  c.at(k) = ModuleVector(Rational(0), z);
  return det_module(c);
}

namespace {

// The coordinates of w + t u: index 0 is the alpha coefficient, 1..d the
// rational parts.
std::vector<Rational> coords(const ModuleVector& v) {
  std::vector<Rational> out{v.r()};
  out.insert(out.end(), v.m().begin(), v.m().end());
  return out;
}

}  // namespace

std::vector<Rational> segment_lattice_solutions(const ModuleVector& w, const ModuleVector& u,
                                                const Rational& lo, const Rational& hi) {
  check_dim(w.dim(), u.dim(), "segment_lattice_solutions");
  if (u.is_zero()) throw Error(Errc::invalid_direction, "segment direction u is zero");
  if (w.dim() < 2)
    throw Error(Errc::dimension_mismatch,
                "segment_lattice_solutions needs d >= 2 (real solutions are dense for d = 1)");
  std::vector<Rational> out;
  if (lo > hi) return out;
  auto wc = coords(w), uc = coords(u);
  size_t c = 0;
  if (uc[0] == 0) {
    if (!is_integer(wc[0])) return out;
    c = 1;
    while (uc[c] == 0) ++c;
  }
  // t = (n - w_c) / u_c for integer n.
  Rational a = wc[c] + lo * uc[c], b = wc[c] + hi * uc[c];
  if (a > b) std::swap(a, b);
  for (Integer n = ceil_q(a); n <= floor_q(b); ++n) {
    Rational t = (Rational(n) - wc[c]) / uc[c];
    t.canonicalize();
    bool ok = true;
    for (size_t e = 0; e < wc.size() && ok; ++e) {
      if (e == c) continue;
      ok = is_integer(canonical(wc[e] + t * uc[e]));
    }
    if (ok) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<LineSolutions> line_lattice_solutions(const ModuleVector& w, const ModuleVector& u) {
  check_dim(w.dim(), u.dim(), "line_lattice_solutions");
  if (u.is_zero()) throw Error(Errc::invalid_direction, "line direction u is zero");
  if (w.dim() < 2) throw Error(Errc::dimension_mismatch, "line_lattice_solutions needs d >= 2");
  auto wc = coords(w), uc = coords(u);
  size_t c = 0;
  if (uc[0] == 0) {
    if (!is_integer(wc[0])) return std::nullopt;
    c = 1;
    while (uc[c] == 0) ++c;
  }
  // Each other coordinate requires w_e + (n - w_c) * (u_e / u_c) in Z, which is
  // periodic in n with period den(u_e / u_c).
  Integer period = 1;
  for (size_t e = 0; e < wc.size(); ++e) {
    if (e == c) continue;
    period = lcm(period, canonical(uc[e] / uc[c]).get_den());
  }
  for (Integer n = 0; n < period; ++n) {
    Rational t = (Rational(n) - wc[c]) / uc[c];
    bool ok = true;
    for (size_t e = 0; e < wc.size() && ok; ++e) {
      if (e == c) continue;
      ok = is_integer(canonical(wc[e] + t * uc[e]));
    }
    if (!ok) continue;
    Rational pt = canonical(Rational(period) / uc[c]);
    if (pt < 0) pt = -pt;
    Rational k(floor_q(canonical(t / pt)));
    LineSolutions s{canonical(t - k * pt), pt};
    return s;
  }
  return std::nullopt;
}

bool admissible_measure(const ScalarModule& gamma) { return gamma.all_integer(); }

// ---------------------------------------------------------------- text form

std::string format_scalar(const ScalarModule& s) {
  std::ostringstream os;
  os << to_string(s.c0());
  for (int i = 0; i < s.dim(); ++i) {
    const Rational& c = s.c(i);
    if (c == 0) continue;
    os << (c < 0 ? " - " : " + ") << to_string(c < 0 ? Rational(-c) : c) << "*a" << i + 1;
  }
  return os.str();
}

ScalarModule parse_scalar(std::string_view text, int d) {
  std::string s;
  // Accept the middle dot (U+00B7) as a multiplication sign.
  for (size_t i = 0; i < text.size(); ++i) {
    unsigned char ch = static_cast<unsigned char>(text[i]);
    if (ch == 0xC2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xB7) {
      s += '*';
      ++i;
    } else if (!std::isspace(ch)) {
      s += static_cast<char>(ch);
    }
  }
  auto fail = [&](const std::string& why) -> Error {
    return Error(Errc::parse_error, "bad module scalar '" + std::string(text) + "': " + why);
  };
  if (s.empty()) throw fail("empty");
  ScalarModule out(d);
  size_t i = 0;
  bool first = true;
  while (i < s.size()) {
    int sgn_term = 1;
    if (s[i] == '+' || s[i] == '-') {
      sgn_term = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw fail("expected '+' or '-'");
    }
    first = false;
    size_t start = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/')) ++i;
    Rational coef = 1;
    bool have_coef = i > start;
    if (have_coef) coef = parse_rational(s.substr(start, i - start));
    if (i < s.size() && s[i] == '*') {
      if (!have_coef) throw fail("dangling '*'");
      ++i;
    }
    if (i < s.size() && s[i] == 'a') {
      ++i;
      size_t ds = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (ds == i) throw fail("missing alpha index");
      int idx = std::stoi(s.substr(ds, i - ds));
      if (idx < 1 || idx > d) throw fail("alpha index out of range");
      std::vector<Rational> c(d);
      c[idx - 1] = coef * sgn_term;
      out += ScalarModule(Rational(0), c);
    } else {
      if (!have_coef) throw fail("missing coefficient");
      out += ScalarModule::constant(d, coef * sgn_term);
    }
  }
  return out;
}

std::string format_vector(const ModuleVector& v) {
  std::ostringstream os;
  os << "(r=" << to_string(v.r()) << ", m=(";
  for (int i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << to_string(v.m(i));
  os << "))";
  return os.str();
}

}  // namespace brs
