#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brs/alpha.hpp"
#include "brs/arith.hpp"

namespace brs {

// c0 + <c, alpha>, rational coefficients. Equality is coefficient equality,
// which is sound because 1, alpha_1, ..., alpha_d are independent over Q.
class ScalarModule {
 public:
  ScalarModule() = default;
  explicit ScalarModule(int d) : c_(d) {}
  ScalarModule(Rational c0, std::vector<Rational> c);

  static ScalarModule constant(int d, const Rational& v);
  static ScalarModule alpha(int d, int i, const Rational& coef = 1);

  int dim() const { return static_cast<int>(c_.size()); }
  const Rational& c0() const { return c0_; }
  const std::vector<Rational>& c() const { return c_; }
  const Rational& c(int i) const { return c_[i]; }

  bool is_zero() const;
  bool is_rational() const;  // all alpha coefficients zero
  bool all_integer() const;

  Real value(const AlphaContext& ctx) const;
  double to_double(const AlphaContext& ctx) const;

  ScalarModule& operator+=(const ScalarModule& o);
  ScalarModule& operator-=(const ScalarModule& o);
  ScalarModule& operator*=(const Rational& k);
  friend ScalarModule operator+(ScalarModule a, const ScalarModule& b) { return a += b; }
  friend ScalarModule operator-(ScalarModule a, const ScalarModule& b) { return a -= b; }
  friend ScalarModule operator*(ScalarModule a, const Rational& k) { return a *= k; }
  friend ScalarModule operator*(const Rational& k, ScalarModule a) { return a *= k; }
  ScalarModule operator-() const;
  bool operator==(const ScalarModule& o) const;
  bool operator!=(const ScalarModule& o) const { return !(*this == o); }
  // Lexicographic on (c0, c); used for canonical ordering, not for magnitude.
  bool lex_less(const ScalarModule& o) const;

 private:
  Rational c0_;
  std::vector<Rational> c_;
};

// r*alpha + m in R^d.
class ModuleVector {
 public:
  ModuleVector() = default;
  explicit ModuleVector(int d) : m_(d) {}
  ModuleVector(Rational r, std::vector<Rational> m);

  static ModuleVector integer(const std::vector<long>& m, long r = 0);
  static ModuleVector unit(int d, int i);
  static ModuleVector alpha(int d, const Rational& r = 1);

  int dim() const { return static_cast<int>(m_.size()); }
  const Rational& r() const { return r_; }
  const std::vector<Rational>& m() const { return m_; }
  const Rational& m(int i) const { return m_[i]; }

  ScalarModule component(int i) const;  // r*alpha_i + m_i
  bool is_zero() const;

  std::vector<Real> value(const AlphaContext& ctx) const;
  std::vector<double> to_double(const AlphaContext& ctx) const;

  ModuleVector& operator+=(const ModuleVector& o);
  ModuleVector& operator-=(const ModuleVector& o);
  ModuleVector& operator*=(const Rational& k);
  friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
  friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
  friend ModuleVector operator*(ModuleVector a, const Rational& k) { return a *= k; }
  friend ModuleVector operator*(const Rational& k, ModuleVector a) { return a *= k; }
  ModuleVector operator-() const;
  bool operator==(const ModuleVector& o) const;
  bool operator!=(const ModuleVector& o) const { return !(*this == o); }
  bool lex_less(const ModuleVector& o) const;

 private:
  Rational r_;
  std::vector<Rational> m_;
};

bool is_lattice_member(const ModuleVector& v);
bool is_lattice_member(const ScalarModule& s);  // d=1 view: c0 + c*alpha
std::vector<Real> evaluate(const ModuleVector& v, const AlphaContext& ctx);

// Exact sign; zero iff all coefficients vanish. Throws precision_exhausted if a
// nonzero element evaluates below the working precision.
int sign(const ScalarModule& s, const AlphaContext& ctx);
int compare(const ScalarModule& a, const ScalarModule& b, const AlphaContext& ctx);
ScalarModule abs(const ScalarModule& s, const AlphaContext& ctx);
// Largest integer n with n <= s, decided exactly.
Integer floor_exact(const ScalarModule& s, const AlphaContext& ctx);

// 2D cross product a_1 b_2 - a_2 b_1; the alpha_1*alpha_2 terms cancel.
ScalarModule cross(const ModuleVector& a, const ModuleVector& b);
// det(v_1, ..., v_d) by multilinear expansion; terms with alpha in two columns
// vanish, so the result stays in the module.
ScalarModule det_module(const std::vector<ModuleVector>& cols);
// det of d columns where column k is replaced by a rational vector.
ScalarModule det_with_column(const std::vector<ModuleVector>& cols, int k,
                             const std::vector<Rational>& z);

// Rational t in [lo, hi] with w + t*u a lattice member. Needs d >= 2: for d = 1
// the real solution set is dense and mostly irrational.
std::vector<Rational> segment_lattice_solutions(const ModuleVector& w,
                                                const ModuleVector& u,
                                                const Rational& lo,
                                                const Rational& hi);
// All real t with w + t*u in the lattice (d >= 2): either none or the
// progression t0 + k*period, t0 in [0, period).
struct LineSolutions {
  Rational t0;
  Rational period;
};
std::optional<LineSolutions> line_lattice_solutions(const ModuleVector& w,
                                                    const ModuleVector& u);

bool admissible_measure(const ScalarModule& gamma);

// Text form "c0 + c1*a1 + ... + cd*ad" (coefficients "p/q", '*' optional).
std::string format_scalar(const ScalarModule& s);
ScalarModule parse_scalar(std::string_view text, int d);
std::string format_vector(const ModuleVector& v);

}  // namespace brs
