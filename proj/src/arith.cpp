#include "brs/arith.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "brs/error.hpp"

namespace brs {

namespace {

struct PrecisionInit {
  PrecisionInit() { mpf_set_default_prec(kRealBits); }
};
const PrecisionInit precision_init;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_integer(std::string_view s, Integer& out) {
  s = trim(s);
  if (s.empty()) return false;
  size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
  std::string buf(s[0] == '+' ? s.substr(1) : s);
  return out.set_str(buf, 10) == 0;
}

}  // namespace

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::invalid_direction: return "invalid-direction";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::kesten_obstruction: return "kesten-obstruction";
    case Errc::non_lattice_generator: return "non-lattice-generator";
    case Errc::degenerate: return "degenerate";
    case Errc::unsupported_shape: return "unsupported-shape";
    case Errc::internal_consistency: return "internal-consistency";
    case Errc::degenerate_path: return "degenerate-path";
    case Errc::invalid_parametrization: return "invalid-parametrization";
    case Errc::unverified_decomposition: return "unverified-decomposition";
    case Errc::unequal_measures: return "unequal-measures";
    case Errc::oren_failure: return "oren-failure";
    case Errc::n_max_exceeded: return "n-max-exceeded";
    case Errc::non_convex: return "non-convex";
    case Errc::non_module_coordinates: return "non-module-coordinates";
    case Errc::insufficient_checkpoints: return "insufficient-checkpoints";
    case Errc::non_manifold: return "non-manifold";
    case Errc::degenerate_geometry: return "degenerate-geometry";
    case Errc::test_failure: return "test-failure";
    case Errc::precision_exhausted: return "precision-exhausted";
    case Errc::parse_error: return "parse-error";
  }
  return "unknown";
}

Real make_real(double v) { return Real(v, kRealBits); }

Real to_real(const Rational& q) { return Real(q, kRealBits); }

Real to_real(const Integer& z) { return Real(z, kRealBits); }

Real parse_real(std::string_view decimal) {
  Real x(0, kRealBits);
  std::string s(trim(decimal));
  if (s.empty() || x.set_str(s, 10) != 0)
    throw Error(Errc::parse_error, "not a decimal number: '" + s + "'");
  return x;
}

double to_double(const Real& x) { return x.get_d(); }

Real real_floor(const Real& x) {
  Real r(0, kRealBits);
  mpf_floor(r.get_mpf_t(), x.get_mpf_t());
  return r;
}

Real real_frac(const Real& x) {
  Real r(0, kRealBits);
  r = x - real_floor(x);
  return r;
}

Rational canonical(Rational q) {
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  Rational c = canonical(q);
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Rational parse_rational(std::string_view s) {
  s = trim(s);
  auto slash = s.find('/');
  Integer num, den = 1;
  bool ok = slash == std::string_view::npos
                ? parse_integer(s, num)
                : parse_integer(s.substr(0, slash), num) &&
                      parse_integer(s.substr(slash + 1), den);
  if (!ok) throw Error(Errc::parse_error, "not a rational: '" + std::string(s) + "'");
  if (den == 0) throw Error(Errc::parse_error, "zero denominator: '" + std::string(s) + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Integer floor_q(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_q(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

int sgn(const Rational& q) { return ::sgn(q); }

int sgn(const Integer& z) { return ::sgn(z); }

std::string real_to_string(const Real& x, int digits) {
  mp_exp_t exp;
  std::string mant = x.get_str(exp, 10, digits);
  if (mant.empty()) return "0";
  bool neg = mant[0] == '-';
  if (neg) mant.erase(0, 1);
  std::string out;
  if (exp <= 0) {
    out = "0." + std::string(-exp, '0') + mant;
  } else if (static_cast<size_t>(exp) >= mant.size()) {
    out = mant + std::string(exp - mant.size(), '0');
  } else {
    out = mant.substr(0, exp) + "." + mant.substr(exp);
  }
  return neg ? "-" + out : out;
}

}  // namespace brs
