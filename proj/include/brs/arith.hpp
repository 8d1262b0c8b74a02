#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace brs {

using Integer = mpz_class;
using Rational = mpq_class;
// High-precision float used for evaluating module elements and breaking
// numeric ties; 256 bits is ~77 decimal digits.
using Real = mpf_class;

inline constexpr mp_bitcnt_t kRealBits = 256;

Real make_real(double v = 0.0);
Real to_real(const Rational& q);
Real to_real(const Integer& z);
Real parse_real(std::string_view decimal);
double to_double(const Real& x);
Real real_floor(const Real& x);
Real real_frac(const Real& x);  // x - floor(x), in [0,1)

Rational canonical(Rational q);
std::string to_string(const Rational& q);  // always "p/q"
std::string to_string(const Integer& z);
Rational parse_rational(std::string_view s);  // "p", "p/q", "-p/q"
bool is_integer(const Rational& q);
Integer floor_q(const Rational& q);
Integer ceil_q(const Rational& q);
Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);
int sgn(const Rational& q);
int sgn(const Integer& z);

std::string real_to_string(const Real& x, int digits = 30);

}  // namespace brs
