#include "brs/alpha.hpp"

#include <set>
#include <sstream>

#include "brs/error.hpp"

namespace brs {

namespace {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

AlphaContext AlphaContext::from_reals(std::vector<Real> comps, bool verified,
                                      std::optional<std::string> id) {
  mpf_set_default_prec(kRealBits);
  AlphaContext ctx;
  ctx.d = static_cast<int>(comps.size());
  if (ctx.d == 0) throw Error(Errc::dimension_mismatch, "alpha must have at least one component");
  for (auto& a : comps) {
    Real x(a, kRealBits);
    ctx.alpha.push_back(x);
    ctx.alpha_d.push_back(x.get_d());
  }
  ctx.irrationality_verified = verified;
  ctx.preset_id = std::move(id);
  return ctx;
}

AlphaContext AlphaContext::preset(std::string_view id) {
  std::vector<Real> comps;
  std::set<long> seen;
  for (const auto& tok : split(id, '_')) {
    if (tok.size() < 5 || tok.compare(0, 4, "sqrt") != 0)
      throw Error(Errc::parse_error, "unknown alpha preset '" + std::string(id) + "'");
    long p = 0;
    try {
      p = std::stol(tok.substr(4));
    } catch (...) {
      throw Error(Errc::parse_error, "unknown alpha preset '" + std::string(id) + "'");
    }
    if (!is_prime(p) || !seen.insert(p).second)
      throw Error(Errc::parse_error,
                  "alpha presets use square roots of distinct primes: '" + std::string(id) + "'");
    Real s(p, kRealBits);
    s = sqrt(s);
    comps.push_back(real_frac(s));
  }
  return from_reals(std::move(comps), true, std::string(id));
}

AlphaContext AlphaContext::standard(int d) {
  static const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (d < 1 || d > 8) throw Error(Errc::dimension_mismatch, "standard preset needs 1 <= d <= 8");
  std::string id;
  for (int i = 0; i < d; ++i) id += (i ? "_sqrt" : "sqrt") + std::to_string(primes[i]);
  return preset(id);
}

AlphaContext AlphaContext::from_decimals(const std::vector<std::string>& comps) {
  std::vector<Real> vals;
  for (const auto& c : comps) vals.push_back(parse_real(c));
  return from_reals(std::move(vals), false, std::nullopt);
}

AlphaContext AlphaContext::parse(std::string_view text) {
  constexpr std::string_view prefix = "preset:";
  if (text.substr(0, prefix.size()) == prefix) return preset(text.substr(prefix.size()));
  return from_decimals(split(text, ','));
}

std::string AlphaContext::descriptor() const {
  if (preset_id) return "preset:" + *preset_id;
  std::ostringstream os;
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << real_to_string(alpha[i], 40);
  return os.str();
}

}  // namespace brs
