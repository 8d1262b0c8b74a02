#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brs/arith.hpp"

namespace brs {

// The rotation vector. Decisions never consult these numbers; they are only
// used for evaluation, ordering, and simulation.
struct AlphaContext {
  int d = 0;
  std::vector<Real> alpha;
  std::vector<double> alpha_d;
  std::optional<std::string> preset_id;
  // False for user-supplied decimals: nothing certifies that 1, a_1, ..., a_d
  // are independent over Q in that case.
  bool irrationality_verified = false;

  // "sqrt2", "sqrt2_sqrt3", "sqrt2_sqrt3_sqrt5", ...: fractional parts of
  // square roots of distinct primes. 1 and square roots of distinct
  // square-free integers are linearly independent over Q (Besicovitch), so the
  // presets are certified.
  static AlphaContext preset(std::string_view id);
  // Default preset for dimension d.
  static AlphaContext standard(int d);
  static AlphaContext from_decimals(const std::vector<std::string>& comps);
  static AlphaContext from_reals(std::vector<Real> comps, bool verified,
                                 std::optional<std::string> id);
  // "preset:<id>" or a comma separated list of decimals.
  static AlphaContext parse(std::string_view text);

  std::string descriptor() const;
};

}  // namespace brs
