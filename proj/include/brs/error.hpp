#pragma once

#include <stdexcept>
#include <string>

namespace brs {

enum class Errc {
  invalid_direction,
  dimension_mismatch,
  kesten_obstruction,
  non_lattice_generator,
  degenerate,
  unsupported_shape,
  internal_consistency,
  degenerate_path,
  invalid_parametrization,
  unverified_decomposition,
  unequal_measures,
  oren_failure,
  n_max_exceeded,
  non_convex,
  non_module_coordinates,
  insufficient_checkpoints,
  non_manifold,
  degenerate_geometry,
  test_failure,
  precision_exhausted,
  parse_error,
};

const char* errc_name(Errc e);

// Domain error with a machine-readable code; the CLI maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace brs
