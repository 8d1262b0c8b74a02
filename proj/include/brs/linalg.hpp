#pragma once

#include <vector>

#include "brs/arith.hpp"

namespace brs {

template <class T>
using Matrix = std::vector<std::vector<T>>;

Rational det_q(Matrix<Rational> a);
// Inverse of a nonsingular rational matrix; throws degenerate otherwise.
Matrix<Rational> inverse_q(Matrix<Rational> a);
Integer det_z(const Matrix<Integer>& a);

Real det_real(Matrix<Real> a);
Matrix<Real> inverse_real(Matrix<Real> a);
Matrix<double> inverse_double(Matrix<double> a);
double det_double(Matrix<double> a);

// Integer matrix with determinant +1 whose last column is the primitive
// vector m (gcd of entries 1).
Matrix<Integer> complete_to_unimodular(const std::vector<Integer>& m);

}  // namespace brs
