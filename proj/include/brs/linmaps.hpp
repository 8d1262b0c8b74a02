#pragma once

#include <vector>

#include "brs/linalg.hpp"
#include "brs/sets.hpp"

namespace brs {

// Integer data U = [[A, p], [q^T, r]] of a linear map T with
// T(n*alpha + m) = n'*beta + m', (m', n') = (Am + pn, <q,m> + rn).
struct ModuleMap {
  Matrix<Integer> A;
  std::vector<Integer> p, q;
  Integer r;
  Integer det_u;           // det U = r det A - <q, adj(A) p>
  std::vector<Real> beta;  // (A alpha - p) / (r - <q, alpha>)
  AlphaContext beta_context;

  int dim() const { return static_cast<int>(p.size()); }
  Matrix<Integer> u_matrix() const;
};

// Throws invalid_parametrization if det U = 0 and dimension_mismatch on
// malformed data. 1, beta_1, ..., beta_d are independent over Q exactly when
// the same holds for alpha, so beta_context inherits the verification flag.
ModuleMap from_integer_data(const Matrix<Integer>& A, const std::vector<Integer>& p,
                            const std::vector<Integer>& q, const Integer& r, const AlphaContext& ctx);
ModuleMap from_u_matrix(const Matrix<Integer>& U, const AlphaContext& ctx);

// T x = A x + <q, x> beta.
Matrix<Real> t_matrix(const ModuleMap& M);
// det U / (r - <q, alpha>).
Real det_t_formula(const ModuleMap& M, const AlphaContext& ctx);

// Coefficients of the image with respect to beta.
ModuleVector apply_to_module_vector(const ModuleMap& M, const ModuleVector& v);
ScalarModule apply_to_scalar(const ModuleMap& M, const ScalarModule& s);  // d = 1

bool is_equivalence(const ModuleMap& M);

// first, then second (second is parametrized over first's beta).
ModuleMap compose(const ModuleMap& second, const ModuleMap& first, const AlphaContext& ctx);

// Image of S under T, in the beta world. Interval unions, polygons,
// parallelepipeds, zonotopes, polyhedra, framed polygons and disjoint unions
// of these; numeric-only sets throw unsupported_shape. Certificates carry over
// when |det U| = 1.
SetDescription push_set(const ModuleMap& M, const SetDescription& s, const AlphaContext& ctx);

}  // namespace brs
