#include "brs/linalg.hpp"

#include <cmath>
#include <utility>

#include "brs/error.hpp"

namespace brs {

Rational det_q(Matrix<Rational> a) {
  const size_t n = a.size();
  Rational det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

Matrix<Rational> inverse_q(Matrix<Rational> a) {
  const size_t n = a.size();
  Matrix<Rational> inv(n, std::vector<Rational>(n));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw Error(Errc::degenerate, "singular rational matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rational piv = a[c][c];
    for (size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

Integer det_z(const Matrix<Integer>& a) {
  Matrix<Rational> q(a.size(), std::vector<Rational>(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j) q[i][j] = a[i][j];
  Rational d = det_q(std::move(q));
  return d.get_num();
}

namespace {

template <class T, class Abs>
T det_generic(Matrix<T> a, T one, Abs absf) {
  const size_t n = a.size();
  T det = one;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    for (size_t i = c + 1; i < n; ++i)
      if (absf(a[i][c]) > absf(a[p][c])) p = i;
    if (absf(a[p][c]) == 0) return one - one;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      T f = a[i][c] / a[c][c];
      for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

template <class T, class Abs>
Matrix<T> inverse_generic(Matrix<T> a, T one, Abs absf) {
  const size_t n = a.size();
  Matrix<T> inv(n, std::vector<T>(n, one - one));
  for (size_t i = 0; i < n; ++i) inv[i][i] = one;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    for (size_t i = c + 1; i < n; ++i)
      if (absf(a[i][c]) > absf(a[p][c])) p = i;
    if (absf(a[p][c]) == 0) throw Error(Errc::degenerate, "singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    T piv = a[c][c];
    for (size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      T f = a[i][c];
      for (size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace

Real det_real(Matrix<Real> a) {
  return det_generic<Real>(std::move(a), make_real(1.0), [](const Real& x) { return Real(abs(x)); });
}

Matrix<Real> inverse_real(Matrix<Real> a) {
  return inverse_generic<Real>(std::move(a), make_real(1.0),
                               [](const Real& x) { return Real(abs(x)); });
}

Matrix<double> inverse_double(Matrix<double> a) {
  return inverse_generic<double>(std::move(a), 1.0, [](double x) { return std::fabs(x); });
}

double det_double(Matrix<double> a) {
  return det_generic<double>(std::move(a), 1.0, [](double x) { return std::fabs(x); });
}

Matrix<Integer> complete_to_unimodular(const std::vector<Integer>& m) {
  const size_t d = m.size();
  if (d == 0) throw Error(Errc::dimension_mismatch, "empty vector");
  // Row-reduce x = m to (0, ..., 0, +-1) with unimodular U, then M = U^{-1}.
  std::vector<Integer> x = m;
  Matrix<Integer> u(d, std::vector<Integer>(d, 0));
  for (size_t i = 0; i < d; ++i) u[i][i] = 1;
  const size_t last = d - 1;
  auto row_sub = [&](size_t dst, size_t src, const Integer& q) {
    x[dst] -= q * x[src];
    for (size_t j = 0; j < d; ++j) u[dst][j] -= q * u[src][j];
  };
  for (size_t i = 0; i + 1 < d; ++i) {
    while (x[i] != 0) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), x[last].get_mpz_t(), x[i].get_mpz_t());
      row_sub(last, i, q);
      std::swap(x[i], x[last]);
      std::swap(u[i], u[last]);
    }
  }
  if (x[last] != 1 && x[last] != -1)
    throw Error(Errc::degenerate, "vector is not primitive");
  if (x[last] == -1) {
    x[last] = 1;
    for (size_t j = 0; j < d; ++j) u[last][j] = -u[last][j];
  }
  Matrix<Rational> uq(d, std::vector<Rational>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) uq[i][j] = u[i][j];
  Matrix<Rational> inv = inverse_q(uq);
  Matrix<Integer> out(d, std::vector<Integer>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      if (!is_integer(inv[i][j])) throw Error(Errc::internal_consistency, "non-integral inverse");
      out[i][j] = inv[i][j].get_num();
    }
  if (det_z(out) < 0) {
    if (d == 1) throw Error(Errc::degenerate, "cannot complete -1 in dimension 1");
    for (size_t i = 0; i < d; ++i) out[i][0] = -out[i][0];
  }
  return out;
}

}  // namespace brs
