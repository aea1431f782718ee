#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "advtrain/tensor.hpp"

namespace advtrain {

struct SymEigen {
  std::vector<double> values;  // descending
  Tensor vectors;              // [n x n], column j pairs with values[j]
};

namespace detail {

inline double off_diagonal_frobenius(const Tensor& a) {
  const std::size_t n = a.dim(0);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

// Cyclic Jacobi rotations for a symmetric matrix. Converges when the
// off-diagonal Frobenius norm drops below tol (scaled by the matrix norm so
// large-magnitude inputs terminate too). Deterministic sweep order.
inline SymEigen jacobi_eigen(const Tensor& a, double tol = 1e-12,
                             int max_sweeps = 64) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1))
    throw DimensionError("jacobi_eigen: expected square matrix, got " +
                         shape_str(a.shape()));
  const std::size_t n = a.dim(0);
  Tensor m = a;
  Tensor v = Tensor::identity(n);

  double norm = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) norm += m[i] * m[i];
  const double threshold = tol * std::max(1.0, std::sqrt(norm));

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::off_diagonal_frobenius(m) < threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double app = m(p, p), aqq = m(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = sign_of(theta) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double tt = theta == 0.0 ? 1.0 : t;
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double s = tt * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // Sort by descending eigenvalue; stable so ties stay deterministic.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return m(x, x) > m(y, y);
  });

  SymEigen out;
  out.values.resize(n);
  out.vectors = Tensor({n, n});
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = m(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
inline Tensor cholesky(const Tensor& a) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1))
    throw DimensionError("cholesky: expected square matrix");
  const std::size_t n = a.dim(0);
  Tensor l({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0)
          throw ContractError("cholesky: matrix not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Solves L X = B for X with L lower triangular. B: [n x m].
inline Tensor solve_lower(const Tensor& l, const Tensor& b) {
  const std::size_t n = l.dim(0), m = b.dim(1);
  Tensor x = b;
  for (std::size_t col = 0; col < m; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, col);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
      x(i, col) = s / l(i, i);
    }
  }
  return x;
}

// Solves L^T X = B for X with L lower triangular (back substitution).
inline Tensor solve_lower_transpose(const Tensor& l, const Tensor& b) {
  const std::size_t n = l.dim(0), m = b.dim(1);
  Tensor x = b;
  for (std::size_t col = 0; col < m; ++col) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, col);
      x(ii, col) = s / l(ii, ii);
    }
  }
  return x;
}

}  // namespace advtrain
