#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qnmtrace/errors.hpp"

namespace qnmtrace {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct TridiagonalEigen {
  Vector<Scalar> values;   ///< ascending
  Matrix<Scalar> vectors;  ///< orthonormal columns; empty unless requested
};

/// Symmetric tridiagonal eigensolver by implicit QL with shifts taken from the
/// leading 2x2 block. Throws ConvergenceError after 30·N sweeps.
template <class Scalar>
TridiagonalEigen<Scalar> tridiagonal_eigen(const Vector<Scalar>& diagonal, const Vector<Scalar>& offdiagonal,
                                           bool compute_vectors = true) {
  const Eigen::Index n = diagonal.size();
  if (n == 0 || offdiagonal.size() != n - 1) {
    throw DomainError("tridiagonal_eigen: offdiagonal must have one entry fewer than the diagonal");
  }
  Vector<Scalar> d = diagonal;
  Vector<Scalar> e = Vector<Scalar>::Zero(n);
  e.head(n - 1) = offdiagonal;
  Matrix<Scalar> V;
  if (compute_vectors) V = Matrix<Scalar>::Identity(n, n);

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const long max_sweeps = 30 * long(n);
  long sweeps = 0;
  Scalar shift_total = 0;
  Scalar tst1 = 0;
  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    Eigen::Index m = l;
    while (m < n && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      do {
        if (++sweeps > max_sweeps) throw ConvergenceError("tridiagonal_eigen: QL iteration did not converge");
        // Shift from the leading 2x2 block.
        Scalar g = d[l];
        Scalar p = (d[l + 1] - g) / (2 * e[l]);
        Scalar r = std::hypot(p, Scalar(1));
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const Scalar dl1 = d[l + 1];
        Scalar h = g - d[l];
        d.segment(l + 2, n - l - 2).array() -= h;
        shift_total += h;

        // Implicit QL sweep from m back to l.
        p = d[m];
        Scalar c = 1, c2 = 1, c3 = 1, s = 0, s2 = 0;
        const Scalar el1 = e[l + 1];
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (compute_vectors) {
            const Vector<Scalar> next = V.col(i + 1);
            V.col(i + 1) = s * V.col(i) + c * next;
            V.col(i) = c * V.col(i) - s * next;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_total;
    e[l] = 0;
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });
  TridiagonalEigen<Scalar> result;
  result.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) result.values[k] = d[order[k]];
  if (compute_vectors) {
    result.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) result.vectors.col(k) = V.col(order[k]);
  }
  return result;
}

}  // namespace qnmtrace
