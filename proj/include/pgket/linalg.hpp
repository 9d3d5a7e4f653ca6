// Copyright 2026 The PGKET Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGKET_LINALG_HPP_
#define PGKET_LINALG_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/tensor.hpp"

namespace pgket {

inline RealTensor matmul(const RealTensor& a, const RealTensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ShapeError("matmul: operands must be 2-D");
  }
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree");
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  RealTensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += av * b(p, j);
      }
    }
  }
  return out;
}

inline ComplexMatrix cmatmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("cmatmul: inner dimensions disagree");
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  ComplexMatrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const std::complex<double> av = a(i, p);
      if (av == std::complex<double>(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += av * b(p, j);
      }
    }
  }
  return out;
}

inline RealTensor transpose(const RealTensor& a) {
  if (a.rank() != 2) throw ShapeError("transpose: operand must be 2-D");
  RealTensor out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

/// max |(U†U - I)| entry; 0 for an exactly unitary matrix.
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const std::size_t n = u.rows();
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::complex<double> s(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k) s += std::conj(u(k, i)) * u(k, j);
      if (i == j) s -= 1.0;
      defect = std::max(defect, std::abs(s));
    }
  }
  return defect;
}

inline double max_abs_diff(const RealTensor& a, const RealTensor& b) {
  if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shapes disagree");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

struct EighResult {
  RealTensor eigenvalues;   // ascending, length n
  RealTensor eigenvectors;  // n x n, column j pairs with eigenvalue j
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps run until the largest off-diagonal magnitude drops below 1e-12.
/// The sizes this library needs (<= 784 for pixel-space PCA) converge in a
/// handful of sweeps.
inline EighResult eigh_symmetric(const RealTensor& m,
                                 double symmetry_tol = 1e-10) {
  if (m.rank() != 2 || m.rows() != m.cols()) {
    throw ShapeError("eigh_symmetric: operand must be square");
  }
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > symmetry_tol) {
        throw ValidationError("eigh_symmetric: input is not symmetric");
      }
    }
  }

  RealTensor a = m;
  // Work on the symmetrized copy so rotations stay consistent.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  RealTensor v = RealTensor::identity(n);

  constexpr double kOffDiagTol = 1e-12;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        off = std::max(off, std::abs(a(p, q)));
      }
    }
    if (off < kOffDiagTol) break;
    if (sweep == kMaxSweeps - 1) {
      throw InternalError("eigh_symmetric: Jacobi sweep limit reached");
    }

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < kOffDiagTol) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        // Stable tangent of the rotation angle.
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x) < a(y, y);
  });

  EighResult out{RealTensor({n}), RealTensor({n, n})};
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues(j) = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) {
      out.eigenvectors(i, j) = v(i, order[j]);
    }
  }
  return out;
}

/// Row-wise softmax with per-row max subtraction. Entries at or below the
/// mask sentinel (-1e30) come out exactly zero unless the whole row is masked.
inline RealTensor softmax_rows(const RealTensor& m) {
  if (m.rank() != 2) throw ShapeError("softmax_rows: operand must be 2-D");
  RealTensor out({m.rows(), m.cols()});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.cols(); ++j) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double e = std::exp(m(i, j) - mx);
      out(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) /= sum;
  }
  return out;
}

/// Matrix exponential by scaling-and-squaring over a Taylor series.
/// The series stops once appending the next term changes no entry by more
/// than 1e-14.
inline ComplexMatrix cmatexp(const ComplexMatrix& g) {
  if (g.rows() != g.cols()) throw ShapeError("cmatexp: operand must be square");
  const std::size_t n = g.rows();

  double max_row_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(g(i, j));
    max_row_sum = std::max(max_row_sum, row);
  }
  int squarings = 0;
  while (max_row_sum > 0.5 && squarings < 64) {
    max_row_sum *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);

  ComplexMatrix scaled(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) = g(i, j) * scale;
  }

  ComplexMatrix result = ComplexMatrix::identity(n);
  ComplexMatrix term = ComplexMatrix::identity(n);
  constexpr double kTermTol = 1e-14;
  constexpr int kMaxTerms = 64;
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = cmatmul(term, scaled);
    double max_entry = 0.0;
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < term.size(); ++i) {
      term.data()[i] *= inv_k;
      max_entry = std::max(max_entry, std::abs(term.data()[i]));
    }
    for (std::size_t i = 0; i < term.size(); ++i) {
      result.data()[i] += term.data()[i];
    }
    if (max_entry <= kTermTol) break;
  }

  for (int s = 0; s < squarings; ++s) result = cmatmul(result, result);
  return result;
}

}  // namespace pgket

#endif  // PGKET_LINALG_HPP_
