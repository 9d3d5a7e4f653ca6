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

#include <cmath>
#include <complex>
#include <vector>

#include "gtest/gtest.h"
#include "pgket/linalg.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

namespace pgket {
namespace {

RealTensor random_matrix(std::size_t r, std::size_t c, SeededRng& rng) {
  RealTensor m({r, c});
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-1.0, 1.0);
  return m;
}

// Independent oracle: the entry-wise sum definition, written as a bare
// triple loop.
RealTensor matmul_oracle(const RealTensor& a, const RealTensor& b) {
  RealTensor out({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

TEST(Matmul, IdentityPassesThrough) {
  SeededRng rng(1);
  const RealTensor m = random_matrix(3, 3, rng);
  EXPECT_EQ(max_abs_diff(matmul(RealTensor::identity(3), m), m), 0.0);
}

TEST(Matmul, HandArithmetic) {
  const RealTensor a({2, 2}, {1, 2, 3, 4});
  const RealTensor b({2, 1}, {0, 1});
  const RealTensor p = matmul(a, b);
  EXPECT_EQ(p(0, 0), 2.0);
  EXPECT_EQ(p(1, 0), 4.0);
}

TEST(Matmul, MatchesTripleLoopOracle) {
  SeededRng rng(2);
  const RealTensor a = random_matrix(3, 4, rng);
  const RealTensor b = random_matrix(4, 2, rng);
  EXPECT_LE(max_abs_diff(matmul(a, b), matmul_oracle(a, b)), 1e-15);
}

TEST(Matmul, AssociativeOnRandomTriples) {
  SeededRng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const RealTensor a = random_matrix(4, 3, rng);
    const RealTensor b = random_matrix(3, 5, rng);
    const RealTensor c = random_matrix(5, 2, rng);
    const RealTensor left = matmul(matmul(a, b), c);
    const RealTensor right = matmul(a, matmul(b, c));
    double scale = 0.0;
    for (std::size_t i = 0; i < left.size(); ++i) {
      scale = std::max(scale, std::abs(left[i]));
    }
    EXPECT_LE(max_abs_diff(left, right), 1e-9 * std::max(1.0, scale));
  }
}

TEST(Matmul, ShapeMismatchThrows) {
  SeededRng rng(4);
  const RealTensor a = random_matrix(2, 3, rng);
  const RealTensor b = random_matrix(2, 3, rng);
  EXPECT_THROW(matmul(a, b), ShapeError);
}

TEST(Cmatmul, IdentityAndInvolution) {
  ComplexMatrix x(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  const ComplexMatrix xx = cmatmul(x, x);
  EXPECT_NEAR(std::abs(xx(0, 0) - 1.0), 0.0, 0.0);
  EXPECT_NEAR(std::abs(xx(1, 1) - 1.0), 0.0, 0.0);
  EXPECT_EQ(std::abs(xx(0, 1)), 0.0);

  const ComplexMatrix m = cmatmul(ComplexMatrix::identity(2), x);
  EXPECT_EQ(m(0, 1), std::complex<double>(1.0, 0.0));
}

TEST(Cmatmul, RandomUnitaryTimesDaggerIsIdentity) {
  // U = exp(G) with G anti-Hermitian is unitary; the conjugate-transpose
  // oracle checks U U† = I.
  SeededRng rng(5);
  const std::size_t n = 5;
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::complex<double> v(rng.uniform(-.5, .5), rng.uniform(-.5, .5));
      g(i, j) = v;
      g(j, i) = -std::conj(v);
    }
    g(i, i) = std::complex<double>(0.0, g(i, i).imag());
  }
  const ComplexMatrix u = cmatexp(g);
  const ComplexMatrix prod = cmatmul(u, dagger(u));
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::complex<double> want = i == j ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(prod(i, j) - want));
    }
  }
  EXPECT_LT(defect, 1e-12);
}

TEST(Eigh, DiagonalIsSortedWithAxisVectors) {
  const RealTensor m({3, 3}, {3, 0, 0, 0, 1, 0, 0, 0, 2});
  const EighResult r = eigh_symmetric(m);
  EXPECT_NEAR(r.eigenvalues(0), 1.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues(1), 2.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues(2), 3.0, 1e-12);
  // Column 0 pairs with eigenvalue 1 -> axis e1.
  EXPECT_NEAR(std::abs(r.eigenvectors(1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.eigenvectors(2, 1)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.eigenvectors(0, 2)), 1.0, 1e-12);
}

TEST(Eigh, HandCharacteristicPolynomial2x2) {
  // det([[2-l, 1], [1, 2-l]]) = (2-l)^2 - 1 = 0  =>  l = 1, 3.
  const RealTensor m({2, 2}, {2, 1, 1, 2});
  const EighResult r = eigh_symmetric(m);
  EXPECT_NEAR(r.eigenvalues(0), 1.0, 1e-12);
  EXPECT_NEAR(r.eigenvalues(1), 3.0, 1e-12);
}

TEST(Eigh, RandomSymmetricReconstructs) {
  SeededRng rng(6);
  const std::size_t n = 8;
  RealTensor m({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      m(i, j) = rng.uniform(-1.0, 1.0);
      m(j, i) = m(i, j);
    }
  }
  const EighResult r = eigh_symmetric(m);

  // Reconstruction oracle: V diag(l) V^T.
  RealTensor recon({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += r.eigenvectors(i, k) * r.eigenvalues(k) * r.eigenvectors(j, k);
      }
      recon(i, j) = acc;
    }
  }
  EXPECT_LT(max_abs_diff(recon, m), 1e-8);

  const RealTensor vtv = matmul(transpose(r.eigenvectors), r.eigenvectors);
  EXPECT_LT(max_abs_diff(vtv, RealTensor::identity(n)), 1e-8);
}

TEST(Eigh, NonSymmetricInputThrows) {
  const RealTensor m({2, 2}, {1, 2, 0, 1});
  EXPECT_THROW(eigh_symmetric(m), ValidationError);
}

TEST(SoftmaxRows, EqualValuesGiveUniform) {
  const RealTensor m({1, 4}, {2.5, 2.5, 2.5, 2.5});
  const RealTensor s = softmax_rows(m);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(s(0, j), 0.25, 1e-15);
}

TEST(SoftmaxRows, ClosedFormLog3) {
  // e^0 / (e^0 + 3) = 1/4.
  const RealTensor m({1, 2}, {0.0, std::log(3.0)});
  const RealTensor s = softmax_rows(m);
  EXPECT_NEAR(s(0, 0), 0.25, 1e-14);
  EXPECT_NEAR(s(0, 1), 0.75, 1e-14);
}

TEST(SoftmaxRows, MaskSentinelZeroesPosition) {
  const RealTensor m({1, 3}, {1.0, -1e30, 2.0});
  const RealTensor s = softmax_rows(m);
  EXPECT_EQ(s(0, 1), 0.0);
  EXPECT_NEAR(s(0, 0) + s(0, 2), 1.0, 1e-14);
}

TEST(SoftmaxRows, InvariantUnderRowConstant) {
  SeededRng rng(7);
  RealTensor m({3, 5});
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-2.0, 2.0);
  RealTensor shifted = m;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 5; ++j) shifted(i, j) += 0.75;
  }
  EXPECT_LE(max_abs_diff(softmax_rows(m), softmax_rows(shifted)), 1e-12);
}

TEST(SeededRng, EqualSeedsEqualStreams) {
  SeededRng a(42), b(42);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
}

TEST(SeededRng, SplitIgnoresConsumption) {
  SeededRng fresh(9);
  SeededRng consumed(9);
  for (int i = 0; i < 100; ++i) consumed.uniform();
  SeededRng s1 = fresh.split("stage");
  SeededRng s2 = consumed.split("stage");
  for (int i = 0; i < 100; ++i) ASSERT_EQ(s1.next_u64(), s2.next_u64());
}

TEST(SeededRng, DistinctLabelsDistinctStreams) {
  SeededRng root(10);
  SeededRng a = root.split("alpha");
  SeededRng b = root.split("beta");
  int agree = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++agree;
  }
  EXPECT_EQ(agree, 0);
}

TEST(SeededRng, NumericSplitPairsDiffer) {
  SeededRng root(11);
  SeededRng a = root.split(1, 2);
  SeededRng b = root.split(2, 1);
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(SeededRng, UniformRangeAndNormalMoments) {
  SeededRng rng(12);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Cmatexp, ZeroAndNilpotent) {
  const ComplexMatrix z(3, 3);
  const ComplexMatrix ez = cmatexp(z);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(ez(i, i), std::complex<double>(1.0, 0.0));
  }
  // exp([[0,1],[0,0]]) = [[1,1],[0,1]].
  ComplexMatrix n(2, 2);
  n(0, 1) = 1.0;
  const ComplexMatrix en = cmatexp(n);
  EXPECT_NEAR(std::abs(en(0, 1) - 1.0), 0.0, 1e-15);
  EXPECT_EQ(std::abs(en(1, 0)), 0.0);
}

TEST(Cmatexp, MatchesScalarExponential) {
  ComplexMatrix d(2, 2);
  d(0, 0) = std::complex<double>(0.3, -0.2);
  d(1, 1) = std::complex<double>(-1.1, 0.8);
  const ComplexMatrix e = cmatexp(d);
  EXPECT_LT(std::abs(e(0, 0) - std::exp(d(0, 0))), 1e-14);
  EXPECT_LT(std::abs(e(1, 1) - std::exp(d(1, 1))), 1e-14);
}

}  // namespace
}  // namespace pgket
