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
#include "pgket/fock.hpp"

namespace pgket::fock {
namespace {

using Complex = std::complex<double>;

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

// Closed form for D(z)|0>: amplitude at |b> is e^{-|z|^2/2} z^b / sqrt(b!).
Complex displaced_vacuum_amplitude(Complex z, std::size_t b) {
  return std::exp(-std::norm(z) / 2.0) * std::pow(z, static_cast<double>(b)) /
         std::sqrt(factorial(b));
}

FockState random_low_occupation_state(std::size_t modes, std::size_t cutoff,
                                      SeededRng& rng,
                                      std::size_t max_n = 3) {
  FockState st = FockState::vacuum(modes, cutoff);
  double norm2 = 0.0;
  for (std::size_t flat = 0; flat < st.dim(); ++flat) {
    bool low = true;
    for (std::size_t m = 0; m < modes; ++m) {
      if (st.occupation(flat, m) > max_n) low = false;
    }
    if (!low) {
      st.amplitudes()[flat] = 0.0;
      continue;
    }
    const Complex a(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    st.amplitudes()[flat] = a;
    norm2 += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : st.amplitudes()) a *= inv;
  return st;
}

TEST(FockState, VacuumLayouts) {
  const FockState a = vacuum_state(1, 3);
  ASSERT_EQ(a.dim(), 4u);
  EXPECT_EQ(a.amplitudes()[0], Complex(1.0, 0.0));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(a.amplitudes()[i], 0.0);

  const FockState b = vacuum_state(2, 1);
  ASSERT_EQ(b.dim(), 4u);
  EXPECT_EQ(b.amplitudes()[0], Complex(1.0, 0.0));

  EXPECT_EQ(vacuum_state(3, 5).squared_norm(), 1.0);
}

TEST(FockState, CapacityBudget) {
  EXPECT_THROW(vacuum_state(16, 18), CapacityError);
  EXPECT_THROW(vacuum_state(2, 10, /*max_amplitudes=*/100), CapacityError);
}

TEST(FockState, TupleIndexingModeZeroSlowest) {
  const FockState st = vacuum_state(2, 2);
  EXPECT_EQ(st.flatten({1, 2}), 1u * 3u + 2u);
  const auto counts = st.unflatten(5);
  EXPECT_EQ(counts[0], 1u);
  EXPECT_EQ(counts[1], 2u);
}

TEST(LadderOps, AdjointPairAndNumberOperator) {
  const LadderOps ops = LadderOps::make(6);
  for (std::size_t i = 0; i <= 6; ++i) {
    for (std::size_t j = 0; j <= 6; ++j) {
      EXPECT_EQ(ops.annihilate(i, j), ops.create(j, i));
    }
  }
  const ComplexMatrix n = cmatmul(ops.create, ops.annihilate);
  for (std::size_t i = 0; i <= 6; ++i) {
    EXPECT_NEAR(n(i, i).real(), static_cast<double>(i), 1e-12);
  }
}

TEST(Displacement, ZeroAlphaIsIdentity) {
  const ComplexMatrix d = displacement_matrix(0.0, 8);
  EXPECT_EQ(unitarity_defect(d), 0.0);
  for (std::size_t i = 0; i <= 8; ++i) {
    EXPECT_EQ(d(i, i), Complex(1.0, 0.0));
  }
}

TEST(Displacement, GroundStateOverlap) {
  const ComplexMatrix d = displacement_matrix(1.0, 20);
  EXPECT_NEAR(d(0, 0).real(), std::exp(-0.5), 1e-9);
  EXPECT_NEAR(d(0, 0).imag(), 0.0, 1e-12);
}

TEST(Displacement, InversePair) {
  const ComplexMatrix d = displacement_matrix(Complex(0.7, -0.4), 16);
  const ComplexMatrix dinv = displacement_matrix(Complex(-0.7, 0.4), 16);
  const ComplexMatrix prod = cmatmul(d, dinv);
  double defect = 0.0;
  for (std::size_t i = 0; i <= 16; ++i) {
    for (std::size_t j = 0; j <= 16; ++j) {
      defect = std::max(defect,
                        std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  EXPECT_LT(defect, 1e-10);
}

TEST(Displacement, UnitaryAtAnyCutoff) {
  for (std::size_t cutoff : {3u, 9u, 20u}) {
    EXPECT_LT(unitarity_defect(displacement_matrix(Complex(1.2, 0.5), cutoff)),
              1e-10);
  }
}

TEST(Displacement, ColumnZeroMatchesClosedForm) {
  const std::size_t cutoff = 20;
  for (const Complex z : {Complex(1.0, 0.0), Complex(0.4, -1.1),
                          Complex(-1.5, 0.0), Complex(0.9, 0.9)}) {
    const ComplexMatrix d = displacement_matrix(z, cutoff);
    for (std::size_t b = 0; b <= cutoff / 2; ++b) {
      EXPECT_LT(std::abs(d(b, 0) - displaced_vacuum_amplitude(z, b)), 1e-8)
          << "z = " << z << ", b = " << b;
    }
  }
}

TEST(Displacement, CompositionLawRealArguments) {
  // D(a) D(b) = D(a+b) for real a, b (the phase factor is exp(0)).
  SeededRng rng(21);
  const std::size_t cutoff = 20;
  for (int trial = 0; trial < 4; ++trial) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    FockState st = random_low_occupation_state(1, cutoff, rng);
    const FockState via_two = apply_single_mode(
        displacement_matrix(b, cutoff), 0,
        apply_single_mode(displacement_matrix(a, cutoff), 0, st));
    const FockState via_one =
        apply_single_mode(displacement_matrix(a + b, cutoff), 0, st);
    double diff = 0.0;
    for (std::size_t i = 0; i < st.dim(); ++i) {
      diff = std::max(diff, std::abs(via_two.amplitudes()[i] -
                                     via_one.amplitudes()[i]));
    }
    EXPECT_LT(diff, 1e-8);
  }
}

TEST(Beamsplitter, ZeroAngleIsIdentity) {
  const ComplexMatrix bs = beamsplitter_matrix(0.0, 0.3, 4);
  for (std::size_t i = 0; i < bs.rows(); ++i) {
    EXPECT_EQ(bs(i, i), Complex(1.0, 0.0));
    for (std::size_t j = 0; j < bs.cols(); ++j) {
      if (i != j) EXPECT_EQ(bs(i, j), Complex(0.0, 0.0));
    }
  }
}

TEST(Beamsplitter, SinglePhotonSwapAtHalfPi) {
  // Closed form: the one-photon block of the generator is
  // theta [[0, -1], [1, 0]], so exp at theta = pi/2 maps
  // |1,0> -> |0,1> and |0,1> -> -|1,0>.
  const std::size_t cutoff = 6;
  const std::size_t m = cutoff + 1;
  const ComplexMatrix bs = beamsplitter_matrix(M_PI / 2.0, 0.0, cutoff);
  const std::size_t idx10 = 1 * m + 0;
  const std::size_t idx01 = 0 * m + 1;
  EXPECT_LT(std::abs(bs(idx01, idx10) - 1.0), 1e-12);
  EXPECT_LT(std::abs(bs(idx10, idx10)), 1e-12);
  EXPECT_LT(std::abs(bs(idx10, idx01) + 1.0), 1e-12);
  EXPECT_LT(std::abs(bs(idx01, idx01)), 1e-12);
}

TEST(Beamsplitter, UnitaryAndNumberConserving) {
  const std::size_t cutoff = 5;
  const ComplexMatrix bs = beamsplitter_matrix(0.77, -0.4, cutoff);
  EXPECT_LT(unitarity_defect(bs), 1e-10);
  // Block diagonality over total photon number.
  const std::size_t m = cutoff + 1;
  for (std::size_t r = 0; r < m * m; ++r) {
    for (std::size_t c = 0; c < m * m; ++c) {
      const std::size_t tr = r / m + r % m;
      const std::size_t tc = c / m + c % m;
      if (tr != tc) EXPECT_EQ(std::abs(bs(r, c)), 0.0);
    }
  }
}

TEST(Beamsplitter, TotalPhotonExpectationPreserved) {
  SeededRng rng(22);
  const std::size_t cutoff = 5;
  FockState st = random_low_occupation_state(2, cutoff, rng);
  const double before = mean_photon(st, 0) + mean_photon(st, 1);
  const FockState out = apply_two_mode(
      beamsplitter_matrix(0.9, 0.31, cutoff), 0, 1, st);
  const double after = mean_photon(out, 0) + mean_photon(out, 1);
  EXPECT_NEAR(before, after, 1e-10);
}

TEST(ApplySingleMode, IdentityAndErrors) {
  const FockState st = vacuum_state(2, 3);
  const FockState out =
      apply_single_mode(ComplexMatrix::identity(4), 1, st);
  for (std::size_t i = 0; i < st.dim(); ++i) {
    EXPECT_EQ(out.amplitudes()[i], st.amplitudes()[i]);
  }
  EXPECT_THROW(apply_single_mode(ComplexMatrix::identity(4), 2, st),
               ValidationError);
  EXPECT_THROW(apply_single_mode(ComplexMatrix::identity(3), 0, st),
               ShapeError);
}

TEST(ApplySingleMode, DisplacedVacuumAmplitudes) {
  const std::size_t cutoff = 20;
  const FockState st = apply_single_mode(displacement_matrix(1.0, cutoff), 0,
                                         vacuum_state(2, cutoff));
  for (std::size_t b = 0; b <= 10; ++b) {
    const Complex amp = st.amplitude({b, 0});
    EXPECT_LT(std::abs(amp - displaced_vacuum_amplitude(1.0, b)), 1e-9);
  }
}

TEST(ApplySingleMode, DisjointModesCommute) {
  SeededRng rng(23);
  const std::size_t cutoff = 6;
  FockState st = random_low_occupation_state(2, cutoff, rng);
  const ComplexMatrix d0 = displacement_matrix(Complex(0.4, 0.2), cutoff);
  const ComplexMatrix d1 = displacement_matrix(Complex(-0.3, 0.6), cutoff);
  const FockState ab =
      apply_single_mode(d1, 1, apply_single_mode(d0, 0, st));
  const FockState ba =
      apply_single_mode(d0, 0, apply_single_mode(d1, 1, st));
  double diff = 0.0;
  for (std::size_t i = 0; i < st.dim(); ++i) {
    diff = std::max(diff,
                    std::abs(ab.amplitudes()[i] - ba.amplitudes()[i]));
  }
  EXPECT_LT(diff, 1e-12);
}

TEST(ApplyTwoMode, IdentitySwapNormAndErrors) {
  SeededRng rng(24);
  const std::size_t cutoff = 4;
  FockState st = random_low_occupation_state(3, cutoff, rng);
  const std::size_t m = cutoff + 1;

  const FockState same =
      apply_two_mode(ComplexMatrix::identity(m * m), 0, 2, st);
  for (std::size_t i = 0; i < st.dim(); ++i) {
    EXPECT_EQ(same.amplitudes()[i], st.amplitudes()[i]);
  }

  // Single-photon transport: |1,0> -> |0,1> at theta = pi/2.
  FockState one = vacuum_state(2, cutoff);
  one.amplitudes()[0] = 0.0;
  one.amplitudes()[one.flatten({1, 0})] = 1.0;
  const FockState swapped = apply_two_mode(
      beamsplitter_matrix(M_PI / 2.0, 0.0, cutoff), 0, 1, one);
  EXPECT_LT(std::abs(swapped.amplitude({0, 1}) - 1.0), 1e-12);
  EXPECT_LT(std::abs(swapped.amplitude({1, 0})), 1e-12);

  const FockState rotated = apply_two_mode(
      beamsplitter_matrix(0.6, 0.2, cutoff), 1, 2, st);
  EXPECT_NEAR(rotated.squared_norm(), st.squared_norm(), 1e-12);

  EXPECT_THROW(apply_two_mode(ComplexMatrix::identity(m * m), 1, 1, st),
               ValidationError);
}

TEST(VacuumProbability, DisplacedVacuum) {
  EXPECT_EQ(vacuum_probability(vacuum_state(2, 4)), 1.0);

  const std::size_t cutoff = 20;
  const FockState st = apply_single_mode(displacement_matrix(1.0, cutoff), 0,
                                         vacuum_state(1, cutoff));
  EXPECT_NEAR(vacuum_probability(st), std::exp(-1.0), 1e-9);
}

TEST(VacuumProbability, InversePairRestoresVacuum) {
  const std::size_t cutoff = 18;
  const Complex alpha(0.8, 0.0);
  FockState st = vacuum_state(2, cutoff);
  const ComplexMatrix d = displacement_matrix(alpha, cutoff);
  st = apply_single_mode(d, 0, st);
  st = apply_single_mode(dagger(d), 0, st);
  EXPECT_NEAR(vacuum_probability(st), 1.0, 1e-10);
}

TEST(VacuumProbability, SubsetMarginal) {
  const std::size_t cutoff = 18;
  FockState st = vacuum_state(2, cutoff);
  st = apply_single_mode(displacement_matrix(1.0, cutoff), 0, st);
  st = apply_single_mode(displacement_matrix(2.0, cutoff), 1, st);
  EXPECT_NEAR(vacuum_probability(st, {1}), std::exp(-4.0), 1e-7);
  EXPECT_THROW(vacuum_probability(st, {}), ValidationError);
  EXPECT_THROW(vacuum_probability(st, {5}), ValidationError);
}

TEST(PhotonDistribution, VacuumPointMassAndNormalization) {
  const std::vector<double> p = photon_distribution(vacuum_state(2, 3));
  EXPECT_EQ(p[0], 1.0);
  double sum = 0.0;
  for (double v : p) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(PhotonDistribution, DisplacedVacuumIsPoisson) {
  const std::size_t cutoff = 20;
  const FockState st = apply_single_mode(displacement_matrix(1.0, cutoff), 0,
                                         vacuum_state(1, cutoff));
  const std::vector<double> p = photon_distribution(st);
  for (std::size_t n = 0; n <= 10; ++n) {
    const double poisson = std::exp(-1.0) / factorial(n);
    EXPECT_NEAR(p[n], poisson, 1e-8) << "n = " << n;
  }
}

TEST(SampleCounts, VacuumAlwaysZeroAndSeedReproducible) {
  const FockState st = vacuum_state(2, 3);
  SeededRng rng(31);
  for (const auto& counts : sample_counts(st, rng, 64)) {
    EXPECT_EQ(counts[0], 0u);
    EXPECT_EQ(counts[1], 0u);
  }

  const std::size_t cutoff = 16;
  const FockState displaced = apply_single_mode(
      displacement_matrix(0.9, cutoff), 0, vacuum_state(1, cutoff));
  SeededRng r1(77), r2(77);
  const auto s1 = sample_counts(displaced, r1, 500);
  const auto s2 = sample_counts(displaced, r2, 500);
  EXPECT_EQ(s1, s2);
}

TEST(SampleCounts, EmpiricalVacuumFrequency) {
  const std::size_t cutoff = 20;
  const FockState st = apply_single_mode(displacement_matrix(1.0, cutoff), 0,
                                         vacuum_state(1, cutoff));
  SeededRng rng(32);
  const std::size_t shots = 100000;
  const auto samples = sample_counts(st, rng, shots);
  std::size_t zeros = 0;
  for (const auto& counts : samples) {
    if (counts[0] == 0) ++zeros;
  }
  const double p = std::exp(-1.0);
  const double freq = static_cast<double>(zeros) / shots;
  const double sigma = std::sqrt(p * (1.0 - p) / shots);
  EXPECT_NEAR(freq, p, 4.0 * sigma);
}

}  // namespace
}  // namespace pgket::fock
