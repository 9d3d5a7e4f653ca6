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
#include "pgket/coherent.hpp"
#include "pgket/fock.hpp"
#include "pgket/mesh.hpp"

namespace pgket::coherent {
namespace {

using Complex = std::complex<double>;

TEST(CoherentVacuum, AllZeroAmplitudes) {
  const CoherentState one = coherent_vacuum(1);
  ASSERT_EQ(one.num_modes(), 1u);
  EXPECT_EQ(one.alphas[0], Complex(0.0, 0.0));

  const CoherentState sixteen = coherent_vacuum(16);
  ASSERT_EQ(sixteen.num_modes(), 16u);
  for (const Complex& a : sixteen.alphas) EXPECT_EQ(a, Complex(0.0, 0.0));
  EXPECT_EQ(vacuum_probability(sixteen), 1.0);
}

TEST(Displace, AccumulatesAndCancels) {
  CoherentState st = coherent_vacuum(3);
  st = displace(st, 0, 0.3);
  EXPECT_EQ(st.alphas[0], Complex(0.3, 0.0));
  EXPECT_EQ(st.alphas[1], Complex(0.0, 0.0));

  st = displace(st, 0, -0.3);
  EXPECT_EQ(st.alphas[0], Complex(0.0, 0.0));

  st = displace(st, 2, Complex(1.0, 0.5));
  st = displace(st, 2, Complex(-1.0, -0.5));
  EXPECT_EQ(st.alphas[2], Complex(0.0, 0.0));

  EXPECT_THROW(displace(st, 3, 1.0), ValidationError);
}

TEST(MeshMatrix, IdentityAtZeroAngle) {
  const ComplexMatrix r = mesh_matrix(0.0, 0.9);
  EXPECT_EQ(r(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(std::abs(r(0, 1)), 0.0);
  EXPECT_EQ(std::abs(r(1, 0)), 0.0);
}

TEST(MeshMatrix, HalfPiMatchesFockSinglePhotonBlock) {
  // The 2x2 convention is pinned by the Fock backend: the single-photon
  // block of BS(theta, phi) must equal mesh_matrix(theta, phi).
  const ComplexMatrix r = mesh_matrix(M_PI / 2.0, 0.0);
  EXPECT_LT(std::abs(r(0, 0)), 1e-15);
  EXPECT_LT(std::abs(r(0, 1) + 1.0), 1e-15);
  EXPECT_LT(std::abs(r(1, 0) - 1.0), 1e-15);

  const std::size_t cutoff = 4;
  const std::size_t m = cutoff + 1;
  for (const auto& [theta, phi] : std::vector<std::pair<double, double>>{
           {0.3, 0.0}, {1.1, -0.7}, {M_PI / 2.0, 0.4}}) {
    const ComplexMatrix bs = fock::beamsplitter_matrix(theta, phi, cutoff);
    const ComplexMatrix blk = mesh_matrix(theta, phi);
    // Fock basis order within the one-photon sector: |1,0>, |0,1>.
    const std::size_t i10 = 1 * m + 0, i01 = 0 * m + 1;
    EXPECT_LT(std::abs(bs(i10, i10) - blk(0, 0)), 1e-12);
    EXPECT_LT(std::abs(bs(i10, i01) - blk(0, 1)), 1e-12);
    EXPECT_LT(std::abs(bs(i01, i10) - blk(1, 0)), 1e-12);
    EXPECT_LT(std::abs(bs(i01, i01) - blk(1, 1)), 1e-12);
  }
}

TEST(MeshMatrix, Unitary) {
  EXPECT_LT(unitarity_defect(mesh_matrix(0.77, 2.1)), 1e-14);
}

TEST(ApplyMesh, IdentityPermutationAndNorm) {
  SeededRng rng(41);
  CoherentState st = coherent_vacuum(3);
  for (std::size_t k = 0; k < 3; ++k) {
    st = displace(st, k, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  }

  const CoherentState same = apply_mesh(st, ComplexMatrix::identity(3));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(same.alphas[k], st.alphas[k]);

  ComplexMatrix perm(3, 3);
  perm(0, 1) = 1.0;
  perm(1, 2) = 1.0;
  perm(2, 0) = 1.0;
  const CoherentState swapped = apply_mesh(st, perm);
  EXPECT_EQ(swapped.alphas[0], st.alphas[1]);
  EXPECT_EQ(swapped.alphas[1], st.alphas[2]);
  EXPECT_EQ(swapped.alphas[2], st.alphas[0]);

  kernel::MeshParams mesh = kernel::MeshParams::random_init(3, 3, rng, 0.8);
  const CoherentState rotated = apply_mesh(st, kernel::mesh_unitary(mesh));
  double before = 0.0, after = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    before += std::norm(st.alphas[k]);
    after += std::norm(rotated.alphas[k]);
  }
  EXPECT_NEAR(before, after, 1e-12);

  ComplexMatrix bogus = ComplexMatrix::identity(3);
  bogus(0, 0) = 2.0;
  EXPECT_THROW(apply_mesh(st, bogus), ValidationError);
}

TEST(ApplyMesh, Composes) {
  SeededRng rng(42);
  CoherentState st = coherent_vacuum(4);
  for (std::size_t k = 0; k < 4; ++k) {
    st = displace(st, k, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  }
  const ComplexMatrix u =
      kernel::mesh_unitary(kernel::MeshParams::random_init(4, 2, rng, 0.6));
  const ComplexMatrix v =
      kernel::mesh_unitary(kernel::MeshParams::random_init(4, 3, rng, 0.6));
  const CoherentState sequential = apply_mesh(apply_mesh(st, u), v);
  const CoherentState fused = apply_mesh(st, cmatmul(v, u));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_LT(std::abs(sequential.alphas[k] - fused.alphas[k]), 1e-12);
  }
}

TEST(VacuumProbability, ClosedFormsAndFockCrossCheck) {
  CoherentState st = coherent_vacuum(2);
  st = displace(st, 0, 1.0);
  EXPECT_NEAR(vacuum_probability(st, {0, 1}), std::exp(-1.0), 1e-15);

  CoherentState st2 = coherent_vacuum(2);
  st2 = displace(st2, 0, 1.0);
  st2 = displace(st2, 1, 2.0);
  EXPECT_NEAR(vacuum_probability(st2, {1}), std::exp(-4.0), 1e-15);

  // Fock oracle at cutoff 25 for the per-mode product law.
  const std::size_t cutoff = 25;
  fock::FockState f = fock::vacuum_state(2, cutoff);
  f = fock::apply_single_mode(fock::displacement_matrix(1.0, cutoff), 0, f);
  f = fock::apply_single_mode(fock::displacement_matrix(2.0, cutoff), 1, f);
  EXPECT_NEAR(fock::vacuum_probability(f, {1}), vacuum_probability(st2, {1}),
              1e-8);

  EXPECT_THROW(vacuum_probability(st2, {}), ValidationError);
}

TEST(VacuumProbability, FullModeInvariantUnderMesh) {
  SeededRng rng(43);
  CoherentState st = coherent_vacuum(5);
  for (std::size_t k = 0; k < 5; ++k) {
    st = displace(st, k, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  }
  const double base = vacuum_probability(st);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix u =
        kernel::mesh_unitary(kernel::MeshParams::random_init(5, 4, rng, 0.9));
    EXPECT_NEAR(vacuum_probability(apply_mesh(st, u)), base, 1e-12);
  }
}

TEST(MeanPhoton, ClosedFormAndFockCrossCheck) {
  CoherentState st = coherent_vacuum(2);
  EXPECT_EQ(mean_photon(st, 0), 0.0);
  st = displace(st, 1, Complex(0.0, 2.0));
  EXPECT_NEAR(mean_photon(st, 1), 4.0, 1e-15);

  const std::size_t cutoff = 25;
  CoherentState c = coherent_vacuum(1);
  c = displace(c, 0, Complex(0.9, -0.3));
  fock::FockState f = fock::vacuum_state(1, cutoff);
  f = fock::apply_single_mode(
      fock::displacement_matrix(Complex(0.9, -0.3), cutoff), 0, f);
  EXPECT_NEAR(fock::mean_photon(f, 0), mean_photon(c, 0), 1e-8);

  EXPECT_THROW(mean_photon(st, 2), ValidationError);
}

TEST(SampleCounts, VacuumMeanAndReproducibility) {
  const CoherentState vac = coherent_vacuum(2);
  SeededRng rng(44);
  for (const auto& counts : sample_counts(vac, rng, 32)) {
    EXPECT_EQ(counts[0], 0u);
    EXPECT_EQ(counts[1], 0u);
  }

  CoherentState st = coherent_vacuum(2);
  st = displace(st, 0, 1.2);
  st = displace(st, 1, Complex(0.3, 0.8));
  SeededRng r1(99), r2(99);
  EXPECT_EQ(sample_counts(st, r1, 200), sample_counts(st, r2, 200));

  const std::size_t shots = 100000;
  SeededRng r3(100);
  const auto samples = sample_counts(st, r3, shots);
  for (std::size_t k = 0; k < 2; ++k) {
    const double mean = std::norm(st.alphas[k]);
    double acc = 0.0;
    for (const auto& counts : samples) acc += static_cast<double>(counts[k]);
    acc /= static_cast<double>(shots);
    const double sigma = std::sqrt(mean / shots);  // Poisson standard error
    EXPECT_NEAR(acc, mean, 4.0 * sigma);
  }
}

// Chi-square upper critical value at significance 1e-3 via the
// Wilson-Hilferty cube approximation.
double chi2_critical_1e3(double dof) {
  const double z = 3.090232306167813;  // Phi^{-1}(0.999)
  const double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  return dof * t * t * t;
}

TEST(SampleCounts, MarginalsMatchFockDistribution) {
  // Per-mode counts from the coherent sampler against the Fock-backend
  // photon distribution of the same displaced state.
  const double alpha = 1.1;
  const std::size_t cutoff = 25;
  fock::FockState f = fock::vacuum_state(1, cutoff);
  f = fock::apply_single_mode(fock::displacement_matrix(alpha, cutoff), 0, f);
  const std::vector<double> expected = fock::photon_distribution(f);

  CoherentState c = coherent_vacuum(1);
  c = displace(c, 0, alpha);
  SeededRng rng(45);
  const std::size_t shots = 100000;
  const auto samples = sample_counts(c, rng, shots);

  // Pool the tail so every bin keeps a healthy expected count.
  const std::size_t bins = 8;
  std::vector<double> observed(bins, 0.0);
  for (const auto& counts : samples) {
    observed[std::min(counts[0], bins - 1)] += 1.0;
  }
  std::vector<double> want(bins, 0.0);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    want[std::min(n, bins - 1)] += expected[n];
  }

  double chi2 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double e = want[b] * static_cast<double>(shots);
    chi2 += (observed[b] - e) * (observed[b] - e) / e;
  }
  EXPECT_LT(chi2, chi2_critical_1e3(static_cast<double>(bins - 1)));
}

TEST(OracleEquivalence, CoherentMatchesFockOnRandomCircuits) {
  // Module-level spot check of the core contract; the acceptance suite runs
  // the full 100-trial version.
  SeededRng root(46);
  for (std::size_t trial = 0; trial < 20; ++trial) {
    SeededRng rng = root.split(trial);
    const std::size_t d = 2 + rng.below(2);
    const std::size_t cutoff = 18;
    kernel::MeshParams mesh =
        kernel::MeshParams::random_init(d, 1 + rng.below(3), rng, 0.8);

    fock::FockState f = fock::vacuum_state(d, cutoff);
    CoherentState c = coherent_vacuum(d);
    for (std::size_t m = 0; m < d; ++m) {
      const double a = rng.uniform(-1.0, 1.0);
      f = fock::apply_single_mode(fock::displacement_matrix(a, cutoff), m, f);
      c = displace(c, m, a);
    }
    for (std::size_t layer = 0; layer < mesh.depth(); ++layer) {
      for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
        const std::size_t a = kernel::MeshParams::pair_low_mode(layer, slot);
        f = fock::apply_two_mode(
            fock::beamsplitter_matrix(mesh.theta[layer][slot],
                                      mesh.phi[layer][slot], cutoff),
            a, a + 1, f);
      }
    }
    c = apply_mesh(c, kernel::mesh_unitary(mesh));
    EXPECT_NEAR(fock::vacuum_probability(f), vacuum_probability(c), 1e-6);
  }
}

}  // namespace
}  // namespace pgket::coherent
