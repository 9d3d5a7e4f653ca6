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

#ifndef PGKET_COHERENT_HPP_
#define PGKET_COHERENT_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/linalg.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Exact, efficient simulation of the circuit class this library cares about:
// displacements and beamsplitter meshes acting on vacuum. Such circuits map
// coherent states to coherent states, so a d-mode state is just d complex
// amplitudes. Global phase is NOT tracked; every measurement consumed
// downstream is phase-insensitive.

namespace pgket::coherent {

using Complex = std::complex<double>;

/// Product coherent state: mode k in |alpha_k>.
struct CoherentState {
  std::vector<Complex> alphas;

  std::size_t num_modes() const { return alphas.size(); }
};

inline CoherentState coherent_vacuum(std::size_t num_modes) {
  if (num_modes < 1) {
    throw ValidationError("coherent_vacuum: need num_modes >= 1");
  }
  return CoherentState{std::vector<Complex>(num_modes, Complex(0.0, 0.0))};
}

/// D(alpha) on one mode: alpha_k += alpha, global phase dropped.
inline CoherentState displace(const CoherentState& state, std::size_t mode,
                              Complex alpha) {
  if (mode >= state.num_modes()) {
    throw ValidationError("displace: mode index out of range");
  }
  CoherentState out = state;
  out.alphas[mode] += alpha;
  return out;
}

/// Single-excitation action of BS(theta, phi):
///   [[cos t, -e^{-i p} sin t], [e^{i p} sin t, cos t]].
/// The convention is pinned by test against the Fock backend's single-photon
/// block, not assumed.
inline ComplexMatrix mesh_matrix(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw ValidationError("mesh_matrix: angles must be finite");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ComplexMatrix r(2, 2);
  r(0, 0) = c;
  r(0, 1) = -std::polar(1.0, -phi) * s;
  r(1, 0) = std::polar(1.0, phi) * s;
  r(1, 1) = c;
  return r;
}

/// Heisenberg action of a passive d x d unitary: alphas <- U alphas.
inline CoherentState apply_mesh(const CoherentState& state,
                                const ComplexMatrix& u,
                                double unitarity_tol = 1e-10) {
  const std::size_t d = state.num_modes();
  if (u.rows() != d || u.cols() != d) {
    throw ShapeError("apply_mesh: unitary extent must match mode count");
  }
  if (unitarity_defect(u) > unitarity_tol) {
    throw ValidationError("apply_mesh: matrix is not unitary");
  }
  CoherentState out;
  out.alphas.assign(d, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < d; ++j) acc += u(i, j) * state.alphas[j];
    out.alphas[i] = acc;
  }
  return out;
}

/// P(all modes in `modes` read zero photons) = exp(-sum |alpha_k|^2).
inline double vacuum_probability(const CoherentState& state,
                                 const std::vector<std::size_t>& modes) {
  if (modes.empty()) {
    throw ValidationError("vacuum_probability: mode subset must be non-empty");
  }
  double occupancy = 0.0;
  for (std::size_t mode : modes) {
    if (mode >= state.num_modes()) {
      throw ValidationError("vacuum_probability: mode index out of range");
    }
    occupancy += std::norm(state.alphas[mode]);
  }
  return std::exp(-occupancy);
}

inline double vacuum_probability(const CoherentState& state) {
  std::vector<std::size_t> all(state.num_modes());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return vacuum_probability(state, all);
}

/// <n_k> = |alpha_k|^2.
inline double mean_photon(const CoherentState& state, std::size_t mode) {
  if (mode >= state.num_modes()) {
    throw ValidationError("mean_photon: mode index out of range");
  }
  return std::norm(state.alphas[mode]);
}

/// Photon counts per mode, sampled independently Poisson(|alpha_k|^2) per
/// shot (exact for product coherent states).
inline std::vector<std::vector<std::size_t>> sample_counts(
    const CoherentState& state, SeededRng& rng, std::size_t shots) {
  const std::size_t d = state.num_modes();
  std::vector<double> means(d);
  for (std::size_t k = 0; k < d; ++k) means[k] = std::norm(state.alphas[k]);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    std::vector<std::size_t> counts(d);
    for (std::size_t k = 0; k < d; ++k) {
      counts[k] = static_cast<std::size_t>(rng.poisson(means[k]));
    }
    out.push_back(std::move(counts));
  }
  return out;
}

}  // namespace pgket::coherent

#endif  // PGKET_COHERENT_HPP_
