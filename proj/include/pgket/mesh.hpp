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

#ifndef PGKET_MESH_HPP_
#define PGKET_MESH_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pgket/coherent.hpp"
#include "pgket/errors.hpp"
#include "pgket/linalg.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

namespace pgket::kernel {

/// Trainable beamsplitter mesh over d modes in the alternating rectangular
/// arrangement: even layers couple pairs (0,1),(2,3),... and odd layers
/// couple (1,2),(3,4),... Each slot carries one (theta, phi) pair. Pairs
/// within a layer are disjoint by construction.
struct MeshParams {
  std::size_t num_modes = 0;
  std::vector<std::vector<double>> theta;  // [layer][slot]
  std::vector<std::vector<double>> phi;    // same extents as theta

  static std::size_t slots_in_layer(std::size_t num_modes,
                                    std::size_t layer) {
    return (layer % 2 == 0) ? num_modes / 2 : (num_modes - 1) / 2;
  }

  /// Lower mode of the pair at (layer, slot); the pair is (lo, lo+1).
  static std::size_t pair_low_mode(std::size_t layer, std::size_t slot) {
    return (layer % 2 == 0) ? 2 * slot : 2 * slot + 1;
  }

  static MeshParams identity(std::size_t num_modes, std::size_t depth) {
    MeshParams mesh;
    mesh.num_modes = num_modes;
    mesh.theta.resize(depth);
    mesh.phi.resize(depth);
    for (std::size_t layer = 0; layer < depth; ++layer) {
      mesh.theta[layer].assign(slots_in_layer(num_modes, layer), 0.0);
      mesh.phi[layer].assign(slots_in_layer(num_modes, layer), 0.0);
    }
    return mesh;
  }

  /// Near-identity initialization: all angles uniform in [-scale, scale],
  /// so the induced kernel starts close to isotropic.
  static MeshParams random_init(std::size_t num_modes, std::size_t depth,
                                SeededRng& rng, double scale = 0.1) {
    MeshParams mesh = identity(num_modes, depth);
    for (std::size_t layer = 0; layer < depth; ++layer) {
      for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
        mesh.theta[layer][slot] = rng.uniform(-scale, scale);
        mesh.phi[layer][slot] = rng.uniform(-scale, scale);
      }
    }
    return mesh;
  }

  std::size_t depth() const { return theta.size(); }

  std::size_t slot_count() const {
    std::size_t n = 0;
    for (const auto& layer : theta) n += layer.size();
    return n;
  }

  /// Angle count (theta and phi each contribute slot_count()).
  std::size_t parameter_count() const { return 2 * slot_count(); }

  void validate() const {
    if (num_modes < 1) throw ValidationError("MeshParams: num_modes >= 1");
    if (phi.size() != theta.size()) {
      throw ValidationError("MeshParams: theta/phi layer counts disagree");
    }
    for (std::size_t layer = 0; layer < theta.size(); ++layer) {
      const std::size_t slots = slots_in_layer(num_modes, layer);
      if (theta[layer].size() != slots || phi[layer].size() != slots) {
        throw ValidationError("MeshParams: slot count does not match layout");
      }
      for (std::size_t s = 0; s < slots; ++s) {
        if (!std::isfinite(theta[layer][s]) || !std::isfinite(phi[layer][s])) {
          throw ValidationError("MeshParams: angles must be finite");
        }
      }
    }
  }

  /// Angles flattened layer-major, slot ascending.
  std::vector<double> flat_theta() const { return flatten(theta); }
  std::vector<double> flat_phi() const { return flatten(phi); }

  void set_flat_theta(const std::vector<double>& values) {
    unflatten(values, theta);
  }
  void set_flat_phi(const std::vector<double>& values) {
    unflatten(values, phi);
  }

  /// Checkpoint view: one row (layer, pair, theta, phi) per slot, in
  /// layer-major order.
  RealTensor to_records() const {
    const std::size_t n = slot_count();
    RealTensor records({n, 4});
    std::size_t r = 0;
    for (std::size_t layer = 0; layer < theta.size(); ++layer) {
      for (std::size_t slot = 0; slot < theta[layer].size(); ++slot, ++r) {
        records(r, 0) = static_cast<double>(layer);
        records(r, 1) = static_cast<double>(slot);
        records(r, 2) = theta[layer][slot];
        records(r, 3) = phi[layer][slot];
      }
    }
    return records;
  }

  static MeshParams from_records(std::size_t num_modes, std::size_t depth,
                                 const RealTensor& records) {
    MeshParams mesh = identity(num_modes, depth);
    if (records.rank() != 2 || records.cols() != 4 ||
        records.rows() != mesh.slot_count()) {
      throw ValidationError("MeshParams: record table extents do not match");
    }
    std::size_t r = 0;
    for (std::size_t layer = 0; layer < depth; ++layer) {
      for (std::size_t slot = 0; slot < mesh.theta[layer].size();
           ++slot, ++r) {
        if (records(r, 0) != static_cast<double>(layer) ||
            records(r, 1) != static_cast<double>(slot)) {
          throw ValidationError(
              "MeshParams: record (layer, pair) does not match the "
              "alternating layout");
        }
        mesh.theta[layer][slot] = records(r, 2);
        mesh.phi[layer][slot] = records(r, 3);
      }
    }
    mesh.validate();
    return mesh;
  }

 private:
  static std::vector<double> flatten(
      const std::vector<std::vector<double>>& layers) {
    std::vector<double> out;
    for (const auto& layer : layers) {
      out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
  }

  static void unflatten(const std::vector<double>& values,
                        std::vector<std::vector<double>>& layers) {
    std::size_t expected = 0;
    for (const auto& layer : layers) expected += layer.size();
    if (values.size() != expected) {
      throw ShapeError("MeshParams: flat angle count does not match layout");
    }
    std::size_t i = 0;
    for (auto& layer : layers) {
      for (double& v : layer) v = values[i++];
    }
  }
};

namespace detail {

/// Left-multiply `u` (d x d, or |rows| x d) by the single-layer unitary,
/// i.e. rotate row pairs in place.
inline void apply_layer_to_rows(const MeshParams& mesh, std::size_t layer,
                                ComplexMatrix& u) {
  const std::size_t d = mesh.num_modes;
  for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
    const std::size_t a = MeshParams::pair_low_mode(layer, slot);
    const std::size_t b = a + 1;
    const ComplexMatrix r =
        coherent::mesh_matrix(mesh.theta[layer][slot], mesh.phi[layer][slot]);
    for (std::size_t c = 0; c < d; ++c) {
      const std::complex<double> ua = u(a, c);
      const std::complex<double> ub = u(b, c);
      u(a, c) = r(0, 0) * ua + r(0, 1) * ub;
      u(b, c) = r(1, 0) * ua + r(1, 1) * ub;
    }
  }
}

}  // namespace detail

/// d x d unitary induced by the mesh; the first layer acts first, so
/// U = E_L ... E_2 E_1.
inline ComplexMatrix mesh_unitary(const MeshParams& mesh) {
  mesh.validate();
  ComplexMatrix u = ComplexMatrix::identity(mesh.num_modes);
  for (std::size_t layer = 0; layer < mesh.depth(); ++layer) {
    detail::apply_layer_to_rows(mesh, layer, u);
  }
  return u;
}

/// Effective kernel covariance realized by vacuum detection on `detected`:
/// Gamma = Re(W† W) with W the detected rows of the mesh unitary.
/// Symmetric PSD with rank <= |detected|; equals I when every mode is
/// detected.
inline RealTensor gamma_of_mesh(const ComplexMatrix& u,
                                const std::vector<std::size_t>& detected) {
  if (detected.empty()) {
    throw ValidationError("gamma_of_mesh: detected subset must be non-empty");
  }
  const std::size_t d = u.rows();
  RealTensor gamma({d, d});
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t v = t; v < d; ++v) {
      double acc = 0.0;
      for (std::size_t k : detected) {
        if (k >= d) {
          throw ValidationError("gamma_of_mesh: detected mode out of range");
        }
        acc += (u(k, t) * std::conj(u(k, v))).real();
      }
      gamma(t, v) = acc;
      gamma(v, t) = acc;
    }
  }
  return gamma;
}

inline RealTensor gamma_of_mesh(const MeshParams& mesh,
                                const std::vector<std::size_t>& detected) {
  return gamma_of_mesh(mesh_unitary(mesh), detected);
}

}  // namespace pgket::kernel

#endif  // PGKET_MESH_HPP_
