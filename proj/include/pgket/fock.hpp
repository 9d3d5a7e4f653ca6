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

#ifndef PGKET_FOCK_HPP_
#define PGKET_FOCK_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/linalg.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Truncated Fock-space simulator of qumodes. This is the exactness oracle:
// slow, explicit, and checked against closed forms, so the efficient
// coherent-state backend can be validated against it.
//
// Conventions fixed repo-wide:
//  - cutoff N keeps photon numbers 0..N per mode, so each mode contributes
//    a factor of (N+1) to the state dimension;
//  - amplitudes are stored row-major over count tuples (n_0, ..., n_{d-1})
//    with mode 0 as the slowest-varying index;
//  - gates are exponentials of *truncated generators*, which makes every
//    gate exactly unitary at any cutoff. Truncation shows up as amplitude
//    error near the cutoff, not as norm loss.

namespace pgket::fock {

using Complex = std::complex<double>;

/// Truncated creation / annihilation matrices at a given cutoff:
/// a|n> = sqrt(n)|n-1>,  a†|n> = sqrt(n+1)|n+1>  (top row of a† truncated).
struct LadderOps {
  std::size_t cutoff = 0;
  ComplexMatrix create;      // a†
  ComplexMatrix annihilate;  // a

  static LadderOps make(std::size_t cutoff) {
    LadderOps ops;
    ops.cutoff = cutoff;
    const std::size_t m = cutoff + 1;
    ops.create = ComplexMatrix(m, m);
    ops.annihilate = ComplexMatrix(m, m);
    for (std::size_t n = 1; n <= cutoff; ++n) {
      const double r = std::sqrt(static_cast<double>(n));
      ops.create(n, n - 1) = r;
      ops.annihilate(n - 1, n) = r;
    }
    return ops;
  }
};

/// Truncated Fock-basis state over d modes.
class FockState {
 public:
  static constexpr std::size_t kDefaultMaxAmplitudes = std::size_t{1} << 22;

  static FockState vacuum(std::size_t num_modes, std::size_t cutoff,
                          std::size_t max_amplitudes = kDefaultMaxAmplitudes) {
    if (num_modes < 1 || cutoff < 1) {
      throw ValidationError("FockState: need num_modes >= 1 and cutoff >= 1");
    }
    std::size_t dim = 1;
    const std::size_t m = cutoff + 1;
    for (std::size_t k = 0; k < num_modes; ++k) {
      if (dim > max_amplitudes / m) {
        throw CapacityError(
            "FockState: (cutoff+1)^num_modes exceeds the amplitude budget");
      }
      dim *= m;
    }
    FockState st;
    st.num_modes_ = num_modes;
    st.cutoff_ = cutoff;
    st.amps_.assign(dim, Complex(0.0, 0.0));
    st.amps_[0] = Complex(1.0, 0.0);
    return st;
  }

  std::size_t num_modes() const { return num_modes_; }
  std::size_t cutoff() const { return cutoff_; }
  std::size_t dim() const { return amps_.size(); }

  std::vector<Complex>& amplitudes() { return amps_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }

  std::size_t mode_stride(std::size_t mode) const {
    std::size_t s = 1;
    for (std::size_t k = mode + 1; k < num_modes_; ++k) s *= cutoff_ + 1;
    return s;
  }

  std::size_t occupation(std::size_t flat, std::size_t mode) const {
    return (flat / mode_stride(mode)) % (cutoff_ + 1);
  }

  std::size_t flatten(const std::vector<std::size_t>& counts) const {
    if (counts.size() != num_modes_) {
      throw ShapeError("FockState::flatten: tuple length mismatch");
    }
    std::size_t flat = 0;
    for (std::size_t m = 0; m < num_modes_; ++m) {
      if (counts[m] > cutoff_) {
        throw ValidationError("FockState::flatten: count above cutoff");
      }
      flat = flat * (cutoff_ + 1) + counts[m];
    }
    return flat;
  }

  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> counts(num_modes_);
    for (std::size_t m = num_modes_; m-- > 0;) {
      counts[m] = flat % (cutoff_ + 1);
      flat /= cutoff_ + 1;
    }
    return counts;
  }

  Complex amplitude(const std::vector<std::size_t>& counts) const {
    return amps_[flatten(counts)];
  }

  double squared_norm() const {
    double s = 0.0;
    for (const Complex& a : amps_) s += std::norm(a);
    return s;
  }

  /// Truncation leakage: probability mass pushed past the cutoff.
  /// Zero (up to roundoff) under the truncated-generator gates.
  double leakage() const { return std::max(0.0, 1.0 - squared_norm()); }

 private:
  std::size_t num_modes_ = 0;
  std::size_t cutoff_ = 0;
  std::vector<Complex> amps_;
};

inline FockState vacuum_state(
    std::size_t num_modes, std::size_t cutoff,
    std::size_t max_amplitudes = FockState::kDefaultMaxAmplitudes) {
  return FockState::vacuum(num_modes, cutoff, max_amplitudes);
}

/// D(alpha) = exp(alpha a† - alpha* a) on a single truncated mode.
/// Column 0 approximates e^{-|alpha|^2/2} alpha^b / sqrt(b!) for b well
/// below the cutoff.
inline ComplexMatrix displacement_matrix(Complex alpha, std::size_t cutoff) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw ValidationError("displacement_matrix: alpha must be finite");
  }
  const LadderOps ops = LadderOps::make(cutoff);
  const std::size_t m = cutoff + 1;
  ComplexMatrix gen(m, m);
  const Complex neg_conj = -std::conj(alpha);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      gen(i, j) = alpha * ops.create(i, j) + neg_conj * ops.annihilate(i, j);
    }
  }
  return cmatexp(gen);
}

/// BS(theta, phi) = exp[theta (e^{i phi} a1 a2† - e^{-i phi} a1† a2)] on two
/// truncated modes, returned over the joint index n1*(cutoff+1)+n2.
///
/// The generator conserves total photon number, so it is exponentiated
/// block-by-block over n1+n2; this is exactly the exponential of the full
/// truncated generator, just cheaper.
inline ComplexMatrix beamsplitter_matrix(double theta, double phi,
                                         std::size_t cutoff) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw ValidationError("beamsplitter_matrix: angles must be finite");
  }
  const std::size_t m = cutoff + 1;
  ComplexMatrix gate(m * m, m * m);
  const Complex up = theta * std::polar(1.0, phi);     // a1 a2† coefficient
  const Complex down = -theta * std::polar(1.0, -phi);  // a1† a2 coefficient

  for (std::size_t total = 0; total <= 2 * cutoff; ++total) {
    const std::size_t lo = total > cutoff ? total - cutoff : 0;
    const std::size_t hi = std::min(total, cutoff);
    const std::size_t block = hi - lo + 1;

    ComplexMatrix gen(block, block);
    for (std::size_t r = 0; r < block; ++r) {
      const std::size_t n1 = lo + r;
      const std::size_t n2 = total - n1;
      if (r >= 1) {
        // a1 a2†: |n1, n2> -> sqrt(n1 (n2+1)) |n1-1, n2+1>
        gen(r - 1, r) = up * std::sqrt(static_cast<double>(n1 * (n2 + 1)));
      }
      if (r + 1 < block) {
        // a1† a2: |n1, n2> -> sqrt((n1+1) n2) |n1+1, n2-1>
        gen(r + 1, r) = down * std::sqrt(static_cast<double>((n1 + 1) * n2));
      }
    }
    ComplexMatrix expb = cmatexp(gen);
    for (std::size_t r = 0; r < block; ++r) {
      const std::size_t row = (lo + r) * m + (total - lo - r);
      for (std::size_t c = 0; c < block; ++c) {
        const std::size_t col = (lo + c) * m + (total - lo - c);
        gate(row, col) = expb(r, c);
      }
    }
  }
  return gate;
}

/// state' = (I ⊗ ... ⊗ gate ⊗ ... ⊗ I)|psi>, gate acting on one mode.
inline FockState apply_single_mode(const ComplexMatrix& gate, std::size_t mode,
                                   const FockState& state) {
  const std::size_t m = state.cutoff() + 1;
  if (gate.rows() != m || gate.cols() != m) {
    throw ShapeError("apply_single_mode: gate extent must be cutoff+1");
  }
  if (mode >= state.num_modes()) {
    throw ValidationError("apply_single_mode: mode index out of range");
  }
  const std::size_t stride = state.mode_stride(mode);
  FockState out = state;
  std::vector<Complex> slice(m);
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    if ((flat / stride) % m != 0) continue;
    for (std::size_t k = 0; k < m; ++k) {
      slice[k] = state.amplitudes()[flat + k * stride];
    }
    for (std::size_t r = 0; r < m; ++r) {
      Complex acc(0.0, 0.0);
      for (std::size_t c = 0; c < m; ++c) acc += gate(r, c) * slice[c];
      out.amplitudes()[flat + r * stride] = acc;
    }
  }
  return out;
}

/// Contraction of a two-mode gate (joint index n_a*(cutoff+1)+n_b) over the
/// (mode_a, mode_b) pair.
inline FockState apply_two_mode(const ComplexMatrix& gate, std::size_t mode_a,
                                std::size_t mode_b, const FockState& state) {
  const std::size_t m = state.cutoff() + 1;
  if (gate.rows() != m * m || gate.cols() != m * m) {
    throw ShapeError("apply_two_mode: gate extent must be (cutoff+1)^2");
  }
  if (mode_a == mode_b) {
    throw ValidationError("apply_two_mode: modes must be distinct");
  }
  if (mode_a >= state.num_modes() || mode_b >= state.num_modes()) {
    throw ValidationError("apply_two_mode: mode index out of range");
  }
  const std::size_t sa = state.mode_stride(mode_a);
  const std::size_t sb = state.mode_stride(mode_b);
  FockState out = state;
  std::vector<Complex> slice(m * m);
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    if ((flat / sa) % m != 0 || (flat / sb) % m != 0) continue;
    for (std::size_t na = 0; na < m; ++na) {
      for (std::size_t nb = 0; nb < m; ++nb) {
        slice[na * m + nb] = state.amplitudes()[flat + na * sa + nb * sb];
      }
    }
    for (std::size_t r = 0; r < m * m; ++r) {
      Complex acc(0.0, 0.0);
      for (std::size_t c = 0; c < m * m; ++c) acc += gate(r, c) * slice[c];
      out.amplitudes()[flat + (r / m) * sa + (r % m) * sb] = acc;
    }
  }
  return out;
}

/// Probability that every mode reads zero photons.
inline double vacuum_probability(const FockState& state) {
  return std::norm(state.amplitudes()[0]);
}

/// Probability that every mode in `modes` reads zero photons (marginal over
/// the rest).
inline double vacuum_probability(const FockState& state,
                                 const std::vector<std::size_t>& modes) {
  if (modes.empty()) {
    throw ValidationError("vacuum_probability: mode subset must be non-empty");
  }
  std::vector<std::size_t> strides;
  strides.reserve(modes.size());
  for (std::size_t mode : modes) {
    if (mode >= state.num_modes()) {
      throw ValidationError("vacuum_probability: mode index out of range");
    }
    strides.push_back(state.mode_stride(mode));
  }
  const std::size_t m = state.cutoff() + 1;
  double p = 0.0;
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    bool all_zero = true;
    for (std::size_t s : strides) {
      if ((flat / s) % m != 0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) p += std::norm(state.amplitudes()[flat]);
  }
  return p;
}

/// <n> on one mode.
inline double mean_photon(const FockState& state, std::size_t mode) {
  if (mode >= state.num_modes()) {
    throw ValidationError("mean_photon: mode index out of range");
  }
  double acc = 0.0;
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    acc += static_cast<double>(state.occupation(flat, mode)) *
           std::norm(state.amplitudes()[flat]);
  }
  return acc / state.squared_norm();
}

/// Full probability table over count tuples, indexed like the amplitudes and
/// renormalized by the squared norm.
inline std::vector<double> photon_distribution(const FockState& state,
                                               double leakage_tol = 1e-6) {
  if (state.leakage() > leakage_tol) {
    throw TruncationError("photon_distribution: truncation leakage " +
                          std::to_string(state.leakage()) +
                          " exceeds tolerance");
  }
  const double norm2 = state.squared_norm();
  std::vector<double> probs(state.dim());
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    probs[flat] = std::norm(state.amplitudes()[flat]) / norm2;
  }
  return probs;
}

/// i.i.d. photon-count tuples drawn by inverse CDF over the flattened table.
inline std::vector<std::vector<std::size_t>> sample_counts(
    const FockState& state, SeededRng& rng, std::size_t shots,
    double leakage_tol = 1e-6) {
  const std::vector<double> probs = photon_distribution(state, leakage_tol);
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  std::vector<std::vector<std::size_t>> out;
  out.reserve(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t flat =
        it == cdf.end() ? probs.size() - 1
                        : static_cast<std::size_t>(it - cdf.begin());
    out.push_back(state.unflatten(flat));
  }
  return out;
}

}  // namespace pgket::fock

#endif  // PGKET_FOCK_HPP_
