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

#ifndef PGKET_KERNEL_HPP_
#define PGKET_KERNEL_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "pgket/coherent.hpp"
#include "pgket/errors.hpp"
#include "pgket/fock.hpp"
#include "pgket/mesh.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Photonic Gaussian-kernel self-attention score. The circuit loads the token
// difference as per-mode displacements, routes it through the beamsplitter
// mesh, and reads the vacuum-event probability on a detected subset of
// modes:
//
//   score(Xi, Xj) = P(zero photons on S)
//                 = exp(-loading_scale^2 * z^T Gamma z),   z = Xi - Xj,
//
// with Gamma = Re(W_S† W_S) the trainable covariance realized by the mesh.
// With the default loading scale 1/sqrt(2) the exact score is
// exp(-1/2 z^T Gamma z). Detecting *every* mode makes the score
// mesh-independent (unitarity), which is why the default detects only the
// first half of the modes.

namespace pgket::kernel {

enum class ScoreMode {
  kGammaForm,       // vacuum detection on a strict subset; trainable Gamma
  kScalarWeighted,  // literal factorized form: w * exp(-|z|^2 / 2)
};

enum class ScoreBackend { kExact, kShots };

struct KernelConfig {
  std::size_t num_modes = 16;
  std::vector<std::size_t> detected_modes;  // non-empty, ascending
  double loading_scale = 0.70710678118654752440;  // 1/sqrt(2)
  bool normalize_rows = true;
  ScoreMode score_mode = ScoreMode::kGammaForm;
  ScoreBackend backend = ScoreBackend::kExact;
  std::size_t shots = 16;
  double scalar_weight = 1.0;  // only read in kScalarWeighted mode

  /// Defaults for d modes: detect the first ceil(d/2) modes.
  static KernelConfig defaults(std::size_t num_modes) {
    KernelConfig cfg;
    cfg.num_modes = num_modes;
    cfg.detected_modes.resize((num_modes + 1) / 2);
    for (std::size_t k = 0; k < cfg.detected_modes.size(); ++k) {
      cfg.detected_modes[k] = k;
    }
    return cfg;
  }

  static std::vector<std::size_t> all_modes(std::size_t num_modes) {
    std::vector<std::size_t> s(num_modes);
    for (std::size_t k = 0; k < num_modes; ++k) s[k] = k;
    return s;
  }

  /// Modes actually read out: the configured subset in gamma form, every
  /// mode in scalar-weighted form.
  std::vector<std::size_t> readout_modes() const {
    if (score_mode == ScoreMode::kScalarWeighted) return all_modes(num_modes);
    return detected_modes;
  }

  void validate() const {
    if (num_modes < 1) throw ValidationError("KernelConfig: num_modes >= 1");
    if (loading_scale <= 0.0 || !std::isfinite(loading_scale)) {
      throw ValidationError("KernelConfig: loading_scale must be positive");
    }
    if (score_mode == ScoreMode::kGammaForm) {
      if (detected_modes.empty()) {
        throw ValidationError("KernelConfig: detected subset is empty");
      }
      for (std::size_t k : detected_modes) {
        if (k >= num_modes) {
          throw ValidationError("KernelConfig: detected mode out of range");
        }
      }
    }
    if (backend == ScoreBackend::kShots && shots < 1) {
      throw ValidationError("KernelConfig: shots >= 1 in shot mode");
    }
    if (score_mode == ScoreMode::kScalarWeighted &&
        (scalar_weight <= 0.0 || !std::isfinite(scalar_weight))) {
      throw ValidationError("KernelConfig: scalar weight must be positive");
    }
  }
};

/// n x n attention scores plus where they came from.
struct ScoreMatrix {
  enum class Provenance { kExact, kShotEstimated };

  RealTensor scores;
  Provenance provenance = Provenance::kExact;
  std::size_t degenerate_rows = 0;  // shot-mode rows replaced by uniform
};

namespace detail {

inline void check_token_vector(const RealTensor& x, std::size_t d,
                               const char* who) {
  if (x.rank() != 1 || x.size() != d) {
    throw ShapeError(std::string(who) + ": token vector length must match d");
  }
}

/// Loaded-and-routed output amplitudes beta = U (loading_scale * z).
inline std::vector<std::complex<double>> routed_amplitudes(
    const std::vector<double>& z, const ComplexMatrix& u, double scale) {
  const std::size_t d = z.size();
  std::vector<std::complex<double>> beta(d, {0.0, 0.0});
  for (std::size_t i = 0; i < d; ++i) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < d; ++j) acc += u(i, j) * (scale * z[j]);
    beta[i] = acc;
  }
  return beta;
}

inline double score_from_beta(const std::vector<std::complex<double>>& beta,
                              const KernelConfig& cfg) {
  double occupancy = 0.0;
  for (std::size_t k : cfg.readout_modes()) occupancy += std::norm(beta[k]);
  double p = std::exp(-occupancy);
  if (cfg.score_mode == ScoreMode::kScalarWeighted) p *= cfg.scalar_weight;
  return p;
}

inline std::vector<double> token_difference(const RealTensor& xi,
                                            const RealTensor& xj) {
  std::vector<double> z(xi.size());
  for (std::size_t t = 0; t < z.size(); ++t) z[t] = xi[t] - xj[t];
  return z;
}

/// Coherent state after loading z and routing through the mesh; this is the
/// literal circuit run on the fast backend.
inline coherent::CoherentState run_circuit(const std::vector<double>& z,
                                           const ComplexMatrix& u,
                                           const KernelConfig& cfg,
                                           double unitarity_tol) {
  coherent::CoherentState state = coherent::coherent_vacuum(cfg.num_modes);
  for (std::size_t t = 0; t < z.size(); ++t) {
    state = coherent::displace(state, t, cfg.loading_scale * z[t]);
  }
  return coherent::apply_mesh(state, u, unitarity_tol);
}

}  // namespace detail

/// Exact PGKSAS via the coherent backend, given a precomputed mesh unitary.
inline double pgksas_exact(const RealTensor& xi, const RealTensor& xj,
                           const ComplexMatrix& mesh_u,
                           const KernelConfig& cfg,
                           double unitarity_tol = 1e-10) {
  cfg.validate();
  detail::check_token_vector(xi, cfg.num_modes, "pgksas_exact");
  detail::check_token_vector(xj, cfg.num_modes, "pgksas_exact");
  const std::vector<double> z = detail::token_difference(xi, xj);
  coherent::CoherentState state =
      detail::run_circuit(z, mesh_u, cfg, unitarity_tol);
  double p = coherent::vacuum_probability(state, cfg.readout_modes());
  if (cfg.score_mode == ScoreMode::kScalarWeighted) p *= cfg.scalar_weight;
  return p;
}

inline double pgksas_exact(const RealTensor& xi, const RealTensor& xj,
                           const MeshParams& mesh, const KernelConfig& cfg) {
  return pgksas_exact(xi, xj, mesh_unitary(mesh), cfg);
}

/// Shot-estimated PGKSAS: the fraction of shots in which every readout mode
/// reports zero photons. Unbiased estimator of pgksas_exact; at the default
/// 16 shots the estimates live on the grid {0, 1/16, ..., 1}.
inline double pgksas_shots(const RealTensor& xi, const RealTensor& xj,
                           const ComplexMatrix& mesh_u,
                           const KernelConfig& cfg, SeededRng& rng) {
  cfg.validate();
  if (cfg.shots < 1) throw ValidationError("pgksas_shots: shots >= 1");
  detail::check_token_vector(xi, cfg.num_modes, "pgksas_shots");
  detail::check_token_vector(xj, cfg.num_modes, "pgksas_shots");
  const std::vector<double> z = detail::token_difference(xi, xj);
  coherent::CoherentState state = detail::run_circuit(z, mesh_u, cfg, 1e-10);
  const std::vector<std::size_t> readout = cfg.readout_modes();
  const auto samples = coherent::sample_counts(state, rng, cfg.shots);
  std::size_t vacuum_events = 0;
  for (const auto& counts : samples) {
    bool all_zero = true;
    for (std::size_t k : readout) {
      if (counts[k] != 0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) ++vacuum_events;
  }
  double estimate =
      static_cast<double>(vacuum_events) / static_cast<double>(cfg.shots);
  if (cfg.score_mode == ScoreMode::kScalarWeighted) {
    estimate *= cfg.scalar_weight;
  }
  return estimate;
}

inline double pgksas_shots(const RealTensor& xi, const RealTensor& xj,
                           const MeshParams& mesh, const KernelConfig& cfg,
                           SeededRng& rng) {
  return pgksas_shots(xi, xj, mesh_unitary(mesh), cfg, rng);
}

/// Literal circuit on the Fock oracle: D(s Xi), then D†(s Xj), then the mesh
/// as two-mode beamsplitter gates, then vacuum projection on the readout
/// modes. Used to validate the coherent fast path end to end.
inline double pgksas_fock(
    const RealTensor& xi, const RealTensor& xj, const MeshParams& mesh,
    const KernelConfig& cfg, std::size_t cutoff,
    std::size_t max_amplitudes = fock::FockState::kDefaultMaxAmplitudes) {
  cfg.validate();
  mesh.validate();
  detail::check_token_vector(xi, cfg.num_modes, "pgksas_fock");
  detail::check_token_vector(xj, cfg.num_modes, "pgksas_fock");
  if (mesh.num_modes != cfg.num_modes) {
    throw ShapeError("pgksas_fock: mesh and config mode counts disagree");
  }

  fock::FockState state =
      fock::vacuum_state(cfg.num_modes, cutoff, max_amplitudes);
  const double s = cfg.loading_scale;
  for (std::size_t t = 0; t < cfg.num_modes; ++t) {
    state = fock::apply_single_mode(fock::displacement_matrix(s * xi[t], cutoff),
                                    t, state);
  }
  for (std::size_t t = 0; t < cfg.num_modes; ++t) {
    const ComplexMatrix d = fock::displacement_matrix(s * xj[t], cutoff);
    state = fock::apply_single_mode(dagger(d), t, state);
  }
  for (std::size_t layer = 0; layer < mesh.depth(); ++layer) {
    for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
      const std::size_t a = MeshParams::pair_low_mode(layer, slot);
      const ComplexMatrix bs = fock::beamsplitter_matrix(
          mesh.theta[layer][slot], mesh.phi[layer][slot], cutoff);
      state = fock::apply_two_mode(bs, a, a + 1, state);
    }
  }
  double p = fock::vacuum_probability(state, cfg.readout_modes());
  if (cfg.score_mode == ScoreMode::kScalarWeighted) p *= cfg.scalar_weight;
  return p;
}

/// Row normalization with the shot-mode degenerate fallback: a row that sums
/// to zero becomes uniform 1/n. Returns the number of rows replaced.
inline std::size_t normalize_score_rows(RealTensor& scores) {
  const std::size_t n = scores.rows();
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += scores(i, j);
    if (sum == 0.0) {
      ++degenerate;
      for (std::size_t j = 0; j < n; ++j) {
        scores(i, j) = 1.0 / static_cast<double>(n);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) scores(i, j) /= sum;
    }
  }
  return degenerate;
}

/// Full n x n score matrix. Exact mode is deterministic and symmetric before
/// normalization; shot mode draws one labeled substream per (i, j) pair, so
/// the result does not depend on evaluation order.
inline ScoreMatrix score_matrix(const RealTensor& tokens,
                                const MeshParams& mesh,
                                const KernelConfig& cfg,
                                SeededRng* rng = nullptr) {
  cfg.validate();
  if (tokens.rank() != 2 || tokens.cols() != cfg.num_modes) {
    throw ShapeError("score_matrix: tokens must be n x num_modes");
  }
  const std::size_t n = tokens.rows();
  if (n < 1) throw ValidationError("score_matrix: need at least one token");
  if (cfg.backend == ScoreBackend::kShots && rng == nullptr) {
    throw ValidationError("score_matrix: shot backend needs an rng");
  }

  const ComplexMatrix u = mesh_unitary(mesh);
  if (unitarity_defect(u) > 1e-10) {
    throw ValidationError("score_matrix: mesh unitary failed validation");
  }

  const auto row = [&](std::size_t i) {
    std::vector<double> v(cfg.num_modes);
    for (std::size_t t = 0; t < cfg.num_modes; ++t) v[t] = tokens(i, t);
    return RealTensor({cfg.num_modes}, std::move(v));
  };

  ScoreMatrix out;
  out.scores = RealTensor({n, n});
  if (cfg.backend == ScoreBackend::kExact) {
    out.provenance = ScoreMatrix::Provenance::kExact;
    for (std::size_t i = 0; i < n; ++i) {
      const RealTensor xi = row(i);
      for (std::size_t j = 0; j < n; ++j) {
        // Unitarity was validated once above.
        out.scores(i, j) = pgksas_exact(xi, row(j), u, cfg, 1e30);
      }
    }
  } else {
    out.provenance = ScoreMatrix::Provenance::kShotEstimated;
    for (std::size_t i = 0; i < n; ++i) {
      const RealTensor xi = row(i);
      for (std::size_t j = 0; j < n; ++j) {
        SeededRng pair_rng = rng->split(i, j);
        out.scores(i, j) = pgksas_shots(xi, row(j), u, cfg, pair_rng);
      }
    }
  }

  if (cfg.normalize_rows) {
    out.degenerate_rows = normalize_score_rows(out.scores);
  }
  return out;
}

/// Gradients of one exact score with respect to every mesh angle and both
/// tokens. Shot estimates are piecewise constant, so the shot backend is
/// rejected; training differentiates the exact score.
struct PgksasGradients {
  std::vector<double> d_theta;  // layer-major flat, like MeshParams::flat_theta
  std::vector<double> d_phi;
  RealTensor d_xi;
  RealTensor d_xj;
  double d_scalar_weight = 0.0;
};

namespace detail {

/// Workspace holding everything about a mesh that pair gradients reuse:
/// per-layer 2x2 blocks and suffix products restricted to readout rows.
struct MeshGradWorkspace {
  std::size_t num_modes = 0;
  std::vector<std::size_t> readout;
  // suffix[l] = rows `readout` of E_L ... E_{l+1}; suffix[L] is the selector.
  std::vector<ComplexMatrix> suffix;
  const MeshParams* mesh = nullptr;

  static MeshGradWorkspace build(const MeshParams& mesh,
                                 const std::vector<std::size_t>& readout) {
    MeshGradWorkspace ws;
    ws.num_modes = mesh.num_modes;
    ws.readout = readout;
    ws.mesh = &mesh;
    const std::size_t depth = mesh.depth();
    ws.suffix.resize(depth + 1);
    ComplexMatrix c(readout.size(), mesh.num_modes);
    for (std::size_t r = 0; r < readout.size(); ++r) {
      c(r, readout[r]) = 1.0;
    }
    ws.suffix[depth] = c;
    for (std::size_t layer = depth; layer-- > 0;) {
      // suffix[l] = suffix[l+1] * E_{l+1}: rotate column pairs.
      for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
        const std::size_t a = MeshParams::pair_low_mode(layer, slot);
        const std::size_t b = a + 1;
        const ComplexMatrix rot = coherent::mesh_matrix(
            mesh.theta[layer][slot], mesh.phi[layer][slot]);
        for (std::size_t r = 0; r < readout.size(); ++r) {
          const std::complex<double> ca = c(r, a);
          const std::complex<double> cb = c(r, b);
          c(r, a) = ca * rot(0, 0) + cb * rot(1, 0);
          c(r, b) = ca * rot(0, 1) + cb * rot(1, 1);
        }
      }
      ws.suffix[layer] = c;
    }
    return ws;
  }
};

/// Accumulates d(score)/d(angles) and d(score)/d(z) for one pair into the
/// provided flat buffers (scaled by `weight`, which carries the upstream
/// adjoint).
inline void accumulate_pair_gradients(const MeshGradWorkspace& ws,
                                      const std::vector<double>& z,
                                      const KernelConfig& cfg, double weight,
                                      std::vector<double>& d_theta,
                                      std::vector<double>& d_phi,
                                      double* d_z) {
  using Complex = std::complex<double>;
  const MeshParams& mesh = *ws.mesh;
  const std::size_t depth = mesh.depth();
  const double s = cfg.loading_scale;

  // Forward pass: prefix[l] = E_l ... E_1 (s z); prefix[0] is the loading.
  std::vector<std::vector<Complex>> prefix(depth + 1);
  prefix[0].resize(ws.num_modes);
  for (std::size_t t = 0; t < ws.num_modes; ++t) prefix[0][t] = s * z[t];
  for (std::size_t layer = 0; layer < depth; ++layer) {
    prefix[layer + 1] = prefix[layer];
    auto& v = prefix[layer + 1];
    for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
      const std::size_t a = MeshParams::pair_low_mode(layer, slot);
      const std::size_t b = a + 1;
      const ComplexMatrix rot = coherent::mesh_matrix(mesh.theta[layer][slot],
                                                      mesh.phi[layer][slot]);
      const Complex va = v[a];
      const Complex vb = v[b];
      v[a] = rot(0, 0) * va + rot(0, 1) * vb;
      v[b] = rot(1, 0) * va + rot(1, 1) * vb;
    }
  }
  const std::vector<Complex>& beta = prefix[depth];

  double occupancy = 0.0;
  std::vector<Complex> beta_s(ws.readout.size());
  for (std::size_t r = 0; r < ws.readout.size(); ++r) {
    beta_s[r] = beta[ws.readout[r]];
    occupancy += std::norm(beta_s[r]);
  }
  const double score = std::exp(-occupancy);

  // Angles.
  std::size_t flat = 0;
  for (std::size_t layer = 0; layer < depth; ++layer) {
    const ComplexMatrix& c = ws.suffix[layer + 1];
    for (std::size_t slot = 0; slot < mesh.theta[layer].size();
         ++slot, ++flat) {
      const std::size_t a = MeshParams::pair_low_mode(layer, slot);
      const std::size_t b = a + 1;
      const double th = mesh.theta[layer][slot];
      const double ph = mesh.phi[layer][slot];
      const double ct = std::cos(th), st = std::sin(th);
      const Complex eip = std::polar(1.0, ph);
      const Complex eim = std::polar(1.0, -ph);
      const Complex va = prefix[layer][a];
      const Complex vb = prefix[layer][b];

      // dR/dtheta = [[-sin, -e^{-ip} cos], [e^{ip} cos, -sin]]
      const Complex wa_t = -st * va - eim * ct * vb;
      const Complex wb_t = eip * ct * va - st * vb;
      // dR/dphi = [[0, i e^{-ip} sin], [i e^{ip} sin, 0]]
      const Complex wa_p = Complex(0.0, 1.0) * eim * st * vb;
      const Complex wb_p = Complex(0.0, 1.0) * eip * st * va;

      double docc_t = 0.0;
      double docc_p = 0.0;
      for (std::size_t r = 0; r < ws.readout.size(); ++r) {
        const Complex contrib_t = c(r, a) * wa_t + c(r, b) * wb_t;
        const Complex contrib_p = c(r, a) * wa_p + c(r, b) * wb_p;
        docc_t += 2.0 * (std::conj(beta_s[r]) * contrib_t).real();
        docc_p += 2.0 * (std::conj(beta_s[r]) * contrib_p).real();
      }
      d_theta[flat] += weight * (-score) * docc_t;
      d_phi[flat] += weight * (-score) * docc_p;
    }
  }

  // Tokens: d(score)/dz_t = -2 s score Re sum_r conj(beta_S[r]) W[r][t],
  // with W = rows `readout` of U = suffix[0].
  if (d_z != nullptr) {
    const ComplexMatrix& w = ws.suffix[0];
    for (std::size_t t = 0; t < ws.num_modes; ++t) {
      double acc = 0.0;
      for (std::size_t r = 0; r < ws.readout.size(); ++r) {
        acc += (std::conj(beta_s[r]) * w(r, t)).real();
      }
      d_z[t] += weight * (-2.0 * s * score) * acc;
    }
  }
}

}  // namespace detail

inline PgksasGradients grad_pgksas(const RealTensor& xi, const RealTensor& xj,
                                   const MeshParams& mesh,
                                   const KernelConfig& cfg) {
  cfg.validate();
  mesh.validate();
  if (cfg.backend == ScoreBackend::kShots) {
    throw UnsupportedModeError(
        "grad_pgksas: shot estimates are piecewise constant; gradients flow "
        "through the exact score");
  }
  detail::check_token_vector(xi, cfg.num_modes, "grad_pgksas");
  detail::check_token_vector(xj, cfg.num_modes, "grad_pgksas");

  const std::size_t d = cfg.num_modes;
  PgksasGradients g;
  g.d_theta.assign(mesh.slot_count(), 0.0);
  g.d_phi.assign(mesh.slot_count(), 0.0);
  g.d_xi = RealTensor({d});
  g.d_xj = RealTensor({d});
  const std::vector<double> z = detail::token_difference(xi, xj);

  if (cfg.score_mode == ScoreMode::kScalarWeighted) {
    // score = w exp(-s^2 |z|^2); the mesh does not enter.
    const double s2 = cfg.loading_scale * cfg.loading_scale;
    double zz = 0.0;
    for (double v : z) zz += v * v;
    const double base = std::exp(-s2 * zz);
    g.d_scalar_weight = base;
    for (std::size_t t = 0; t < d; ++t) {
      const double dscore = -2.0 * s2 * cfg.scalar_weight * base * z[t];
      g.d_xi[t] = dscore;
      g.d_xj[t] = -dscore;
    }
    return g;
  }

  const auto ws = detail::MeshGradWorkspace::build(mesh, cfg.readout_modes());
  std::vector<double> dz(d, 0.0);
  detail::accumulate_pair_gradients(ws, z, cfg, 1.0, g.d_theta, g.d_phi,
                                    dz.data());
  for (std::size_t t = 0; t < d; ++t) {
    g.d_xi[t] = dz[t];
    g.d_xj[t] = -dz[t];
  }
  return g;
}

/// Vector-Jacobian product through the RAW (unnormalized) score matrix:
/// given kbar[i][j] = dL/d raw[i][j], accumulate gradients for the mesh
/// angles, the tokens, and (in scalar-weighted mode) the weight.
struct ScoreMatrixGrads {
  std::vector<double> d_theta;
  std::vector<double> d_phi;
  RealTensor d_tokens;
  double d_scalar_weight = 0.0;
};

inline ScoreMatrixGrads score_matrix_vjp(const RealTensor& tokens,
                                         const MeshParams& mesh,
                                         const KernelConfig& cfg,
                                         const RealTensor& kbar) {
  cfg.validate();
  mesh.validate();
  const std::size_t n = tokens.rows();
  const std::size_t d = cfg.num_modes;
  if (tokens.rank() != 2 || tokens.cols() != d) {
    throw ShapeError("score_matrix_vjp: tokens must be n x num_modes");
  }
  if (kbar.rank() != 2 || kbar.rows() != n || kbar.cols() != n) {
    throw ShapeError("score_matrix_vjp: adjoint must be n x n");
  }

  ScoreMatrixGrads g;
  g.d_theta.assign(mesh.slot_count(), 0.0);
  g.d_phi.assign(mesh.slot_count(), 0.0);
  g.d_tokens = RealTensor({n, d});

  if (cfg.score_mode == ScoreMode::kScalarWeighted) {
    const double s2 = cfg.loading_scale * cfg.loading_scale;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double adj = kbar(i, j);
        if (adj == 0.0) continue;
        double zz = 0.0;
        for (std::size_t t = 0; t < d; ++t) {
          const double zt = tokens(i, t) - tokens(j, t);
          zz += zt * zt;
        }
        const double base = std::exp(-s2 * zz);
        g.d_scalar_weight += adj * base;
        for (std::size_t t = 0; t < d; ++t) {
          const double zt = tokens(i, t) - tokens(j, t);
          const double dscore = -2.0 * s2 * cfg.scalar_weight * base * zt;
          g.d_tokens(i, t) += adj * dscore;
          g.d_tokens(j, t) -= adj * dscore;
        }
      }
    }
    return g;
  }

  const auto ws = detail::MeshGradWorkspace::build(mesh, cfg.readout_modes());
  std::vector<double> z(d), dz(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double adj = kbar(i, j);
      if (adj == 0.0 || i == j) continue;  // diagonal score is constant 1
      for (std::size_t t = 0; t < d; ++t) z[t] = tokens(i, t) - tokens(j, t);
      std::fill(dz.begin(), dz.end(), 0.0);
      detail::accumulate_pair_gradients(ws, z, cfg, adj, g.d_theta, g.d_phi,
                                        dz.data());
      for (std::size_t t = 0; t < d; ++t) {
        g.d_tokens(i, t) += dz[t];
        g.d_tokens(j, t) -= dz[t];
      }
    }
  }
  return g;
}

}  // namespace pgket::kernel

#endif  // PGKET_KERNEL_HPP_
