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

#ifndef PGKET_NN_HPP_
#define PGKET_NN_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/kernel.hpp"
#include "pgket/linalg.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Neural building blocks around the photonic kernel: the classical
// Gaussian-kernel attention reference, the photonic attention layer, the
// auxiliary masked / cross multi-head attention, positional encoding,
// layer norm, and the feed-forward block. Tokens are rows.

namespace pgket::nn {

constexpr double kMaskSentinel = -1e30;
constexpr double kLayerNormEpsilon = 1e-5;

/// Sinusoidal positional encoding:
///   PE(pos, 2k)   = sin(pos / 10000^{2k/d})
///   PE(pos, 2k+1) = cos(pos / 10000^{2k/d})
inline RealTensor positional_encoding(std::size_t n, std::size_t d) {
  if (d % 2 != 0) {
    throw ValidationError("positional_encoding: dimension must be even");
  }
  RealTensor pe({n, d});
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t k = 0; 2 * k < d; ++k) {
      const double rate =
          std::pow(10000.0, -2.0 * static_cast<double>(k) /
                                static_cast<double>(d));
      const double angle = static_cast<double>(pos) * rate;
      pe(pos, 2 * k) = std::sin(angle);
      pe(pos, 2 * k + 1) = std::cos(angle);
    }
  }
  return pe;
}

/// Per-token layer norm followed by the affine (gain, bias) map.
inline RealTensor layer_norm(const RealTensor& x, const RealTensor& gain,
                             const RealTensor& bias,
                             double eps = kLayerNormEpsilon) {
  if (x.rank() != 2) throw ShapeError("layer_norm: input must be 2-D");
  const std::size_t n = x.rows(), d = x.cols();
  if (d < 2) throw ValidationError("layer_norm: need token dimension >= 2");
  if (gain.size() != d || bias.size() != d) {
    throw ShapeError("layer_norm: gain/bias length must match token dim");
  }
  RealTensor out({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += x(i, j);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv_sigma = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      out(i, j) = (x(i, j) - mean) * inv_sigma * gain[j] + bias[j];
    }
  }
  return out;
}

/// Two-projection feed-forward block: ReLU(x W1 + b1) W2 + b2 per token.
inline RealTensor ffn(const RealTensor& x, const RealTensor& w1,
                      const RealTensor& b1, const RealTensor& w2,
                      const RealTensor& b2) {
  RealTensor h = matmul(x, w1);
  if (b1.size() != h.cols()) throw ShapeError("ffn: bias b1 length mismatch");
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      h(i, j) = std::max(0.0, h(i, j) + b1[j]);
    }
  }
  RealTensor out = matmul(h, w2);
  if (b2.size() != out.cols()) throw ShapeError("ffn: bias b2 length mismatch");
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += b2[j];
  }
  return out;
}

/// Literal single-affine form: ReLU(x W + b). Only usable when W is square,
/// since the residual needs the width back.
inline RealTensor ffn_single(const RealTensor& x, const RealTensor& w,
                             const RealTensor& b) {
  RealTensor h = matmul(x, w);
  if (b.size() != h.cols()) {
    throw ShapeError("ffn_single: bias length mismatch");
  }
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      h(i, j) = std::max(0.0, h(i, j) + b[j]);
    }
  }
  return h;
}

/// Unnormalized Gaussian-kernel scores exp(-1/2 (Xi-Xj)^T Gamma (Xi-Xj)).
inline RealTensor gksam_scores_raw(const RealTensor& tokens,
                                   const RealTensor& gamma) {
  if (tokens.rank() != 2) throw ShapeError("gksam_scores: tokens must be 2-D");
  const std::size_t n = tokens.rows(), d = tokens.cols();
  if (gamma.rank() != 2 || gamma.rows() != d || gamma.cols() != d) {
    throw ShapeError("gksam_scores: covariance must be d x d");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(gamma(i, j) - gamma(j, i)) > 1e-10) {
        throw ValidationError("gksam_scores: covariance is not symmetric");
      }
    }
  }
  RealTensor a({n, n});
  std::vector<double> z(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t t = 0; t < d; ++t) z[t] = tokens(i, t) - tokens(j, t);
      double q = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        double acc = 0.0;
        for (std::size_t u = 0; u < d; ++u) acc += gamma(t, u) * z[u];
        q += z[t] * acc;
      }
      a(i, j) = std::exp(-0.5 * q);
    }
  }
  return a;
}

/// Classical Gaussian-kernel attention scores:
///   A(i, j) = exp(-1/2 (Xi-Xj)^T Gamma (Xi-Xj)) / Z_i,  rows sum to 1.
inline RealTensor gksam_scores(const RealTensor& tokens,
                               const RealTensor& gamma) {
  RealTensor a = gksam_scores_raw(tokens, gamma);
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += a(i, j);
    for (std::size_t j = 0; j < n; ++j) a(i, j) /= sum;
  }
  return a;
}

/// Gamma stored through an unconstrained square factor: Gamma = M^T M is
/// symmetric PSD for any M.
struct GksamParams {
  RealTensor factor;   // M, d x d
  RealTensor w_value;  // d x d

  RealTensor gamma() const { return matmul(transpose(factor), factor); }
};

/// GKSAM_i = sum_j A(i, j) V_j with V = tokens W^V.
inline RealTensor gksam_forward(const RealTensor& tokens,
                                const GksamParams& params) {
  const RealTensor a = gksam_scores(tokens, params.gamma());
  return matmul(a, matmul(tokens, params.w_value));
}

/// Photonic attention layer: scores from the kernel module (exact or
/// shot-estimated), then the same value mixing as the classical path.
inline RealTensor pgksam_forward(const RealTensor& tokens,
                                 const kernel::MeshParams& mesh,
                                 const kernel::KernelConfig& cfg,
                                 const RealTensor& w_value,
                                 SeededRng* rng = nullptr) {
  const kernel::ScoreMatrix scores = kernel::score_matrix(tokens, mesh, cfg, rng);
  return matmul(scores.scores, matmul(tokens, w_value));
}

/// Per-head projections for the auxiliary decoder-side attention ops.
struct MultiheadParams {
  std::size_t heads = 1;
  std::vector<RealTensor> w_query;  // d x d_h each
  std::vector<RealTensor> w_key;
  std::vector<RealTensor> w_value;
  RealTensor w_out;  // d x d

  void validate(std::size_t d) const {
    if (heads < 1) throw ValidationError("MultiheadParams: heads >= 1");
    if (d % heads != 0) {
      throw ValidationError("MultiheadParams: head count must divide d");
    }
    const std::size_t dh = d / heads;
    if (w_query.size() != heads || w_key.size() != heads ||
        w_value.size() != heads) {
      throw ShapeError("MultiheadParams: per-head projection count mismatch");
    }
    for (std::size_t h = 0; h < heads; ++h) {
      if (w_query[h].rows() != d || w_query[h].cols() != dh ||
          w_key[h].rows() != d || w_key[h].cols() != dh ||
          w_value[h].rows() != d || w_value[h].cols() != dh) {
        throw ShapeError("MultiheadParams: projection extents mismatch");
      }
    }
    if (w_out.rows() != d || w_out.cols() != d) {
      throw ShapeError("MultiheadParams: output projection must be d x d");
    }
  }
};

/// Scaled dot-product multi-head attention. Queries come from one sequence,
/// keys and values from another (the same one for self-attention). With
/// `causal_mask` set, position i attends only to positions j <= i.
inline RealTensor multihead_sam(const RealTensor& queries_from,
                                const RealTensor& keys_values_from,
                                const MultiheadParams& params,
                                bool causal_mask) {
  if (queries_from.rank() != 2 || keys_values_from.rank() != 2 ||
      queries_from.cols() != keys_values_from.cols()) {
    throw ShapeError("multihead_sam: sequences must share the token dim");
  }
  const std::size_t d = queries_from.cols();
  params.validate(d);
  const std::size_t nq = queries_from.rows();
  const std::size_t nk = keys_values_from.rows();
  const std::size_t dh = d / params.heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  RealTensor concat({nq, d});
  for (std::size_t h = 0; h < params.heads; ++h) {
    const RealTensor q = matmul(queries_from, params.w_query[h]);
    const RealTensor k = matmul(keys_values_from, params.w_key[h]);
    const RealTensor v = matmul(keys_values_from, params.w_value[h]);

    RealTensor logits({nq, nk});
    for (std::size_t i = 0; i < nq; ++i) {
      for (std::size_t j = 0; j < nk; ++j) {
        if (causal_mask && j > i) {
          logits(i, j) = kMaskSentinel;
          continue;
        }
        double acc = 0.0;
        for (std::size_t t = 0; t < dh; ++t) acc += q(i, t) * k(j, t);
        logits(i, j) = acc * inv_scale;
      }
    }
    const RealTensor weights = softmax_rows(logits);
    const RealTensor head = matmul(weights, v);
    for (std::size_t i = 0; i < nq; ++i) {
      for (std::size_t t = 0; t < dh; ++t) concat(i, h * dh + t) = head(i, t);
    }
  }
  return matmul(concat, params.w_out);
}

}  // namespace pgket::nn

#endif  // PGKET_NN_HPP_
