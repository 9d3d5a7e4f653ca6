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

#ifndef PGKET_MODEL_HPP_
#define PGKET_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/kernel.hpp"
#include "pgket/mesh.hpp"
#include "pgket/nn.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Encoder-only classifier: positional encoding, one or more attention +
// feed-forward encoder layers, mean pooling, and a linear head. The decoder
// blocks exist as tested operations in nn.hpp but are not part of the
// trained pipeline; all experiments are classification.

namespace pgket::nn {

enum class AttentionKind {
  kPhotonic,   // scores from the photonic kernel
  kClassical,  // classical Gaussian-kernel reference with Gamma = M^T M
};

struct ModelConfig {
  std::size_t tokens = 4;
  std::size_t dim = 16;
  std::size_t encoder_layers = 1;
  std::size_t ffn_width = 0;   // 0 -> 4 * dim
  std::size_t classes = 5;
  std::size_t heads = 2;       // auxiliary multi-head ops only
  std::size_t mesh_depth = 0;  // 0 -> dim (full rectangular reach)
  bool ffn_single_affine = false;
  AttentionKind attention = AttentionKind::kPhotonic;
  kernel::KernelConfig kernel = kernel::KernelConfig::defaults(16);

  std::size_t ffn_hidden() const {
    if (ffn_single_affine) return dim;
    return ffn_width == 0 ? 4 * dim : ffn_width;
  }
  std::size_t resolved_mesh_depth() const {
    return mesh_depth == 0 ? dim : mesh_depth;
  }

  void validate() const {
    if (tokens < 1 || dim < 2 || encoder_layers < 1 || classes < 1) {
      throw ValidationError("ModelConfig: extents must be positive");
    }
    if (dim % 2 != 0) {
      throw ValidationError("ModelConfig: dim must be even (positional "
                            "encoding)");
    }
    if (kernel.num_modes != dim) {
      throw ValidationError("ModelConfig: kernel mode count must equal dim");
    }
  }
};

struct EncoderLayerParams {
  RealTensor mesh_theta;  // flat angles, layer-major (photonic)
  RealTensor mesh_phi;
  RealTensor gamma_factor;        // M with Gamma = M^T M (classical)
  RealTensor log_kernel_weight;   // {1}; scalar-weighted score mode
  RealTensor w_value;             // d x d
  RealTensor ln1_gain, ln1_bias;  // d
  RealTensor ln2_gain, ln2_bias;  // d
  RealTensor ffn_w1, ffn_b1;      // d x h, h
  RealTensor ffn_w2, ffn_b2;      // h x d, d (unused in single-affine form)
};

class Model {
 public:
  ModelConfig config;
  std::vector<EncoderLayerParams> layers;
  RealTensor head_w;  // d x classes
  RealTensor head_b;  // classes

  static Model init(const ModelConfig& cfg, SeededRng& rng) {
    cfg.validate();
    Model model;
    model.config = cfg;
    const std::size_t d = cfg.dim;
    const std::size_t h = cfg.ffn_hidden();

    const auto affine = [&rng](std::size_t rows, std::size_t cols) {
      RealTensor t({rows, cols});
      const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
      for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = rng.uniform(-scale, scale);
      }
      return t;
    };
    const auto bias = [&rng](std::size_t n, std::size_t fan_in) {
      RealTensor t({n});
      const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < n; ++i) t[i] = rng.uniform(-scale, scale);
      return t;
    };

    model.layers.resize(cfg.encoder_layers);
    for (auto& layer : model.layers) {
      const kernel::MeshParams mesh =
          kernel::MeshParams::random_init(d, cfg.resolved_mesh_depth(), rng);
      layer.mesh_theta = RealTensor::vector(mesh.flat_theta());
      layer.mesh_phi = RealTensor::vector(mesh.flat_phi());
      layer.gamma_factor = RealTensor::identity(d);
      layer.log_kernel_weight = RealTensor::scalar(0.0);
      layer.w_value = affine(d, d);
      layer.ln1_gain = RealTensor({d});
      layer.ln1_gain.fill(1.0);
      layer.ln1_bias = RealTensor({d});
      layer.ln2_gain = RealTensor({d});
      layer.ln2_gain.fill(1.0);
      layer.ln2_bias = RealTensor({d});
      layer.ffn_w1 = affine(d, h);
      layer.ffn_b1 = bias(h, d);
      if (!cfg.ffn_single_affine) {
        layer.ffn_w2 = affine(h, d);
        layer.ffn_b2 = bias(d, h);
      }
    }
    model.head_w = affine(d, cfg.classes);
    model.head_b = bias(cfg.classes, d);
    return model;
  }

  kernel::MeshParams mesh(std::size_t layer) const {
    kernel::MeshParams m = kernel::MeshParams::identity(
        config.dim, config.resolved_mesh_depth());
    m.set_flat_theta(layers[layer].mesh_theta.values());
    m.set_flat_phi(layers[layer].mesh_phi.values());
    return m;
  }

  /// Kernel config for one layer's forward pass: the layer's trainable
  /// scalar weight is folded in for the scalar-weighted score mode.
  kernel::KernelConfig layer_kernel_config(std::size_t layer) const {
    kernel::KernelConfig cfg = config.kernel;
    if (cfg.score_mode == kernel::ScoreMode::kScalarWeighted) {
      cfg.scalar_weight = std::exp(layers[layer].log_kernel_weight[0]);
    }
    return cfg;
  }

  /// Trainable tensors in a fixed traversal order (gradient reduction and
  /// optimizer updates follow this order).
  template <typename Fn>
  void visit_params(Fn&& fn) {
    visit_params_impl(*this, fn);
  }
  template <typename Fn>
  void visit_params(Fn&& fn) const {
    visit_params_impl(*this, fn);
  }

 private:
  template <typename Self, typename Fn>
  static void visit_params_impl(Self& self, Fn&& fn) {
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      auto& layer = self.layers[l];
      const std::string prefix = "layer" + std::to_string(l) + ".";
      if (self.config.attention == AttentionKind::kPhotonic) {
        if (self.config.kernel.score_mode ==
            kernel::ScoreMode::kScalarWeighted) {
          fn(prefix + "log_kernel_weight", layer.log_kernel_weight);
        } else {
          fn(prefix + "mesh_theta", layer.mesh_theta);
          fn(prefix + "mesh_phi", layer.mesh_phi);
        }
      } else {
        fn(prefix + "gamma_factor", layer.gamma_factor);
      }
      fn(prefix + "w_value", layer.w_value);
      fn(prefix + "ln1_gain", layer.ln1_gain);
      fn(prefix + "ln1_bias", layer.ln1_bias);
      fn(prefix + "ffn_w1", layer.ffn_w1);
      fn(prefix + "ffn_b1", layer.ffn_b1);
      if (!self.config.ffn_single_affine) {
        fn(prefix + "ffn_w2", layer.ffn_w2);
        fn(prefix + "ffn_b2", layer.ffn_b2);
      }
      fn(prefix + "ln2_gain", layer.ln2_gain);
      fn(prefix + "ln2_bias", layer.ln2_bias);
    }
    fn("head.weight", self.head_w);
    fn("head.bias", self.head_b);
  }

 public:
  /// Classical layers keep Gamma = M^T M positive semidefinite by
  /// construction; assert it anyway after every epoch.
  void check_epoch_invariants() const {
    if (config.attention != AttentionKind::kClassical) return;
    for (const auto& layer : layers) {
      const RealTensor gamma =
          matmul(transpose(layer.gamma_factor), layer.gamma_factor);
      const EighResult eig = eigh_symmetric(gamma);
      if (eig.eigenvalues(0) < -1e-10) {
        throw InternalError("Model: Gamma lost positive semidefiniteness");
      }
    }
  }
};

/// Encoder stack on a sequence that already carries positional encoding.
/// Per layer: o1 = attention(In); o2 = LayerNorm(In + o1); o3 = FFN(o2);
/// o4 = LayerNorm(o2 + o3). Mean-pool then linear head.
inline RealTensor encoder_forward(const RealTensor& in, const Model& model,
                                  SeededRng* rng = nullptr) {
  model.config.validate();
  if (in.rank() != 2 || in.cols() != model.config.dim) {
    throw ShapeError("encoder_forward: input must be n x dim");
  }
  RealTensor x = in;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const EncoderLayerParams& layer = model.layers[l];
    RealTensor o1;
    if (model.config.attention == AttentionKind::kPhotonic) {
      o1 = pgksam_forward(x, model.mesh(l), model.layer_kernel_config(l),
                          layer.w_value, rng);
    } else {
      o1 = gksam_forward(x, GksamParams{layer.gamma_factor, layer.w_value});
    }
    RealTensor sum1({x.rows(), x.cols()});
    for (std::size_t i = 0; i < x.size(); ++i) sum1[i] = x[i] + o1[i];
    const RealTensor o2 = layer_norm(sum1, layer.ln1_gain, layer.ln1_bias);

    const RealTensor o3 =
        model.config.ffn_single_affine
            ? ffn_single(o2, layer.ffn_w1, layer.ffn_b1)
            : ffn(o2, layer.ffn_w1, layer.ffn_b1, layer.ffn_w2, layer.ffn_b2);
    RealTensor sum2({o2.rows(), o2.cols()});
    for (std::size_t i = 0; i < o2.size(); ++i) sum2[i] = o2[i] + o3[i];
    x = layer_norm(sum2, layer.ln2_gain, layer.ln2_bias);
  }

  const std::size_t n = x.rows(), d = x.cols();
  RealTensor pooled({1, d});
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x(i, j);
    pooled(0, j) = acc / static_cast<double>(n);
  }
  RealTensor logits = matmul(pooled, model.head_w);
  for (std::size_t c = 0; c < logits.cols(); ++c) {
    logits(0, c) += model.head_b[c];
  }
  return RealTensor({model.config.classes}, logits.values());
}

/// Full inference path: add positional encoding, then run the encoder.
inline RealTensor forward_logits(const Model& model,
                                 const RealTensor& raw_tokens,
                                 SeededRng* rng = nullptr) {
  if (raw_tokens.rank() != 2 || raw_tokens.cols() != model.config.dim) {
    throw ShapeError("forward_logits: tokens must be n x dim");
  }
  const RealTensor pe =
      positional_encoding(raw_tokens.rows(), raw_tokens.cols());
  RealTensor in({raw_tokens.rows(), raw_tokens.cols()});
  for (std::size_t i = 0; i < in.size(); ++i) {
    in[i] = raw_tokens[i] + pe[i];
  }
  return encoder_forward(in, model, rng);
}

}  // namespace pgket::nn

#endif  // PGKET_MODEL_HPP_
