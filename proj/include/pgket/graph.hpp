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

#ifndef PGKET_GRAPH_HPP_
#define PGKET_GRAPH_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pgket/autodiff.hpp"
#include "pgket/model.hpp"
#include "pgket/nn.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Tape construction for the encoder classifier. The graph mirrors the pure
// inference path in model.hpp op for op, so tape values and inference values
// are bit-identical on the exact backend.

namespace pgket::ad {

struct ModelBindings {
  std::vector<std::pair<std::string, Tape::NodeId>> params;  // visit order
  Tape::NodeId tokens = Tape::kNoNode;
  Tape::NodeId logits = Tape::kNoNode;
  Tape::NodeId loss = Tape::kNoNode;
};

/// Builds loss(model, sample) on the tape and returns the parameter leaves
/// in the model's fixed visit order. `shot_rng` (with a shot-mode kernel
/// config) makes the attention *values* shot-estimated while gradients keep
/// flowing through the exact scores.
inline ModelBindings build_loss_graph(Tape& tape, const nn::Model& model,
                                      const RealTensor& raw_tokens,
                                      std::size_t label,
                                      SeededRng* shot_rng = nullptr) {
  model.config.validate();
  if (raw_tokens.rank() != 2 || raw_tokens.cols() != model.config.dim) {
    throw ShapeError("build_loss_graph: tokens must be n x dim");
  }

  ModelBindings bindings;
  std::map<std::string, Tape::NodeId> by_name;
  model.visit_params([&](const std::string& name, const RealTensor& value) {
    const Tape::NodeId id = tape.leaf(value);
    bindings.params.emplace_back(name, id);
    by_name[name] = id;
  });

  const RealTensor pe =
      nn::positional_encoding(raw_tokens.rows(), raw_tokens.cols());
  RealTensor in(raw_tokens.shape());
  for (std::size_t i = 0; i < in.size(); ++i) {
    in[i] = raw_tokens[i] + pe[i];
  }
  bindings.tokens = tape.leaf(in);

  Tape::NodeId x = bindings.tokens;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const nn::EncoderLayerParams& layer = model.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    const auto named = [&](const std::string& suffix) -> Tape::NodeId {
      const auto it = by_name.find(prefix + suffix);
      if (it != by_name.end()) return it->second;
      return Tape::kNoNode;
    };

    Tape::NodeId scores;
    if (model.config.attention == nn::AttentionKind::kPhotonic) {
      Tape::NodeId theta = named("mesh_theta");
      Tape::NodeId phi = named("mesh_phi");
      if (theta == Tape::kNoNode) theta = tape.leaf(layer.mesh_theta);
      if (phi == Tape::kNoNode) phi = tape.leaf(layer.mesh_phi);
      scores = tape.pgksam_scores(x, theta, phi, model.config.kernel,
                                  model.config.resolved_mesh_depth(),
                                  named("log_kernel_weight"), shot_rng);
    } else {
      scores = tape.gksam_scores(x, named("gamma_factor"));
    }
    const Tape::NodeId v = tape.matmul(x, named("w_value"));
    const Tape::NodeId o1 = tape.matmul(scores, v);
    const Tape::NodeId o2 = tape.layer_norm(tape.add(x, o1), named("ln1_gain"),
                                            named("ln1_bias"));

    Tape::NodeId o3;
    const Tape::NodeId pre = tape.add_row_broadcast(
        tape.matmul(o2, named("ffn_w1")), named("ffn_b1"));
    if (model.config.ffn_single_affine) {
      o3 = tape.relu(pre);
    } else {
      o3 = tape.add_row_broadcast(tape.matmul(tape.relu(pre), named("ffn_w2")),
                                  named("ffn_b2"));
    }
    x = tape.layer_norm(tape.add(o2, o3), named("ln2_gain"),
                        named("ln2_bias"));
  }

  const Tape::NodeId pooled = tape.mean_rows(x);
  bindings.logits = tape.add_row_broadcast(
      tape.matmul(pooled, by_name.at("head.weight")), by_name.at("head.bias"));
  bindings.loss = tape.cross_entropy(bindings.logits, label);
  return bindings;
}

}  // namespace pgket::ad

#endif  // PGKET_GRAPH_HPP_
