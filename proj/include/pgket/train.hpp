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

#ifndef PGKET_TRAIN_HPP_
#define PGKET_TRAIN_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pgket/autodiff.hpp"
#include "pgket/errors.hpp"
#include "pgket/graph.hpp"
#include "pgket/model.hpp"
#include "pgket/optim.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

namespace pgket::optim {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 0.009;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;
  bool shot_eval = false;      // evaluate with the shot-estimated forward
  bool shot_forward_train = false;  // shot-valued training forward, exact grads
  bool timing = true;          // false writes 0 in the seconds column

  void validate() const {
    if (epochs < 1 || batch_size < 1 || eval_every < 1) {
      throw ValidationError("TrainConfig: counts must be positive");
    }
    if (learning_rate <= 0.0) {
      throw ValidationError("TrainConfig: learning rate must be positive");
    }
  }
};

struct MetricsRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
  double seconds = 0.0;
};

struct Sample {
  RealTensor tokens;  // n x d
  std::size_t label = 0;
};

using Dataset = std::vector<Sample>;

inline std::size_t argmax(const RealTensor& logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

/// Mean loss and accuracy over a dataset. With `shot_rng`, the forward uses
/// the shot-estimated attention (one substream per sample).
inline std::pair<double, double> evaluate(const nn::Model& model,
                                          const Dataset& data,
                                          SeededRng* shot_rng = nullptr) {
  if (data.empty()) throw DataError("evaluate: dataset is empty");
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    SeededRng sample_rng(0);
    SeededRng* rng = nullptr;
    if (shot_rng != nullptr) {
      sample_rng = shot_rng->split(s);
      rng = &sample_rng;
    }
    const RealTensor logits = nn::forward_logits(model, data[s].tokens, rng);
    loss += cross_entropy(logits, data[s].label);
    if (argmax(logits) == data[s].label) ++correct;
  }
  return {loss / static_cast<double>(data.size()),
          static_cast<double>(correct) / static_cast<double>(data.size())};
}

/// Minibatch Adam training per the experiment protocol: every epoch shuffles
/// with a labeled substream, steps through all batches (the final short
/// batch included), then evaluates both splits. Deterministic for a given
/// (initial params, data, seed).
inline std::vector<MetricsRow> train(
    nn::Model& model, const Dataset& train_set, const Dataset& test_set,
    const TrainConfig& cfg,
    const std::function<void(const MetricsRow&)>& on_row = {}) {
  cfg.validate();
  if (train_set.empty() || test_set.empty()) {
    throw DataError("train: datasets must be non-empty");
  }

  SeededRng root(cfg.seed);
  AdamOptimizer optimizer(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
  std::vector<MetricsRow> rows;

  const bool kernel_shots =
      model.config.kernel.backend == kernel::ScoreBackend::kShots;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    SeededRng shuffle_rng = root.split("shuffle", epoch);
    shuffle_rng.shuffle(order);

    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + cfg.batch_size);
      const std::size_t batch = stop - start;

      std::vector<std::pair<std::string, RealTensor>> grad_sums;
      for (std::size_t k = start; k < stop; ++k) {
        const Sample& sample = train_set[order[k]];
        ad::Tape tape;
        SeededRng sample_rng(0);
        SeededRng* shot_rng = nullptr;
        if (kernel_shots && cfg.shot_forward_train) {
          sample_rng = root.split("train-shots", epoch).split(order[k]);
          shot_rng = &sample_rng;
        }
        const ad::ModelBindings bindings =
            ad::build_loss_graph(tape, model, sample.tokens, sample.label,
                                 shot_rng);
        tape.backward(bindings.loss);

        if (grad_sums.empty()) {
          for (const auto& [name, id] : bindings.params) {
            grad_sums.emplace_back(name, tape.grad(id));
          }
        } else {
          for (std::size_t p = 0; p < bindings.params.size(); ++p) {
            const RealTensor g = tape.grad(bindings.params[p].second);
            RealTensor& acc = grad_sums[p].second;
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
          }
        }
      }

      const double inv_batch = 1.0 / static_cast<double>(batch);
      for (auto& [name, grad] : grad_sums) {
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= inv_batch;
      }

      std::size_t p = 0;
      try {
        model.visit_params([&](const std::string& name, RealTensor& param) {
          optimizer.step(name, param, grad_sums[p].second);
          ++p;
        });
      } catch (const DivergenceError& e) {
        throw DivergenceError("epoch " + std::to_string(epoch) + ": " +
                              e.what());
      }
    }

    model.check_epoch_invariants();

    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      MetricsRow row;
      row.epoch = epoch;
      const bool shots = kernel_shots && cfg.shot_eval;
      SeededRng train_rng = root.split("eval-train", epoch);
      SeededRng test_rng = root.split("eval-test", epoch);
      std::tie(row.train_loss, row.train_acc) =
          evaluate(model, train_set, shots ? &train_rng : nullptr);
      std::tie(row.test_loss, row.test_acc) =
          evaluate(model, test_set, shots ? &test_rng : nullptr);
      if (cfg.timing) {
        row.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      }
      rows.push_back(row);
      if (on_row) on_row(row);
    }
  }
  return rows;
}

}  // namespace pgket::optim

#endif  // PGKET_TRAIN_HPP_
