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

#ifndef PGKET_OPTIM_HPP_
#define PGKET_OPTIM_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/tensor.hpp"

namespace pgket::optim {

/// -log softmax(logits)[label], stabilized by max subtraction.
inline double cross_entropy(const RealTensor& logits, std::size_t label) {
  const std::size_t k = logits.size();
  if (label >= k) throw ValidationError("cross_entropy: label out of range");
  double mx = logits[0];
  for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::exp(logits[i] - mx);
  return mx + std::log(sum) - logits[label];
}

struct AdamConfig {
  double learning_rate = 0.009;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  RealTensor m;  // first moment
  RealTensor v;  // second moment
  std::size_t step = 0;
};

/// Standard bias-corrected Adam update, in place.
inline void adam_step(RealTensor& param, const RealTensor& grad,
                      AdamState& state, const AdamConfig& cfg) {
  if (!param.same_shape(grad)) {
    throw ShapeError("adam_step: parameter/gradient shapes disagree");
  }
  if (!grad.all_finite()) {
    throw DivergenceError("adam_step: non-finite gradient");
  }
  if (state.step == 0) {
    state.m = RealTensor(param.shape());
    state.v = RealTensor(param.shape());
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

/// Named-parameter optimizer bundle.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(const std::string& name, RealTensor& param,
            const RealTensor& grad) {
    adam_step(param, grad, states_[name], cfg_);
  }

  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::map<std::string, AdamState> states_;
};

/// First 1-indexed epoch whose accuracy reaches `fraction` of the series
/// peak.
inline std::size_t convergence_epoch(const std::vector<double>& accuracy,
                                     double fraction = 0.95) {
  if (accuracy.empty()) {
    throw ValidationError("convergence_epoch: series must be non-empty");
  }
  double peak = accuracy[0];
  for (double a : accuracy) peak = std::max(peak, a);
  const double threshold = fraction * peak;
  for (std::size_t i = 0; i < accuracy.size(); ++i) {
    if (accuracy[i] >= threshold) return i + 1;
  }
  return accuracy.size();  // unreachable: the peak itself qualifies
}

}  // namespace pgket::optim

#endif  // PGKET_OPTIM_HPP_
