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

#ifndef PGKET_RNG_HPP_
#define PGKET_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pgket/errors.hpp"

namespace pgket {

/// Deterministic counter-based generator (splitmix64 core) with labeled
/// substream derivation.
///
/// Substreams split from a generator depend only on its seed and the label,
/// never on how much of the parent stream has been consumed. This is what
/// makes experiment stages (selection, noise, init, shuffling) independent
/// of one another and of evaluation order.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Caches the paired draw.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ValidationError("SeededRng::below: n must be positive");
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    std::uint64_t x = next_u64();
    while (x < threshold) x = next_u64();
    return x % n;
  }

  /// Poisson draw by Knuth's product method. Exact for the small means this
  /// library needs (per-mode coherent occupations).
  std::uint64_t poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) {
      throw ValidationError("SeededRng::poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Derive an independent substream from a string label.
  SeededRng split(std::string_view label) const {
    return SeededRng(mix(mix(seed_) ^ fnv1a(label)));
  }

  /// Derive an independent substream from up to two numeric labels
  /// (e.g. a score-matrix (i, j) pair or an epoch counter).
  SeededRng split(std::uint64_t a, std::uint64_t b = 0) const {
    std::uint64_t label = mix(a * 0x9e3779b97f4a7c15ULL + 1) ^ mix(b + 0x632be59bd9b4e019ULL);
    return SeededRng(mix(mix(seed_) ^ label));
  }

  SeededRng split(std::string_view label, std::uint64_t a) const {
    return split(label).split(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pgket

#endif  // PGKET_RNG_HPP_
