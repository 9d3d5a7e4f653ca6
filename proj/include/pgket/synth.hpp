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

#ifndef PGKET_SYNTH_HPP_
#define PGKET_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "pgket/data.hpp"
#include "pgket/rng.hpp"

// Synthetic MNIST-format fixture: ten geometric glyph classes on a 28x28
// grayscale canvas with per-sample shift, intensity and noise jitter. The
// harness ships no datasets, so tests and demo runs generate this corpus
// locally and write it through the IDX container.

namespace pgket::data::synth {

constexpr std::size_t kImageSide = 28;

namespace detail {

/// Base glyph intensity at (y, x) before jitter, in [0, 1].
inline double glyph(std::size_t cls, double y, double x) {
  const double cx = 13.5, cy = 13.5;
  const bool inside = x >= 4 && x <= 23 && y >= 4 && y <= 23;
  switch (cls % 10) {
    case 0: {  // filled disk
      const double r = std::hypot(x - cx, y - cy);
      return r <= 6.5 ? 1.0 : 0.0;
    }
    case 1:  // vertical bar
      return (std::abs(x - cx) <= 2.0 && y >= 4 && y <= 23) ? 1.0 : 0.0;
    case 2:  // two horizontal bars
      return ((std::abs(y - 8.5) <= 2.0 || std::abs(y - 18.5) <= 2.0) &&
              x >= 4 && x <= 23)
                 ? 1.0
                 : 0.0;
    case 3:  // main diagonal stripe
      return (inside && std::abs(x - y) <= 2.0) ? 1.0 : 0.0;
    case 4: {  // hollow frame
      if (!(x >= 5 && x <= 22 && y >= 5 && y <= 22)) return 0.0;
      const double edge = std::min(std::min(x - 5, 22 - x),
                                   std::min(y - 5, 22 - y));
      return edge <= 2.0 ? 1.0 : 0.0;
    }
    case 5:  // X cross
      return (inside &&
              (std::abs(x - y) <= 2.0 || std::abs(x + y - 27.0) <= 2.0))
                 ? 1.0
                 : 0.0;
    case 6: {  // corner blob
      const double r = std::hypot(x - 8.0, y - 8.0);
      return r <= 5.0 ? 1.0 : 0.0;
    }
    case 7:  // T shape
      return ((y >= 4 && y <= 8 && x >= 5 && x <= 22) ||
              (std::abs(x - cx) <= 2.0 && y > 8 && y <= 23))
                 ? 1.0
                 : 0.0;
    case 8: {  // coarse checkerboard
      const int bx = static_cast<int>(x) / 5;
      const int by = static_cast<int>(y) / 5;
      return ((bx + by) % 2 == 0 && inside) ? 0.9 : 0.0;
    }
    default:  // horizontal ramp
      return x / 27.0;
  }
}

}  // namespace detail

/// Deterministic synthetic dataset: `per_class` images for each of the first
/// `classes` glyphs, class-major order, with seeded shift / intensity /
/// noise jitter per sample.
inline RawDataset make_synthetic_digits(std::size_t per_class,
                                        std::size_t classes,
                                        std::uint64_t seed) {
  if (classes < 1 || classes > 10) {
    throw ValidationError("make_synthetic_digits: 1..10 classes");
  }
  RawDataset ds;
  ds.height = kImageSide;
  ds.width = kImageSide;
  ds.channels = 1;
  ds.declared_classes = classes;
  ds.count = per_class * classes;
  ds.pixels.resize(ds.count * kImageSide * kImageSide);
  ds.labels.resize(ds.count);

  SeededRng root(seed);
  std::size_t index = 0;
  for (std::size_t cls = 0; cls < classes; ++cls) {
    for (std::size_t s = 0; s < per_class; ++s, ++index) {
      SeededRng rng = root.split(cls, s);
      const double dx = std::floor(rng.uniform(-3.0, 4.0));
      const double dy = std::floor(rng.uniform(-3.0, 4.0));
      const double intensity = rng.uniform(0.7, 1.0);
      std::uint8_t* img = ds.pixels.data() + index * kImageSide * kImageSide;
      for (std::size_t y = 0; y < kImageSide; ++y) {
        for (std::size_t x = 0; x < kImageSide; ++x) {
          double v = intensity * detail::glyph(cls,
                                               static_cast<double>(y) - dy,
                                               static_cast<double>(x) - dx);
          v += 0.05 * rng.normal();
          v = std::clamp(v, 0.0, 1.0);
          img[y * kImageSide + x] =
              static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
      }
      ds.labels[index] = static_cast<std::uint8_t>(cls);
    }
  }
  return ds;
}

}  // namespace pgket::data::synth

#endif  // PGKET_SYNTH_HPP_
