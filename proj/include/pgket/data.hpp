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

#ifndef PGKET_DATA_HPP_
#define PGKET_DATA_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/linalg.hpp"
#include "pgket/rng.hpp"
#include "pgket/tensor.hpp"

// Dataset ingestion and preprocessing: IDX and CIFAR-10 binary containers,
// per-class subset selection, pixel-space Gaussian noise, and per-region
// PCA compression to the qumode dimension.

namespace pgket::data {

struct RawDataset {
  std::size_t count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::size_t declared_classes = 10;
  std::vector<std::uint8_t> pixels;  // count * height * width * channels
  std::vector<std::uint8_t> labels;  // count

  std::size_t pixels_per_image() const { return height * width * channels; }

  const std::uint8_t* image(std::size_t i) const {
    return pixels.data() + i * pixels_per_image();
  }

  void validate() const {
    if (labels.size() != count ||
        pixels.size() != count * pixels_per_image()) {
      throw DataError("RawDataset: extents disagree");
    }
    for (std::uint8_t label : labels) {
      if (label >= declared_classes) {
        throw DataError("RawDataset: label exceeds declared class count");
      }
    }
  }
};

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path,
                               std::size_t offset) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw FormatError(path + ": truncated at byte " + std::to_string(offset));
  }
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> b{
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

}  // namespace detail

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Parses the big-endian IDX pair used by the MNIST family of datasets.
inline RawDataset load_idx(const std::filesystem::path& images_path,
                           const std::filesystem::path& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw FormatError(images_path.string() + ": cannot open");
  const std::uint32_t image_magic =
      detail::read_be32(img, images_path.string(), 0);
  if (image_magic != kIdxImageMagic) {
    throw FormatError(images_path.string() +
                      ": bad image magic at byte 0 (expected 0x00000803)");
  }
  RawDataset ds;
  ds.count = detail::read_be32(img, images_path.string(), 4);
  ds.height = detail::read_be32(img, images_path.string(), 8);
  ds.width = detail::read_be32(img, images_path.string(), 12);
  ds.channels = 1;
  ds.pixels.resize(ds.count * ds.height * ds.width);
  if (!img.read(reinterpret_cast<char*>(ds.pixels.data()),
                static_cast<std::streamsize>(ds.pixels.size()))) {
    throw FormatError(images_path.string() + ": truncated pixel payload at byte " +
                      std::to_string(16 + img.gcount()));
  }

  std::ifstream lbl(labels_path, std::ios::binary);
  if (!lbl) throw FormatError(labels_path.string() + ": cannot open");
  const std::uint32_t label_magic =
      detail::read_be32(lbl, labels_path.string(), 0);
  if (label_magic != kIdxLabelMagic) {
    throw FormatError(labels_path.string() +
                      ": bad label magic at byte 0 (expected 0x00000801)");
  }
  const std::uint32_t label_count =
      detail::read_be32(lbl, labels_path.string(), 4);
  if (label_count != ds.count) {
    throw FormatError(labels_path.string() +
                      ": label count does not match image count");
  }
  ds.labels.resize(ds.count);
  if (!lbl.read(reinterpret_cast<char*>(ds.labels.data()),
                static_cast<std::streamsize>(ds.labels.size()))) {
    throw FormatError(labels_path.string() + ": truncated label payload at byte " +
                      std::to_string(8 + lbl.gcount()));
  }
  ds.validate();
  return ds;
}

/// Writes the IDX pair back out; load_idx(write_idx(ds)) round-trips the
/// bytes exactly.
inline void write_idx(const RawDataset& ds,
                      const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path) {
  if (ds.channels != 1) {
    throw ValidationError("write_idx: IDX images are single-channel");
  }
  std::ofstream img(images_path, std::ios::binary);
  if (!img) throw FormatError(images_path.string() + ": cannot open for write");
  detail::write_be32(img, kIdxImageMagic);
  detail::write_be32(img, static_cast<std::uint32_t>(ds.count));
  detail::write_be32(img, static_cast<std::uint32_t>(ds.height));
  detail::write_be32(img, static_cast<std::uint32_t>(ds.width));
  img.write(reinterpret_cast<const char*>(ds.pixels.data()),
            static_cast<std::streamsize>(ds.pixels.size()));

  std::ofstream lbl(labels_path, std::ios::binary);
  if (!lbl) throw FormatError(labels_path.string() + ": cannot open for write");
  detail::write_be32(lbl, kIdxLabelMagic);
  detail::write_be32(lbl, static_cast<std::uint32_t>(ds.count));
  lbl.write(reinterpret_cast<const char*>(ds.labels.data()),
            static_cast<std::streamsize>(ds.labels.size()));
}

constexpr std::size_t kCifarRecordBytes = 3073;  // 1 label + 3x1024 planes

/// Reads CIFAR-10 binary batches: every record is one label byte followed by
/// channel-planar 32x32 RGB pixels (converted here to interleaved HWC).
/// Accepts a single .bin file or a directory holding data_batch_*.bin /
/// test_batch.bin.
inline RawDataset load_cifar10_bin(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (int i = 1; i <= 5; ++i) {
      const auto f = path / ("data_batch_" + std::to_string(i) + ".bin");
      if (std::filesystem::exists(f)) files.push_back(f);
    }
    const auto t = path / "test_batch.bin";
    if (std::filesystem::exists(t)) files.push_back(t);
    if (files.empty()) {
      throw FormatError(path.string() + ": no CIFAR-10 batch files found");
    }
  } else {
    files.push_back(path);
  }

  RawDataset ds;
  ds.height = 32;
  ds.width = 32;
  ds.channels = 3;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw FormatError(file.string() + ": cannot open");
    in.seekg(0, std::ios::end);
    const std::size_t bytes = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    if (bytes == 0 || bytes % kCifarRecordBytes != 0) {
      throw FormatError(file.string() +
                        ": size is not a multiple of the 3073-byte record");
    }
    const std::size_t records = bytes / kCifarRecordBytes;
    std::vector<std::uint8_t> buffer(kCifarRecordBytes);
    for (std::size_t r = 0; r < records; ++r) {
      if (!in.read(reinterpret_cast<char*>(buffer.data()),
                   kCifarRecordBytes)) {
        throw FormatError(file.string() + ": truncated record at byte " +
                          std::to_string(r * kCifarRecordBytes));
      }
      ds.labels.push_back(buffer[0]);
      const std::size_t base = ds.pixels.size();
      ds.pixels.resize(base + 32 * 32 * 3);
      for (std::size_t p = 0; p < 1024; ++p) {
        ds.pixels[base + 3 * p + 0] = buffer[1 + p];
        ds.pixels[base + 3 * p + 1] = buffer[1 + 1024 + p];
        ds.pixels[base + 3 * p + 2] = buffer[1 + 2048 + p];
      }
    }
  }
  ds.count = ds.labels.size();
  ds.validate();
  return ds;
}

/// Seeded per-class subset selection: keeps the first `classes` labels and
/// draws `per_train` + `per_test` distinct images from each, disjointly.
inline std::pair<RawDataset, RawDataset> select_classes(
    const RawDataset& ds, std::size_t classes, std::size_t per_train,
    std::size_t per_test, SeededRng rng) {
  ds.validate();
  if (classes < 1 || classes > ds.declared_classes) {
    throw ValidationError("select_classes: class count out of range");
  }

  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < ds.count; ++i) {
    if (ds.labels[i] < classes) by_class[ds.labels[i]].push_back(i);
  }

  const auto subset_like = [&ds](std::size_t reserve) {
    RawDataset out;
    out.height = ds.height;
    out.width = ds.width;
    out.channels = ds.channels;
    out.declared_classes = ds.declared_classes;
    out.pixels.reserve(reserve * ds.pixels_per_image());
    return out;
  };
  RawDataset train = subset_like(classes * per_train);
  RawDataset test = subset_like(classes * per_test);

  const auto append = [&ds](RawDataset& out, std::size_t index) {
    const std::uint8_t* img = ds.image(index);
    out.pixels.insert(out.pixels.end(), img, img + ds.pixels_per_image());
    out.labels.push_back(ds.labels[index]);
    ++out.count;
  };

  for (std::size_t c = 0; c < classes; ++c) {
    auto& pool = by_class[c];
    if (pool.size() < per_train + per_test) {
      throw DataError("select_classes: class " + std::to_string(c) +
                      " has only " + std::to_string(pool.size()) +
                      " samples, need " +
                      std::to_string(per_train + per_test));
    }
    SeededRng class_rng = rng.split("class", c);
    class_rng.shuffle(pool);
    for (std::size_t k = 0; k < per_train; ++k) append(train, pool[k]);
    for (std::size_t k = 0; k < per_test; ++k) {
      append(test, pool[per_train + k]);
    }
  }
  return {std::move(train), std::move(test)};
}

/// Images on the [0, 1] scale; the pipeline works in this representation
/// from normalization onward.
struct FloatImages {
  std::size_t count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<double> values;

  std::size_t pixels_per_image() const { return height * width * channels; }
  double* image(std::size_t i) { return values.data() + i * pixels_per_image(); }
  const double* image(std::size_t i) const {
    return values.data() + i * pixels_per_image();
  }
};

inline FloatImages to_unit_floats(const RawDataset& ds) {
  FloatImages out;
  out.count = ds.count;
  out.height = ds.height;
  out.width = ds.width;
  out.channels = ds.channels;
  out.values.resize(ds.pixels.size());
  for (std::size_t i = 0; i < ds.pixels.size(); ++i) {
    out.values[i] = static_cast<double>(ds.pixels[i]) / 255.0;
  }
  return out;
}

/// One pre-clamp noisy draw on the unit scale: value + N(0, sigma^2).
inline double noisy_pixel(double value, double sigma, SeededRng& rng) {
  return value + sigma * rng.normal();
}

/// Pixel-space Gaussian noise on unit-scale images, clamped to [0, 1] unless
/// disabled.
inline void add_gaussian_noise(FloatImages& images, double sigma,
                               SeededRng& rng, bool clamp = true) {
  if (sigma < 0.0) throw ValidationError("add_gaussian_noise: sigma >= 0");
  if (sigma == 0.0) return;
  for (double& v : images.values) {
    v = noisy_pixel(v, sigma, rng);
    if (clamp) v = std::clamp(v, 0.0, 1.0);
  }
}

/// 8-bit noisy copy: unit scale, plus noise, clamp, requantize.
inline RawDataset add_gaussian_noise(const RawDataset& ds, double sigma,
                                     std::uint64_t seed) {
  if (sigma < 0.0) throw ValidationError("add_gaussian_noise: sigma >= 0");
  RawDataset out = ds;
  if (sigma == 0.0) return out;
  SeededRng rng(seed);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double unit = static_cast<double>(ds.pixels[i]) / 255.0;
    const double noisy = std::clamp(noisy_pixel(unit, sigma, rng), 0.0, 1.0);
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(noisy * 255.0));
  }
  return out;
}

/// Token regioning: each image splits into a g x g grid of equal spatial
/// regions, one token per region.
enum class TokenScheme : std::size_t {
  kWhole = 1,      // single token from the full image
  kQuadrants = 4,  // 2 x 2 grid
  kGrid16 = 16,    // 4 x 4 grid
};

inline std::size_t token_grid(TokenScheme scheme) {
  switch (scheme) {
    case TokenScheme::kWhole: return 1;
    case TokenScheme::kQuadrants: return 2;
    case TokenScheme::kGrid16: return 4;
  }
  throw ValidationError("token_grid: unknown scheme");
}

inline TokenScheme token_scheme_from_count(std::size_t n) {
  switch (n) {
    case 1: return TokenScheme::kWhole;
    case 4: return TokenScheme::kQuadrants;
    case 16: return TokenScheme::kGrid16;
  }
  throw ValidationError("token scheme must be 1, 4 or 16 tokens");
}

/// Per-region PCA basis fitted on the training split only.
struct PcaModel {
  struct Region {
    RealTensor mean;        // region pixel count
    RealTensor components;  // pixels x out_dim, orthonormal columns
  };
  TokenScheme scheme = TokenScheme::kQuadrants;
  std::size_t height = 0, width = 0, channels = 0;
  std::size_t out_dim = 16;
  std::vector<Region> regions;  // row-major over the grid

  std::size_t tokens_per_image() const { return regions.size(); }
};

namespace detail {

/// Pixel values of one grid region, flattened row-major.
inline void extract_region(const FloatImages& images, std::size_t image,
                           std::size_t grid, std::size_t gy, std::size_t gx,
                           std::vector<double>& out) {
  const std::size_t rh = images.height / grid;
  const std::size_t rw = images.width / grid;
  const std::size_t c = images.channels;
  const double* img = images.image(image);
  out.resize(rh * rw * c);
  std::size_t k = 0;
  for (std::size_t y = 0; y < rh; ++y) {
    const std::size_t iy = gy * rh + y;
    for (std::size_t x = 0; x < rw; ++x) {
      const std::size_t ix = gx * rw + x;
      for (std::size_t ch = 0; ch < c; ++ch) {
        out[k++] = img[(iy * images.width + ix) * c + ch];
      }
    }
  }
}

}  // namespace detail

/// Fits one PCA basis per token region: center, eigendecompose the
/// covariance, keep the top out_dim eigenvectors in descending eigenvalue
/// order. Each component's largest-magnitude entry is made positive, so the
/// basis is deterministic.
inline PcaModel pca_fit(const FloatImages& train, TokenScheme scheme,
                        std::size_t out_dim = 16) {
  const std::size_t grid = token_grid(scheme);
  if (train.height % grid != 0 || train.width % grid != 0) {
    throw ValidationError("pca_fit: image extents not divisible by the grid");
  }
  if (train.count < out_dim + 1) {
    throw DataError("pca_fit: need more training samples than components");
  }
  const std::size_t region_pixels =
      (train.height / grid) * (train.width / grid) * train.channels;
  if (out_dim > region_pixels) {
    throw ValidationError("pca_fit: out_dim exceeds region pixel count");
  }

  PcaModel model;
  model.scheme = scheme;
  model.height = train.height;
  model.width = train.width;
  model.channels = train.channels;
  model.out_dim = out_dim;

  std::vector<double> region;
  for (std::size_t gy = 0; gy < grid; ++gy) {
    for (std::size_t gx = 0; gx < grid; ++gx) {
      RealTensor mean({region_pixels});
      for (std::size_t i = 0; i < train.count; ++i) {
        detail::extract_region(train, i, grid, gy, gx, region);
        for (std::size_t p = 0; p < region_pixels; ++p) mean[p] += region[p];
      }
      for (std::size_t p = 0; p < region_pixels; ++p) {
        mean[p] /= static_cast<double>(train.count);
      }

      RealTensor cov({region_pixels, region_pixels});
      for (std::size_t i = 0; i < train.count; ++i) {
        detail::extract_region(train, i, grid, gy, gx, region);
        for (std::size_t p = 0; p < region_pixels; ++p) {
          region[p] -= mean[p];
        }
        for (std::size_t p = 0; p < region_pixels; ++p) {
          const double rp = region[p];
          if (rp == 0.0) continue;
          for (std::size_t q = p; q < region_pixels; ++q) {
            cov(p, q) += rp * region[q];
          }
        }
      }
      const double inv = 1.0 / static_cast<double>(train.count - 1);
      for (std::size_t p = 0; p < region_pixels; ++p) {
        for (std::size_t q = p; q < region_pixels; ++q) {
          cov(p, q) *= inv;
          cov(q, p) = cov(p, q);
        }
      }

      const EighResult eig = eigh_symmetric(cov);
      RealTensor components({region_pixels, out_dim});
      for (std::size_t j = 0; j < out_dim; ++j) {
        // Eigenvalues come back ascending; take from the top.
        const std::size_t src = region_pixels - 1 - j;
        std::size_t peak = 0;
        for (std::size_t p = 1; p < region_pixels; ++p) {
          if (std::abs(eig.eigenvectors(p, src)) >
              std::abs(eig.eigenvectors(peak, src))) {
            peak = p;
          }
        }
        const double sign = eig.eigenvectors(peak, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t p = 0; p < region_pixels; ++p) {
          components(p, j) = sign * eig.eigenvectors(p, src);
        }
      }
      model.regions.push_back(
          PcaModel::Region{std::move(mean), std::move(components)});
    }
  }
  return model;
}

/// Projects every image to its token matrix (tokens_per_image x out_dim).
inline std::vector<RealTensor> pca_transform(const PcaModel& model,
                                             const FloatImages& images) {
  if (images.height != model.height || images.width != model.width ||
      images.channels != model.channels) {
    throw ShapeError("pca_transform: image geometry does not match the model");
  }
  const std::size_t grid = token_grid(model.scheme);
  const std::size_t n = model.tokens_per_image();
  std::vector<RealTensor> out;
  out.reserve(images.count);
  std::vector<double> region;
  for (std::size_t i = 0; i < images.count; ++i) {
    RealTensor tokens({n, model.out_dim});
    std::size_t t = 0;
    for (std::size_t gy = 0; gy < grid; ++gy) {
      for (std::size_t gx = 0; gx < grid; ++gx, ++t) {
        const PcaModel::Region& reg = model.regions[t];
        detail::extract_region(images, i, grid, gy, gx, region);
        for (std::size_t p = 0; p < region.size(); ++p) {
          region[p] -= reg.mean[p];
        }
        for (std::size_t j = 0; j < model.out_dim; ++j) {
          double acc = 0.0;
          for (std::size_t p = 0; p < region.size(); ++p) {
            acc += region[p] * reg.components(p, j);
          }
          tokens(t, j) = acc;
        }
      }
    }
    out.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace pgket::data

#endif  // PGKET_DATA_HPP_
