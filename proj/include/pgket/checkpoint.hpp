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

#ifndef PGKET_CHECKPOINT_HPP_
#define PGKET_CHECKPOINT_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/tensor.hpp"

// Checkpoint container: a length-prefixed binary stream of named parameter
// tensors behind a 4-byte "PGKT" magic and a format version byte. All
// integers and scalar bit patterns are little-endian; values round-trip
// bit-exactly.
//
//   "PGKT" | u8 version | u32 record count
//   per record: u32 name length | name bytes | u32 rank | u64 extents...
//               | f64 row-major values...

namespace pgket::data {

constexpr char kCheckpointMagic[4] = {'P', 'G', 'K', 'T'};
constexpr std::uint8_t kCheckpointVersion = 1;

using NamedTensors = std::vector<std::pair<std::string, RealTensor>>;

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const unsigned char byte =
        static_cast<unsigned char>((value >> (8 * i)) & 0xff);
    out.put(static_cast<char>(byte));
  }
}

template <typename T>
T read_le(std::istream& in, const std::string& path, std::size_t* offset) {
  static_assert(std::is_integral_v<T>);
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int byte = in.get();
    if (byte == std::char_traits<char>::eof()) {
      throw FormatError(path + ": truncated at byte " +
                        std::to_string(*offset + i));
    }
    value |= static_cast<T>(static_cast<unsigned char>(byte)) << (8 * i);
  }
  *offset += sizeof(T);
  return value;
}

}  // namespace detail

inline void write_checkpoint(const std::filesystem::path& path,
                             const NamedTensors& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot open for write");
  out.write(kCheckpointMagic, 4);
  out.put(static_cast<char>(kCheckpointVersion));
  detail::write_le<std::uint32_t>(out,
                                  static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    detail::write_le<std::uint32_t>(out,
                                    static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::write_le<std::uint32_t>(
        out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t e : tensor.shape()) {
      detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(e));
    }
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      detail::write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(
                                               tensor[i]));
    }
  }
  if (!out) throw FormatError(path.string() + ": write failed");
}

inline NamedTensors read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::size_t offset = 0;

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad magic at byte 0");
  }
  offset += 4;
  const int version = in.get();
  if (version != kCheckpointVersion) {
    throw FormatError(path.string() + ": unsupported format version at byte 4");
  }
  offset += 1;

  const std::uint32_t count =
      detail::read_le<std::uint32_t>(in, path.string(), &offset);
  NamedTensors tensors;
  tensors.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    const std::uint32_t name_len =
        detail::read_le<std::uint32_t>(in, path.string(), &offset);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw FormatError(path.string() + ": truncated name at byte " +
                        std::to_string(offset));
    }
    offset += name_len;
    const std::uint32_t rank =
        detail::read_le<std::uint32_t>(in, path.string(), &offset);
    std::vector<std::size_t> shape(rank);
    for (std::uint32_t a = 0; a < rank; ++a) {
      shape[a] = static_cast<std::size_t>(
          detail::read_le<std::uint64_t>(in, path.string(), &offset));
    }
    RealTensor tensor(shape);
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      tensor[i] = std::bit_cast<double>(
          detail::read_le<std::uint64_t>(in, path.string(), &offset));
    }
    tensors.emplace_back(std::move(name), std::move(tensor));
  }
  return tensors;
}

}  // namespace pgket::data

#endif  // PGKET_CHECKPOINT_HPP_
