/*
 * Copyright 2026 The nbfeb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>

namespace nbfeb::util {

/// Index layout for stable-address tables that grow by doubling: chunk k
/// holds (1 << base_bits) << k entries, so a fresh table costs one small
/// chunk and 32 chunk pointers cover the whole 32-bit index space.
struct ChunkPos {
  std::size_t chunk;
  std::size_t offset;
};

constexpr std::size_t kMaxGeometricChunks = 32;

constexpr ChunkPos chunk_pos(std::uint32_t index, unsigned base_bits) noexcept {
  const std::uint64_t q = (std::uint64_t{index} >> base_bits) + 1;
  const auto k = static_cast<std::size_t>(std::bit_width(q) - 1);
  return {k, static_cast<std::size_t>(index - (((std::uint64_t{1} << k) - 1) << base_bits))};
}

constexpr std::size_t chunk_size(std::size_t chunk, unsigned base_bits) noexcept {
  return (std::size_t{1} << base_bits) << chunk;
}

}  // namespace nbfeb::util
