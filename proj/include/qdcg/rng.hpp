// Copyright 2026 The qdcg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers. All Monte Carlo streams in the library are
// Philox4x32-10 blocks keyed by the 64-bit user seed; the counter words carry
// (sample index low, sample index high, stream id, sub-stream). Any draw can
// therefore be recomputed independently of scheduling.
namespace qdcg::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32_10(Counter counter, Key key) noexcept;

constexpr Key key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Maps 64 random bits to the open interval (0, 1): the top 52 bits plus half
// a step, so both ends stay exactly representable.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Two uniforms in (0, 1) from one Philox block.
std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t stream,
                                   std::uint32_t substream = 0) noexcept;

// Stream ids reserved by the library.
inline constexpr std::uint32_t kGraphSourceStreamBase = 0;  // + source ordinal
inline constexpr std::uint32_t kEulerMaruyamaStream = 0x45'4d'00'00;

}  // namespace qdcg::rng
