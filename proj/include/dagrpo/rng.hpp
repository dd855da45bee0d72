// Copyright 2026 The dagrpo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dagrpo {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// A named, counter-addressed random substream.
//
// The key is derived from (seed, name); the 128-bit Philox counter is
// (draw, a, b, c) where a/b/c are caller-chosen coordinates such as
// (response, slot, iteration). Every value drawn is therefore a pure
// function of (seed, name, a, b, c, draw index), independent of which
// thread draws it or in what order streams are visited.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view name, std::uint32_t a = 0,
            std::uint32_t b = 0, std::uint32_t c = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint32_t below(std::uint32_t n);
  // True with probability p.
  bool bernoulli(double p) { return uniform() < p; }

  std::uint32_t draws() const { return draw_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t a_, b_, c_;
  std::uint32_t draw_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
};

}  // namespace dagrpo
