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

#include <doctest.h>

#include <set>

#include "dagrpo/rng.hpp"

using dagrpo::RngStream;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(dagrpo::philox4x32({0, 0, 0, 0}, {0, 0}) ==
        A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(dagrpo::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                           {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(dagrpo::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                           {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of seed, name and coordinates") {
  RngStream a(7, "response", 3, 4, 5);
  RngStream b(7, "response", 3, 4, 5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  std::set<std::uint64_t> firsts;
  firsts.insert(RngStream(7, "response", 3, 4, 5).next_u64());
  firsts.insert(RngStream(8, "response", 3, 4, 5).next_u64());
  firsts.insert(RngStream(7, "cloud", 3, 4, 5).next_u64());
  firsts.insert(RngStream(7, "response", 3, 4, 6).next_u64());
  firsts.insert(RngStream(7, "response", 4, 4, 5).next_u64());
  CHECK(firsts.size() == 5);
}

TEST_CASE("uniform, below and bernoulli stay in range") {
  RngStream r(1, "t");
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(r.below(7) < 7u);
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
  int hits = 0;
  for (int i = 0; i < 20000; ++i) hits += r.bernoulli(0.25);
  CHECK(hits / 20000.0 == doctest::Approx(0.25).epsilon(0.05));
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
}

TEST_CASE("below is unbiased over a non power of two") {
  RngStream r(3, "below");
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[r.below(3)];
  for (int c : counts) CHECK(c / 30000.0 == doctest::Approx(1.0 / 3).epsilon(0.05));
}
