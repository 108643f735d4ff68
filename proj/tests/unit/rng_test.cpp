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

#include <cmath>
#include <set>

#include "doctest.h"
#include "qdcg/rng.hpp"

using namespace qdcg::rng;

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known answers") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
          Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("uniforms") {
    CHECK(to_open_unit(0) > 0);
    CHECK(to_open_unit(~std::uint64_t{0}) < 1);
    CHECK(key_from_seed(0x0123456789abcdefULL) == Key{0x89abcdefu, 0x01234567u});
    const auto a = uniform_pair(5, 10, 2);
    CHECK(a == uniform_pair(5, 10, 2));
    CHECK(a != uniform_pair(5, 10, 3));
    CHECK(a != uniform_pair(5, 11, 2));
    CHECK(a != uniform_pair(6, 10, 2));
    CHECK(a != uniform_pair(5, 10, 2, 1));
    // Moments of 2e5 draws.
    double s = 0, s2 = 0;
    const int count = 100000;
    for (int i = 0; i < count; ++i) {
      for (double u : uniform_pair(1, i, 0)) {
        CHECK(u > 0);
        CHECK(u < 1);
        s += u;
        s2 += u * u;
      }
    }
    const double mean = s / (2 * count);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.005));
    CHECK(s2 / (2 * count) - mean * mean == doctest::Approx(1.0 / 12).epsilon(0.01));
  }
}
