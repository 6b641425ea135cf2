// Copyright 2026 The zonash Authors.
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "zonash/rng.hpp"

using zonash::KeyedRng;
using zonash::RngKey;

TEST_CASE("identical keys reproduce identical streams") {
  KeyedRng a(RngKey{1, 2, 3, 4});
  KeyedRng b(RngKey{1, 2, 3, 4});
  for (int i = 0; i < 100; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
  }
  KeyedRng c(RngKey{1, 2, 3, 4});
  KeyedRng d(RngKey{1, 2, 3, 4});
  for (int i = 0; i < 100; ++i) {
    const double x = c.normal();
    const double y = d.normal();
    REQUIRE(x == y);
  }
}

TEST_CASE("distinct keys give distinct streams") {
  std::set<std::uint64_t> first_words;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    for (std::uint64_t lane = 0; lane < 8; ++lane) {
      KeyedRng rng(RngKey{seed, 0, 0, lane});
      first_words.insert(rng.next_u64());
    }
  }
  REQUIRE(first_words.size() == 32 * 8);
}

TEST_CASE("uniform01 stays in [0, 1) and uniform_pos in (0, 1]") {
  KeyedRng rng(RngKey{7, 0, 0, 0});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_pos();
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("normal draws have the right first two moments") {
  KeyedRng rng(RngKey{42, 0, 0, 0});
  const long n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  REQUIRE(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  REQUIRE(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("normal_vector fills the requested length") {
  KeyedRng rng(RngKey{0, 0, 0, 0});
  const auto v = rng.normal_vector(5);
  REQUIRE(v.size() == 5);
  REQUIRE(v.allFinite());
}
