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

#ifndef ZONASH_RNG_HPP_
#define ZONASH_RNG_HPP_

#include <cmath>
#include <cstdint>

#include "zonash/common.hpp"

namespace zonash {

// Address of an independent random stream. Identical keys always reproduce
// identical draws, so concurrent runs never need to share generator state.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  std::uint64_t step = 0;
  std::uint64_t lane = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t x) {
  return mix64(h ^ (x * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
}

}  // namespace detail

// Counter-based generator over a splitmix64 stream. Cheap to construct, so
// a fresh instance per (seed, run, step, lane) key is the intended usage.
class KeyedRng {
 public:
  explicit KeyedRng(const RngKey& key) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    h = detail::absorb(h, key.seed);
    h = detail::absorb(h, key.run);
    h = detail::absorb(h, key.step);
    h = detail::absorb(h, key.lane);
    state_ = h;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. The spare half of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vector normal_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::uint64_t state_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zonash

#endif  // ZONASH_RNG_HPP_
