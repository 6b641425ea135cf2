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

#ifndef ZONASH_CONFIG_HPP_
#define ZONASH_CONFIG_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zonash/common.hpp"
#include "zonash/estimators.hpp"
#include "zonash/games.hpp"
#include "zonash/geometry.hpp"
#include "zonash/learner.hpp"

namespace zonash {

using Json = nlohmann::json;

namespace detail {

inline Vector vector_from_json(const Json& j, const std::string& what) {
  ZN_REQUIRE(j.is_array(), what + " must be an array of numbers");
  Vector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    ZN_REQUIRE(j[k].is_number(), what + " must contain only numbers");
    v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return v;
}

inline Matrix matrix_from_json(const Json& j, const std::string& what) {
  ZN_REQUIRE(j.is_array() && !j.empty(), what + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    ZN_REQUIRE(j[r].is_array() && j[r].size() == cols,
               what + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace detail

// {"kind": "box", "lower": [...], "upper": [...]} or
// {"kind": "ball", "center": [...], "radius": r}, optional "anchor": [...].
inline ConvexSet set_from_json(const Json& j) {
  ZN_REQUIRE(j.is_object() && j.contains("kind"),
             "set spec must be an object with a \"kind\" key");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "box") {
    ZN_REQUIRE(j.contains("lower") && j.contains("upper"),
               "box spec needs \"lower\" and \"upper\"");
    Vector lo = detail::vector_from_json(j.at("lower"), "box lower");
    Vector hi = detail::vector_from_json(j.at("upper"), "box upper");
    if (j.contains("anchor")) {
      return ConvexSet::box(lo, hi,
                            detail::vector_from_json(j.at("anchor"), "anchor"));
    }
    return ConvexSet::box(lo, hi);
  }
  if (kind == "ball") {
    ZN_REQUIRE(j.contains("center") && j.contains("radius"),
               "ball spec needs \"center\" and \"radius\"");
    Vector c = detail::vector_from_json(j.at("center"), "ball center");
    const double r = j.at("radius").get<double>();
    if (j.contains("anchor")) {
      return ConvexSet::ball(c, r,
                             detail::vector_from_json(j.at("anchor"), "anchor"));
    }
    return ConvexSet::ball(c, r);
  }
  throw ContractViolation("unknown set kind \"" + kind + "\"");
}

// Game spec fragment. Supported families:
//   {"game": "canonical_quadratic"}
//   {"game": "affine", "B": [[...]], "b": [...], "sets": [set, ...]}
//   {"game": "cournot", "n": N, "price_intercept": P, "price_slope": S,
//    "unit_costs": [...], "capacity": C}
inline GameDefinition game_from_json(const Json& j) {
  ZN_REQUIRE(j.is_object() && j.contains("game"),
             "game spec must be an object with a \"game\" key");
  const std::string family = j.at("game").get<std::string>();
  if (family == "canonical_quadratic") {
    return make_canonical_quadratic();
  }
  if (family == "affine") {
    ZN_REQUIRE(j.contains("B") && j.contains("b") && j.contains("sets"),
               "affine game spec needs \"B\", \"b\" and \"sets\"");
    AffineGameSpec spec{detail::matrix_from_json(j.at("B"), "B"),
                        detail::vector_from_json(j.at("b"), "b")};
    std::vector<ConvexSet> factors;
    for (const Json& sj : j.at("sets")) factors.push_back(set_from_json(sj));
    return make_affine_game(spec, ProductSet(std::move(factors)));
  }
  if (family == "cournot") {
    ZN_REQUIRE(j.contains("n") && j.contains("price_intercept") &&
                   j.contains("price_slope") && j.contains("unit_costs") &&
                   j.contains("capacity"),
               "cournot spec needs n, price_intercept, price_slope, "
               "unit_costs and capacity");
    return make_cournot(j.at("n").get<int>(),
                        j.at("price_intercept").get<double>(),
                        j.at("price_slope").get<double>(),
                        detail::vector_from_json(j.at("unit_costs"),
                                                 "unit_costs"),
                        j.at("capacity").get<double>());
  }
  throw ContractViolation("unknown game family \"" + family + "\"");
}

inline EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "one_point") return EstimatorKind::kOnePoint;
  if (s == "two_point") return EstimatorKind::kTwoPoint;
  throw ContractViolation("estimator must be \"one_point\" or \"two_point\"");
}

// {"mode": "theorem1"|"theorem2", "nu_override"?, "a"?, "epsilon"?,
//  "b"?, "c"?, "r"?, "s"?, "rho_max"?}. nu defaults to the game's constant.
inline Schedule schedule_from_json(const Json& j, double game_nu) {
  ZN_REQUIRE(j.is_object() && j.contains("mode"),
             "schedule spec must be an object with a \"mode\" key");
  const double nu = j.contains("nu_override")
                        ? j.at("nu_override").get<double>()
                        : game_nu;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "theorem1") {
    Theorem1Params p;
    if (j.contains("a")) p.a = j.at("a").get<double>();
    if (j.contains("epsilon")) p.epsilon = j.at("epsilon").get<double>();
    if (j.contains("rho_max")) p.rho_max = j.at("rho_max").get<double>();
    return Schedule::theorem1(nu, p);
  }
  if (mode == "theorem2") {
    Theorem2Params p;
    if (j.contains("b")) p.b = j.at("b").get<double>();
    if (j.contains("c")) p.c = j.at("c").get<double>();
    if (j.contains("r")) p.r = j.at("r").get<double>();
    if (j.contains("s")) p.s = j.at("s").get<double>();
    if (j.contains("rho_max")) p.rho_max = j.at("rho_max").get<double>();
    return Schedule::theorem2(nu, p);
  }
  throw ContractViolation("schedule mode must be \"theorem1\" or \"theorem2\"");
}

}  // namespace zonash

#endif  // ZONASH_CONFIG_HPP_
