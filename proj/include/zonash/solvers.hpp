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

#ifndef ZONASH_SOLVERS_HPP_
#define ZONASH_SOLVERS_HPP_

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zonash/common.hpp"
#include "zonash/estimators.hpp"
#include "zonash/games.hpp"
#include "zonash/geometry.hpp"

namespace zonash {

struct VISolveResult {
  Vector point;
  double residual = 0.0;  // |Proj(x - theta M(x)) - x| at the returned point
  long iterations = 0;
  bool converged = false;
  std::vector<double> displacements;  // per-iteration step norms
};

// Projected fixed-point iteration x <- Proj_set(x - theta T(x)) with
// theta = nu / (2 L^2), started from the set anchor. For a nu-strongly
// monotone, L-Lipschitz mapping this contracts with factor
// sqrt(1 - nu^2 / (4 L^2)) per iteration, and its fixed points are exactly
// the solutions of the variational inequality on the set.
inline VISolveResult solve_vi_fixed_point(
    const std::function<Vector(const Vector&)>& mapping, const ProductSet& set,
    double lipschitz, double nu, double tol, long max_iter = 1000000) {
  ZN_REQUIRE(nu > 0.0, "solve_vi_fixed_point: nu must be positive");
  ZN_REQUIRE(lipschitz >= nu, "solve_vi_fixed_point: L >= nu required");
  ZN_REQUIRE(tol > 0.0, "solve_vi_fixed_point: tol must be positive");
  ZN_REQUIRE(max_iter >= 1, "solve_vi_fixed_point: max_iter must be >= 1");

  const double theta = nu / (2.0 * lipschitz * lipschitz);
  VISolveResult result;
  Vector x = set.anchor();
  for (long k = 0; k < max_iter; ++k) {
    const Vector next = set.project(x - theta * mapping(x));
    const double displacement = (next - x).norm();
    result.displacements.push_back(displacement);
    x = next;
    ++result.iterations;
    if (displacement <= tol) {
      result.converged = true;
      break;
    }
  }
  result.point = x;
  result.residual = (set.project(x - theta * mapping(x)) - x).norm();
  return result;
}

// Nash equilibrium of the game as the solution of VI(A, M).
inline VISolveResult solve_ne(const GameDefinition& game, double tol) {
  ZN_REQUIRE(game.nu > 0.0, "solve_ne: game must be strongly monotone");
  return solve_vi_fixed_point(game.pseudo_gradient, game.action_sets,
                              game.lipschitz, game.nu, tol);
}

// Solution of the variational inequality on the rho-shrunk set, with the
// mapping chosen by `sigma`:
//   sigma absent  -> the exact pseudo-gradient M,
//   sigma present -> the Gaussian-smoothed map. For affine M the smoothed
//                    map equals M identically; otherwise it is a common-
//                    random-numbers Monte Carlo average of M over
//                    mc_samples fixed Gaussian offsets, which keeps the
//                    mapping deterministic and strongly monotone. The
//                    solution then carries a sampling bias of roughly the
//                    average's standard error; pick mc_samples so that is
//                    below tol/10 (a soft guarantee, not checked).
inline VISolveResult solve_regularized_ne(const GameDefinition& game,
                                          double rho,
                                          std::optional<double> sigma,
                                          double tol, long mc_samples = 200000) {
  ZN_REQUIRE(game.nu > 0.0,
             "solve_regularized_ne: game must be strongly monotone");
  ZN_REQUIRE(rho >= 0.0 && rho < 1.0,
             "solve_regularized_ne: rho must lie in [0, 1)");
  const ProductSet shrunk = game.action_sets.shrink(rho);
  if (!sigma || game.affine) {
    return solve_vi_fixed_point(game.pseudo_gradient, shrunk, game.lipschitz,
                                game.nu, tol);
  }
  ZN_REQUIRE(*sigma > 0.0, "solve_regularized_ne: sigma must be positive");
  ZN_REQUIRE(mc_samples >= 1, "solve_regularized_ne: mc_samples must be >= 1");
  // Fixed offsets shared across evaluations: the averaged map inherits
  // strong monotonicity from M, so the contraction argument still applies.
  const int nd = game.joint_dim();
  KeyedRng rng(RngKey{0x534d4f4f54484544ULL, 0, 0, 0});
  std::vector<Vector> offsets;
  offsets.reserve(mc_samples);
  for (long j = 0; j < mc_samples; ++j) {
    offsets.push_back(*sigma * rng.normal_vector(nd));
  }
  auto smoothed = [&game, &offsets](const Vector& x) -> Vector {
    Vector acc = Vector::Zero(x.size());
    for (const Vector& z : offsets) acc += game.pseudo_gradient(x + z);
    return acc / static_cast<double>(offsets.size());
  };
  return solve_vi_fixed_point(smoothed, shrunk, game.lipschitz, game.nu, tol);
}

struct SigmaGapRow {
  double sigma = 0.0;
  double distance = 0.0;  // |mu*(sigma) - a*|
  double ratio = 0.0;     // distance / sigma (0 when sigma == 0)
};

struct RhoGapRow {
  double rho = 0.0;
  double distance = 0.0;  // |y(rho) - mu*|
  double ratio = 0.0;     // distance / rho (0 when rho == 0)
};

struct ReferenceGapTable {
  std::vector<SigmaGapRow> sigma_rows;
  std::vector<RhoGapRow> rho_rows;
};

// Distances between the reference sequences: smoothed solutions mu*(sigma)
// versus the equilibrium, and shrunk-set solutions y(rho) versus mu*.
inline ReferenceGapTable reference_gap_probe(const GameDefinition& game,
                                             const std::vector<double>& rho_list,
                                             const std::vector<double>& sigma_list,
                                             double tol) {
  ZN_REQUIRE(!rho_list.empty() && !sigma_list.empty(),
             "reference_gap_probe: lists must be non-empty");
  const Vector ne = solve_ne(game, tol).point;
  ReferenceGapTable table;
  for (double sigma : sigma_list) {
    std::optional<double> s;
    if (sigma > 0.0) s = sigma;
    const Vector mu_star = solve_regularized_ne(game, 0.0, s, tol).point;
    const double dist = (mu_star - ne).norm();
    table.sigma_rows.push_back(
        {sigma, dist, sigma > 0.0 ? dist / sigma : 0.0});
  }
  for (double rho : rho_list) {
    const Vector y = solve_regularized_ne(game, rho, std::nullopt, tol).point;
    const double dist = (y - ne).norm();
    table.rho_rows.push_back({rho, dist, rho > 0.0 ? dist / rho : 0.0});
  }
  return table;
}

}  // namespace zonash

#endif  // ZONASH_SOLVERS_HPP_
