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

#ifndef ZONASH_GAMES_HPP_
#define ZONASH_GAMES_HPP_

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zonash/common.hpp"
#include "zonash/geometry.hpp"
#include "zonash/rng.hpp"

namespace zonash {

// M(a) = B a + b. Kept alongside the callable form because several
// identities (exact smoothed gradient, spectral Lipschitz constant,
// closed-form equilibria) are only available for affine pseudo-gradients.
struct AffineStructure {
  Matrix B;
  Vector b;
};

// A convex game: N players, d decision variables each, cost functions
// defined on all of R^{Nd} (they are evaluated at unprojected Gaussian
// samples), and the stacked own-action gradient map with its strong
// monotonicity constant.
struct GameDefinition {
  int n_players = 0;
  int dim = 1;  // per player
  ProductSet action_sets;
  std::function<double(int, const Vector&)> cost;
  std::function<Vector(const Vector&)> pseudo_gradient;
  double nu = 0.0;         // strong monotonicity constant
  double lipschitz = 0.0;  // Lipschitz constant of the pseudo-gradient on A
  std::optional<AffineStructure> affine;
  std::string name;
  std::map<std::string, double> params;

  int joint_dim() const { return n_players * dim; }

  Vector player_block(const Vector& joint, int player) const {
    return joint.segment(player * dim, dim);
  }
};

struct AffineGameSpec {
  Matrix B;
  Vector b;
};

namespace detail {

inline double min_symmetric_eigenvalue(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  return solver.eigenvalues().minCoeff();
}

inline double spectral_norm(const Matrix& m) {
  return m.jacobiSvd().singularValues().maxCoeff();
}

}  // namespace detail

// Builds the quadratic-cost game whose pseudo-gradient is B a + b.
// Requires the symmetric part of B to be positive definite and each
// diagonal block to be symmetric (otherwise no cost function has that
// block as its own-action gradient).
inline GameDefinition make_affine_game(const AffineGameSpec& spec,
                                       ProductSet sets) {
  const int n = sets.num_factors();
  const int d = sets.factor_dim(0);
  for (int i = 1; i < n; ++i) {
    ZN_REQUIRE(sets.factor_dim(i) == d,
               "affine game: all players must share one dimension");
  }
  const int nd = n * d;
  ZN_REQUIRE(spec.B.rows() == nd && spec.B.cols() == nd,
             "affine game: B must be " + std::to_string(nd) + "x" +
                 std::to_string(nd));
  ZN_REQUIRE(spec.b.size() == nd, "affine game: b has wrong length");

  const double eig_min = detail::min_symmetric_eigenvalue(spec.B);
  ZN_REQUIRE(eig_min > 0.0,
             "affine game: symmetric part is not positive definite "
             "(min eigenvalue " +
                 std::to_string(eig_min) + ")");
  for (int i = 0; i < n; ++i) {
    const Matrix blk = spec.B.block(i * d, i * d, d, d);
    ZN_REQUIRE((blk - blk.transpose()).norm() <= 1e-12 * (1.0 + blk.norm()),
               "affine game: diagonal block " + std::to_string(i) +
                   " must be symmetric");
  }

  auto data = std::make_shared<AffineGameSpec>(spec);
  GameDefinition game{.n_players = n,
                      .dim = d,
                      .action_sets = std::move(sets),
                      .cost = {},
                      .pseudo_gradient = {},
                      .nu = eig_min,
                      .lipschitz = detail::spectral_norm(spec.B),
                      .affine = AffineStructure{spec.B, spec.b},
                      .name = "affine",
                      .params = {}};
  game.cost = [data, n, d](int player, const Vector& a) {
    ZN_REQUIRE(player >= 0 && player < n, "cost: player index out of range");
    ZN_REQUIRE(a.size() == static_cast<Eigen::Index>(n) * d,
               "cost: joint action has wrong dimension");
    const auto own = a.segment(player * d, d);
    // J_i(a) = 1/2 a_i' B_ii a_i + a_i' (sum_{j != i} B_ij a_j + b_i)
    double value =
        0.5 * own.dot(data->B.block(player * d, player * d, d, d) * own);
    Vector coupling = data->b.segment(player * d, d);
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      coupling += data->B.block(player * d, j * d, d, d) * a.segment(j * d, d);
    }
    return value + own.dot(coupling);
  };
  game.pseudo_gradient = [data, n, d](const Vector& a) -> Vector {
    ZN_REQUIRE(a.size() == static_cast<Eigen::Index>(n) * d,
               "pseudo_gradient: joint action has wrong dimension");
    return data->B * a + data->b;
  };
  return game;
}

// Two players on [0, 1] with costs
//   J_1(a) = a1^2 + a1 a2 - a1,   J_2(a) = a2^2 + a1 a2 - a2.
// The pseudo-gradient is (2a1 + a2 - 1, a1 + 2a2 - 1); the unique
// equilibrium (1/3, 1/3) is interior, which makes this the default
// instance for rate experiments.
inline GameDefinition make_canonical_quadratic() {
  Matrix B(2, 2);
  B << 2.0, 1.0, 1.0, 2.0;
  Vector b(2);
  b << -1.0, -1.0;
  Vector lo = Vector::Zero(1), hi = Vector::Ones(1);
  ProductSet sets({ConvexSet::box(lo, hi), ConvexSet::box(lo, hi)});
  GameDefinition game = make_affine_game({B, b}, std::move(sets));
  game.name = "canonical_quadratic";
  return game;
}

// Cournot oligopoly with linear inverse demand P - S * total quantity and
// constant unit costs:
//   J_i(a) = a_i (c_i - P + S sum_j a_j).
inline GameDefinition make_cournot(int n_players, double price_intercept,
                                   double price_slope,
                                   const Vector& unit_costs, double capacity) {
  ZN_REQUIRE(n_players >= 1, "cournot: need at least one player");
  ZN_REQUIRE(price_slope > 0.0, "cournot: price_slope must be positive");
  ZN_REQUIRE(unit_costs.size() == n_players,
             "cournot: unit_costs must have one entry per player");
  ZN_REQUIRE(capacity > 0.0, "cournot: capacity must be positive");
  for (int i = 0; i < n_players; ++i) {
    ZN_REQUIRE(unit_costs[i] < price_intercept,
               "cournot: unit cost of player " + std::to_string(i) +
                   " must be below the price intercept");
  }

  // M(a) = S (11' + I) a + (c - P 1), a symmetric affine map with
  // eigenvalues {S (N + 1), S, ..., S}.
  Matrix B = price_slope *
             (Matrix::Ones(n_players, n_players) +
              Matrix::Identity(n_players, n_players));
  Vector b = unit_costs - Vector::Constant(n_players, price_intercept);

  std::vector<ConvexSet> factors;
  factors.reserve(n_players);
  Vector lo = Vector::Zero(1);
  Vector hi = Vector::Constant(1, capacity);
  for (int i = 0; i < n_players; ++i) factors.push_back(ConvexSet::box(lo, hi));

  GameDefinition game = make_affine_game({B, b}, ProductSet(std::move(factors)));
  game.name = "cournot";
  game.params = {{"price_intercept", price_intercept},
                 {"price_slope", price_slope},
                 {"capacity", capacity}};
  // Closed forms: nu = S for N >= 2 (2S for a monopoly), L = S (N + 1).
  const double nu_closed =
      n_players >= 2 ? price_slope : 2.0 * price_slope;
  const double lip_closed = price_slope * (n_players + 1);
  ZN_REQUIRE(std::abs(game.nu - nu_closed) <= 1e-9 * nu_closed,
             "cournot: eigensolve disagrees with closed-form nu");
  game.nu = nu_closed;
  game.lipschitz = lip_closed;
  return game;
}

// All costs identically zero. Useful as an annihilation fixture: every
// gradient estimate vanishes and the learner state is a fixed point.
inline GameDefinition make_zero_game(ProductSet sets) {
  const int n = sets.num_factors();
  const int d = sets.factor_dim(0);
  const int nd = n * d;
  GameDefinition game{.n_players = n,
                      .dim = d,
                      .action_sets = std::move(sets),
                      .cost = [](int, const Vector&) { return 0.0; },
                      .pseudo_gradient =
                          [nd](const Vector&) { return Vector::Zero(nd); },
                      .nu = 0.0,
                      .lipschitz = 0.0,
                      .affine = AffineStructure{Matrix::Zero(nd, nd),
                                                Vector::Zero(nd)},
                      .name = "zero",
                      .params = {}};
  return game;
}

// Fault-injection helper: adds delta to one component of the
// pseudo-gradient while leaving the costs untouched.
inline GameDefinition corrupt_gradient(GameDefinition game, int component,
                                       double delta) {
  ZN_REQUIRE(component >= 0 && component < game.joint_dim(),
             "corrupt_gradient: component out of range");
  auto inner = game.pseudo_gradient;
  game.pseudo_gradient = [inner, component, delta](const Vector& a) {
    Vector m = inner(a);
    m[component] += delta;
    return m;
  };
  game.affine.reset();
  game.name += "_corrupted";
  return game;
}

struct GradientConsistencyReport {
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Central finite differences of each player's cost in their own
// coordinates against the declared pseudo-gradient. For polynomial costs
// of degree <= 2 the difference is exact up to rounding, so the 10 h^2
// tolerance is generous.
inline GradientConsistencyReport check_gradient_consistency(
    const GameDefinition& game, const std::vector<Vector>& points, double h) {
  ZN_REQUIRE(h > 0.0, "check_gradient_consistency: h must be positive");
  GradientConsistencyReport report;
  report.tolerance = 10.0 * h * h;
  for (const Vector& a : points) {
    const Vector m = game.pseudo_gradient(a);
    for (int i = 0; i < game.n_players; ++i) {
      for (int k = 0; k < game.dim; ++k) {
        const int idx = i * game.dim + k;
        Vector ap = a, am = a;
        ap[idx] += h;
        am[idx] -= h;
        const double fd = (game.cost(i, ap) - game.cost(i, am)) / (2.0 * h);
        report.max_abs_deviation =
            std::max(report.max_abs_deviation, std::abs(fd - m[idx]));
      }
    }
  }
  report.passed = report.max_abs_deviation <= report.tolerance;
  return report;
}

struct MonotonicityReport {
  double min_ratio = 0.0;
  double nu = 0.0;
  int n_pairs = 0;
  bool passed = false;
};

// Samples point pairs uniformly in the joint action set and reports the
// worst observed monotonicity ratio (M(x) - M(y), x - y) / |x - y|^2.
inline MonotonicityReport check_strong_monotonicity(const GameDefinition& game,
                                                    int n_pairs,
                                                    std::uint64_t rng_seed) {
  ZN_REQUIRE(n_pairs >= 1, "check_strong_monotonicity: n_pairs must be >= 1");
  KeyedRng rng(RngKey{rng_seed, 0, 0, /*lane=*/0x4d4f4e4f});
  MonotonicityReport report;
  report.nu = game.nu;
  report.n_pairs = n_pairs;
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (int p = 0; p < n_pairs; ++p) {
    const Vector x = game.action_sets.sample_uniform(rng);
    Vector y = game.action_sets.sample_uniform(rng);
    while ((x - y).squaredNorm() == 0.0) {
      y = game.action_sets.sample_uniform(rng);
    }
    const double ratio = (game.pseudo_gradient(x) - game.pseudo_gradient(y))
                             .dot(x - y) /
                         (x - y).squaredNorm();
    report.min_ratio = std::min(report.min_ratio, ratio);
  }
  report.passed = report.min_ratio >= game.nu - 1e-9;
  return report;
}

}  // namespace zonash

#endif  // ZONASH_GAMES_HPP_
