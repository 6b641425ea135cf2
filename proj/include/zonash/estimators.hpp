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

#ifndef ZONASH_ESTIMATORS_HPP_
#define ZONASH_ESTIMATORS_HPP_

#include <cmath>
#include <string>

#include "zonash/common.hpp"
#include "zonash/games.hpp"
#include "zonash/geometry.hpp"
#include "zonash/rng.hpp"

namespace zonash {

enum class EstimatorKind { kOnePoint, kTwoPoint };

inline std::string to_string(EstimatorKind kind) {
  return kind == EstimatorKind::kOnePoint ? "one_point" : "two_point";
}

// Per-player stacked gradient estimate produced by one learner iteration.
struct GradientEstimate {
  Vector stacked;  // length N * d
  EstimatorKind kind = EstimatorKind::kOnePoint;
};

// Draws xi ~ N(mu, sigma^2 I). Deterministic given the key.
inline Vector sample_state_perturbation(const Vector& mu, double sigma,
                                        const RngKey& key) {
  ZN_REQUIRE(sigma > 0.0, "sample_state_perturbation: sigma must be positive");
  KeyedRng rng(key);
  return mu + sigma * rng.normal_vector(static_cast<int>(mu.size()));
}

// payoff * (xi - mu) / sigma^2. Gradient estimate from a single payoff
// observation; its second moment grows like 1/sigma^2.
inline Vector one_point_estimate(double payoff, const Vector& xi_i,
                                 const Vector& mu_i, double sigma) {
  ZN_REQUIRE(sigma > 0.0, "one_point_estimate: sigma must be positive");
  ZN_REQUIRE(xi_i.size() == mu_i.size(),
             "one_point_estimate: xi/mu dimensions differ");
  if (!std::isfinite(payoff)) {
    throw NumericalError("one_point_estimate: non-finite payoff " +
                         std::to_string(payoff));
  }
  return payoff * (xi_i - mu_i) / (sigma * sigma);
}

// (payoff(action) - payoff(state)) * (xi - mu) / sigma^2. Requires a second
// payoff observation at the current state; second moment stays bounded as
// sigma shrinks.
inline Vector two_point_estimate(double payoff_at_action,
                                 double payoff_at_state, const Vector& xi_i,
                                 const Vector& mu_i, double sigma) {
  ZN_REQUIRE(sigma > 0.0, "two_point_estimate: sigma must be positive");
  ZN_REQUIRE(xi_i.size() == mu_i.size(),
             "two_point_estimate: xi/mu dimensions differ");
  if (!std::isfinite(payoff_at_action) || !std::isfinite(payoff_at_state)) {
    throw NumericalError("two_point_estimate: non-finite payoff pair (" +
                         std::to_string(payoff_at_action) + ", " +
                         std::to_string(payoff_at_state) + ")");
  }
  return (payoff_at_action - payoff_at_state) * (xi_i - mu_i) /
         (sigma * sigma);
}

struct McGradientEstimate {
  Vector estimate;   // Monte Carlo mean of M(xi)
  Vector std_error;  // per-coordinate standard error of that mean
  long n_samples = 0;
};

// Monte Carlo estimate of the Gaussian-smoothed pseudo-gradient
//   mu -> E[M(xi)], xi ~ N(mu, sigma^2 I).
// This is the reference oracle for every smoothed-gradient diagnostic.
// For affine M the smoothed map coincides with M itself, which gives an
// exact cross-check.
inline McGradientEstimate smoothed_pseudo_gradient_mc(
    const GameDefinition& game, const Vector& mu, double sigma, long n_samples,
    const RngKey& key) {
  ZN_REQUIRE(sigma > 0.0, "smoothed_pseudo_gradient_mc: sigma must be positive");
  ZN_REQUIRE(n_samples >= 1,
             "smoothed_pseudo_gradient_mc: n_samples must be >= 1");
  const int nd = static_cast<int>(mu.size());
  KeyedRng rng(key);
  Vector mean = Vector::Zero(nd);
  Vector m2 = Vector::Zero(nd);  // running sum of squared deviations
  for (long j = 1; j <= n_samples; ++j) {
    const Vector xi = mu + sigma * rng.normal_vector(nd);
    const Vector m = game.pseudo_gradient(xi);
    const Vector delta = m - mean;
    mean += delta / static_cast<double>(j);
    m2 += delta.cwiseProduct(m - mean);
  }
  Vector stderr_vec = Vector::Zero(nd);
  if (n_samples > 1) {
    stderr_vec =
        (m2 / (static_cast<double>(n_samples) *
               static_cast<double>(n_samples - 1)))
            .cwiseSqrt();
  }
  return {mean, stderr_vec, n_samples};
}

// Empirical second moment E |m_i - Mtilde_i|^2 of the sampling-noise term,
// per player. Payoffs are evaluated at the raw sample xi (never at the
// projected action), which isolates the noise term from projection bias.
// The reference Mtilde is exact for affine games and a high-count Monte
// Carlo average otherwise.
inline Vector variance_probe(const GameDefinition& game, const Vector& mu,
                             double sigma, EstimatorKind kind, long n_samples,
                             const RngKey& key,
                             long reference_samples = 400000) {
  ZN_REQUIRE(sigma > 0.0, "variance_probe: sigma must be positive");
  ZN_REQUIRE(n_samples >= 1, "variance_probe: n_samples must be >= 1");
  const int nd = game.joint_dim();
  ZN_REQUIRE(mu.size() == nd, "variance_probe: mu has wrong dimension");

  Vector reference(nd);
  if (game.affine) {
    reference = game.pseudo_gradient(mu);
  } else {
    RngKey ref_key = key;
    ref_key.lane ^= 0x5245464bULL;
    reference = smoothed_pseudo_gradient_mc(game, mu, sigma, reference_samples,
                                            ref_key)
                    .estimate;
  }

  KeyedRng rng(key);
  Vector second_moment = Vector::Zero(game.n_players);
  const double inv_sq = 1.0 / (sigma * sigma);
  for (long j = 0; j < n_samples; ++j) {
    const Vector xi = mu + sigma * rng.normal_vector(nd);
    Vector payoff_at_state(game.n_players);
    for (int i = 0; i < game.n_players; ++i) {
      const double payoff = game.cost(i, xi);
      const auto xi_i = xi.segment(i * game.dim, game.dim);
      const auto mu_i = mu.segment(i * game.dim, game.dim);
      Vector m(game.dim);
      if (kind == EstimatorKind::kOnePoint) {
        m = payoff * (xi_i - mu_i) * inv_sq;
      } else {
        m = (payoff - game.cost(i, mu)) * (xi_i - mu_i) * inv_sq;
      }
      second_moment[i] +=
          (m - reference.segment(i * game.dim, game.dim)).squaredNorm();
    }
  }
  return second_moment / static_cast<double>(n_samples);
}

struct EstimatorMeanProbe {
  Vector mean;       // empirical mean of the stacked estimate
  Vector std_error;  // per-coordinate standard error of that mean
};

// Empirical mean of the stacked gradient estimate with payoffs evaluated
// at the raw sample xi. Its expectation is the smoothed pseudo-gradient
// for both estimator kinds, which makes this the unbiasedness diagnostic.
inline EstimatorMeanProbe estimator_mean_probe(const GameDefinition& game,
                                               const Vector& mu, double sigma,
                                               EstimatorKind kind,
                                               long n_samples,
                                               const RngKey& key) {
  ZN_REQUIRE(sigma > 0.0, "estimator_mean_probe: sigma must be positive");
  ZN_REQUIRE(n_samples >= 1, "estimator_mean_probe: n_samples must be >= 1");
  const int nd = game.joint_dim();
  ZN_REQUIRE(mu.size() == nd, "estimator_mean_probe: mu has wrong dimension");
  KeyedRng rng(key);
  Vector mean = Vector::Zero(nd);
  Vector m2 = Vector::Zero(nd);
  const double inv_sq = 1.0 / (sigma * sigma);
  Vector estimate(nd);
  for (long j = 1; j <= n_samples; ++j) {
    const Vector xi = mu + sigma * rng.normal_vector(nd);
    for (int i = 0; i < game.n_players; ++i) {
      const double payoff = game.cost(i, xi);
      const auto xi_i = xi.segment(i * game.dim, game.dim);
      const auto mu_i = mu.segment(i * game.dim, game.dim);
      if (kind == EstimatorKind::kOnePoint) {
        estimate.segment(i * game.dim, game.dim) =
            payoff * (xi_i - mu_i) * inv_sq;
      } else {
        estimate.segment(i * game.dim, game.dim) =
            (payoff - game.cost(i, mu)) * (xi_i - mu_i) * inv_sq;
      }
    }
    const Vector delta = estimate - mean;
    mean += delta / static_cast<double>(j);
    m2 += delta.cwiseProduct(estimate - mean);
  }
  Vector stderr_vec = Vector::Zero(nd);
  if (n_samples > 1) {
    stderr_vec = (m2 / (static_cast<double>(n_samples) *
                        static_cast<double>(n_samples - 1)))
                     .cwiseSqrt();
  }
  return {mean, stderr_vec};
}

// Fraction of Gaussian draws centered at mu that land outside the
// (unshrunk) joint action set. mu must lie in the rho-shrunk set.
inline double escape_probability_probe(const ProductSet& set, const Vector& mu,
                                       double sigma, double rho,
                                       long n_samples, const RngKey& key) {
  ZN_REQUIRE(sigma > 0.0, "escape_probability_probe: sigma must be positive");
  ZN_REQUIRE(n_samples >= 1,
             "escape_probability_probe: n_samples must be >= 1");
  ZN_REQUIRE(set.shrink(rho).contains(mu, 1e-12),
             "escape_probability_probe: mu must lie in the shrunk set");
  KeyedRng rng(key);
  const int nd = set.dim();
  long escaped = 0;
  for (long j = 0; j < n_samples; ++j) {
    const Vector xi = mu + sigma * rng.normal_vector(nd);
    if (!set.contains(xi)) ++escaped;
  }
  return static_cast<double>(escaped) / static_cast<double>(n_samples);
}

}  // namespace zonash

#endif  // ZONASH_ESTIMATORS_HPP_
