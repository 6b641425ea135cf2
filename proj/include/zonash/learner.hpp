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

#ifndef ZONASH_LEARNER_HPP_
#define ZONASH_LEARNER_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zonash/common.hpp"
#include "zonash/estimators.hpp"
#include "zonash/games.hpp"
#include "zonash/geometry.hpp"
#include "zonash/rng.hpp"

namespace zonash {

enum class ScheduleMode { kTheorem1, kTheorem2 };

struct Theorem1Params {
  double a = 1.0;          // sigma_t = a / t^{1/4}
  double epsilon = 0.05;   // rho_t = t^{-(1/4 - epsilon)}
  double rho_max = 0.5;
};

struct Theorem2Params {
  double b = 1.0;  // sigma_t = b / t^s
  double c = 0.5;  // rho_t = c / t^r
  double r = 1.0;
  double s = 2.0;
  double rho_max = 0.5;
};

// The (gamma_t, sigma_t, rho_t) triple driving one experiment. The step
// size is always gamma_t = 4 / (nu t). Exploration variance and shrinkage
// decay polynomially; the two modes differ only in the exponents:
//   mode 1: sigma_t = a t^{-1/4},  rho_t = min(rho_max, t^{-(1/4 - eps)})
//   mode 2: sigma_t = b t^{-s},    rho_t = min(rho_max, c t^{-r}), 1 <= r < s
// rho is clamped because the raw value reaches 1 at t = 1, which would
// collapse the shrunk set to its anchor. sigma_t / rho_t decreases
// monotonically from t = 1 in both modes.
class Schedule {
 public:
  static Schedule theorem1(double nu, Theorem1Params p = {}) {
    ZN_REQUIRE(nu > 0.0, "schedule: nu must be positive");
    ZN_REQUIRE(p.a > 0.0, "schedule: a must be positive");
    ZN_REQUIRE(p.epsilon > 0.0 && p.epsilon < 0.25,
               "schedule: 0 < epsilon < 1/4 required");
    ZN_REQUIRE(p.rho_max > 0.0 && p.rho_max < 1.0,
               "schedule: rho_max must lie in (0, 1)");
    Schedule sch;
    sch.mode_ = ScheduleMode::kTheorem1;
    sch.nu_ = nu;
    sch.t1_ = p;
    return sch;
  }

  static Schedule theorem2(double nu, Theorem2Params p = {}) {
    ZN_REQUIRE(nu > 0.0, "schedule: nu must be positive");
    ZN_REQUIRE(p.b > 0.0, "schedule: b must be positive");
    ZN_REQUIRE(p.c > 0.0, "schedule: c must be positive");
    ZN_REQUIRE(p.r >= 1.0, "schedule: r >= 1 required");
    ZN_REQUIRE(p.r < p.s, "schedule: r < s required");
    ZN_REQUIRE(p.rho_max > 0.0 && p.rho_max < 1.0,
               "schedule: rho_max must lie in (0, 1)");
    Schedule sch;
    sch.mode_ = ScheduleMode::kTheorem2;
    sch.nu_ = nu;
    sch.t2_ = p;
    return sch;
  }

  ScheduleMode mode() const { return mode_; }
  double nu() const { return nu_; }

  double gamma(long t) const {
    ZN_REQUIRE(t >= 1, "schedule: t starts at 1");
    return 4.0 / (nu_ * static_cast<double>(t));
  }

  double sigma(long t) const {
    ZN_REQUIRE(t >= 1, "schedule: t starts at 1");
    const double td = static_cast<double>(t);
    if (mode_ == ScheduleMode::kTheorem1) return t1_.a * std::pow(td, -0.25);
    return t2_.b * std::pow(td, -t2_.s);
  }

  double rho(long t) const {
    ZN_REQUIRE(t >= 1, "schedule: t starts at 1");
    const double td = static_cast<double>(t);
    if (mode_ == ScheduleMode::kTheorem1) {
      return std::min(t1_.rho_max, std::pow(td, -(0.25 - t1_.epsilon)));
    }
    return std::min(t2_.rho_max, t2_.c * std::pow(td, -t2_.r));
  }

  const Theorem1Params& theorem1_params() const { return t1_; }
  const Theorem2Params& theorem2_params() const { return t2_; }

 private:
  Schedule() = default;

  ScheduleMode mode_ = ScheduleMode::kTheorem1;
  double nu_ = 1.0;
  Theorem1Params t1_;
  Theorem2Params t2_;
};

// Identifies one repetition of an experiment. Together with the iteration
// index and player lane it addresses every random draw of a trajectory.
struct RunKey {
  std::uint64_t seed = 0;
  std::uint64_t run_index = 0;
};

// State of the joint iteration. After an update from iteration t the new
// state (index t + 1) lies in the rho_t-shrunk action set; the played
// action always lies in the full set.
struct LearnerState {
  long t = 1;
  Vector mu;
  Vector last_xi;      // empty until the first step
  Vector last_action;  // empty until the first step
};

// Projects the initial guess (anchor by default) onto the first shrunk set.
inline LearnerState make_initial_state(const GameDefinition& game,
                                       const Schedule& schedule,
                                       const std::optional<Vector>& init = {}) {
  Vector guess = init ? *init : game.action_sets.anchor();
  ZN_REQUIRE(guess.size() == game.joint_dim(),
             "initial state: guess has wrong dimension");
  ZN_REQUIRE(guess.allFinite(), "initial state: guess must be finite");
  LearnerState state;
  state.t = 1;
  state.mu = game.action_sets.shrink(schedule.rho(1)).project(guess);
  return state;
}

namespace detail {

inline void check_finite_stage(const Vector& v, long t, int player,
                               const char* stage) {
  if (!v.allFinite()) {
    throw NumericalError(std::string("non-finite value at t=") +
                         std::to_string(t) + ", player=" +
                         std::to_string(player) + ", stage=" + stage);
  }
}

}  // namespace detail

// One simultaneous pass for all players: sample a Gaussian perturbation of
// the state, play its projection onto the action set, observe payoffs,
// form the gradient estimate, and project the gradient step onto the
// shrunk set. Each player's draw is keyed by (seed, run, t, player) only,
// so no draw depends on the other players' actions within the iteration.
inline LearnerState step(const GameDefinition& game, const LearnerState& state,
                         const Schedule& schedule, EstimatorKind kind,
                         const RunKey& key) {
  const long t = state.t;
  const int n = game.n_players;
  const int d = game.dim;
  const double sigma = schedule.sigma(t);
  const double rho = schedule.rho(t);
  const double gamma = schedule.gamma(t);

  Vector xi(n * d);
  for (int i = 0; i < n; ++i) {
    const auto mu_i = state.mu.segment(i * d, d);
    xi.segment(i * d, d) = sample_state_perturbation(
        mu_i, sigma,
        RngKey{key.seed, key.run_index, static_cast<std::uint64_t>(t),
               static_cast<std::uint64_t>(i)});
    detail::check_finite_stage(xi.segment(i * d, d), t, i, "sample");
  }

  Vector action(n * d);
  for (int i = 0; i < n; ++i) {
    action.segment(i * d, d) =
        game.action_sets.factor(i).project(xi.segment(i * d, d));
  }

  const ProductSet shrunk = game.action_sets.shrink(rho);
  LearnerState next;
  next.t = t + 1;
  next.mu.resize(n * d);
  next.last_xi = xi;
  next.last_action = action;
  GradientEstimate estimate{Vector(n * d), kind};

  for (int i = 0; i < n; ++i) {
    const double payoff = game.cost(i, action);
    if (!std::isfinite(payoff)) {
      throw NumericalError("non-finite value at t=" + std::to_string(t) +
                           ", player=" + std::to_string(i) +
                           ", stage=payoff");
    }
    const auto xi_i = xi.segment(i * d, d);
    const auto mu_i = state.mu.segment(i * d, d);
    if (kind == EstimatorKind::kOnePoint) {
      estimate.stacked.segment(i * d, d) =
          one_point_estimate(payoff, xi_i, mu_i, sigma);
    } else {
      const double payoff_state = game.cost(i, state.mu);
      if (!std::isfinite(payoff_state)) {
        throw NumericalError("non-finite value at t=" + std::to_string(t) +
                             ", player=" + std::to_string(i) +
                             ", stage=payoff");
      }
      estimate.stacked.segment(i * d, d) =
          two_point_estimate(payoff, payoff_state, xi_i, mu_i, sigma);
    }
    detail::check_finite_stage(estimate.stacked.segment(i * d, d), t, i,
                               "estimate");
    next.mu.segment(i * d, d) = shrunk.factor(i).project(
        mu_i - gamma * estimate.stacked.segment(i * d, d));
    detail::check_finite_stage(next.mu.segment(i * d, d), t, i, "update");
  }
  return next;
}

struct TrajectoryPoint {
  long t = 0;
  Vector mu;
  double sq_dist = 0.0;  // |mu(t) - reference|^2
  double sigma = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Vector final_mu;
  std::uint64_t seed = 0;
  std::uint64_t run_index = 0;
};

// Strictly increasing, geometrically spaced iteration indices from 1 to
// horizon (inclusive), at most n_checkpoints of them.
inline std::vector<long> checkpoint_schedule(long horizon, int n_checkpoints) {
  ZN_REQUIRE(horizon >= 1, "checkpoints: horizon must be >= 1");
  ZN_REQUIRE(n_checkpoints >= 1, "checkpoints: need at least one");
  std::vector<long> ts;
  ts.reserve(n_checkpoints);
  if (horizon == 1 || n_checkpoints == 1) {
    ts.push_back(horizon);
    return ts;
  }
  const double log_h = std::log(static_cast<double>(horizon));
  for (int k = 0; k < n_checkpoints; ++k) {
    const double f = static_cast<double>(k) / (n_checkpoints - 1);
    const long t =
        std::clamp(std::llround(std::exp(f * log_h)), 1LL,
                   static_cast<long long>(horizon));
    if (ts.empty() || t > ts.back()) ts.push_back(t);
  }
  if (ts.back() != horizon) ts.push_back(horizon);
  return ts;
}

// Full trajectory of one run: the state evolves from its projected initial
// guess up to iteration index `horizon`, recording the squared distance to
// the reference point at geometrically spaced checkpoints.
inline Trajectory run(const GameDefinition& game, const Schedule& schedule,
                      EstimatorKind kind, long horizon, const Vector& reference,
                      std::uint64_t seed, std::uint64_t run_index,
                      int n_checkpoints = 64,
                      const std::optional<Vector>& init = {}) {
  ZN_REQUIRE(horizon >= 1, "run: horizon must be >= 1");
  ZN_REQUIRE(reference.size() == game.joint_dim(),
             "run: reference has wrong dimension");
  ZN_REQUIRE(game.action_sets.contains(reference, 1e-9),
             "run: reference must be feasible");

  const std::vector<long> checkpoints =
      checkpoint_schedule(horizon, n_checkpoints);
  Trajectory traj;
  traj.seed = seed;
  traj.run_index = run_index;
  traj.points.reserve(checkpoints.size());

  LearnerState state = make_initial_state(game, schedule, init);
  const RunKey key{seed, run_index};
  std::size_t next_cp = 0;
  auto record = [&](const LearnerState& s) {
    traj.points.push_back(TrajectoryPoint{
        s.t, s.mu, (s.mu - reference).squaredNorm(), schedule.sigma(s.t),
        schedule.rho(s.t), schedule.gamma(s.t)});
  };
  if (checkpoints[next_cp] == 1) {
    record(state);
    ++next_cp;
  }
  while (state.t < horizon) {
    state = step(game, state, schedule, kind, key);
    if (next_cp < checkpoints.size() && state.t == checkpoints[next_cp]) {
      record(state);
      ++next_cp;
    }
  }
  traj.final_mu = state.mu;
  return traj;
}

}  // namespace zonash

#endif  // ZONASH_LEARNER_HPP_
