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
//
// End-to-end acceptance suite. Each criterion prints exactly one PASS or
// FAIL line; the binary exits non-zero if any criterion fails.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zonash/estimators.hpp"
#include "zonash/games.hpp"
#include "zonash/geometry.hpp"
#include "zonash/harness.hpp"
#include "zonash/learner.hpp"
#include "zonash/solvers.hpp"

using namespace zonash;

namespace {

int g_failures = 0;

void report(int number, const std::string& label, bool passed,
            const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", passed ? "PASS" : "FAIL", number,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RateEstimate rate_experiment(EstimatorKind kind, const Json& schedule,
                             int runs, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.game_spec = Json{{"game", "canonical_quadratic"}};
  cfg.estimator = kind;
  cfg.schedule_spec = schedule;
  cfg.horizon = 100000;
  cfg.runs = runs;
  cfg.seed = seed;
  cfg.checkpoints = 64;
  const AggregatedTable table = run_experiment(cfg);
  return fit_rate(table);  // last decade of t
}

// 1. Two-point estimation converges at the fast rate.
RateEstimate criterion_two_point_rate() {
  const RateEstimate est = rate_experiment(
      EstimatorKind::kTwoPoint,
      Json{{"mode", "theorem2"}, {"r", 1.0}, {"s", 2.0}, {"b", 1.0},
           {"c", 0.5}},
      /*runs=*/100, /*seed=*/424242);
  report(1, "two-point rate", est.slope >= -1.3 && est.slope <= -0.7,
         fmt("slope=%.4f (stderr %.4f) in [-1.3, -0.7], window t in [%ld, %ld]",
             est.slope, est.stderr_slope, est.window_lo, est.window_hi));
  return est;
}

// 2. One-point estimation converges at the slow rate.
RateEstimate criterion_one_point_rate() {
  const RateEstimate est = rate_experiment(
      EstimatorKind::kOnePoint,
      Json{{"mode", "theorem1"}, {"a", 1.0}, {"epsilon", 0.05}},
      /*runs=*/200, /*seed=*/424242);
  report(2, "one-point rate", est.slope >= -0.75 && est.slope <= -0.25,
         fmt("slope=%.4f (stderr %.4f) in [-0.75, -0.25]", est.slope,
             est.stderr_slope));
  return est;
}

// 3. The two-point slope is strictly steeper.
void criterion_rate_ordering(const RateEstimate& two, const RateEstimate& one) {
  report(3, "rate ordering", two.slope < one.slope,
         fmt("two-point %.4f < one-point %.4f", two.slope, one.slope));
}

// 4. Both estimators are unbiased for the smoothed pseudo-gradient, which
//    equals M itself on this affine instance.
void criterion_unbiasedness() {
  const GameDefinition game = make_canonical_quadratic();
  Vector mu(2);
  mu << 0.5, 0.5;
  const double sigma = 0.1;
  const Vector exact = game.pseudo_gradient(mu);
  bool ok = true;
  double worst = 0.0;
  for (EstimatorKind kind :
       {EstimatorKind::kOnePoint, EstimatorKind::kTwoPoint}) {
    const EstimatorMeanProbe probe = estimator_mean_probe(
        game, mu, sigma, kind, 1000000,
        RngKey{777, 0, 0, kind == EstimatorKind::kOnePoint ? 1u : 2u});
    for (int k = 0; k < 2; ++k) {
      const double dev = std::abs(probe.mean[k] - exact[k]);
      const double units = dev / probe.std_error[k];
      worst = std::max(worst, units);
      if (dev > 4.0 * probe.std_error[k]) ok = false;
    }
  }
  report(4, "estimator unbiasedness", ok,
         fmt("worst deviation %.2f combined std errors (limit 4)", worst));
}

// 5. Halving sigma scales the one-point second moment like 1/sigma^2 and
//    leaves the two-point second moment bounded.
void criterion_variance_scaling() {
  const GameDefinition game = make_canonical_quadratic();
  Vector corner(2);
  corner << 1.0, 1.0;
  const long n = 1000000;
  const Vector one_hi = variance_probe(game, corner, 0.2,
                                       EstimatorKind::kOnePoint, n,
                                       RngKey{778, 0, 0, 1});
  const Vector one_lo = variance_probe(game, corner, 0.1,
                                       EstimatorKind::kOnePoint, n,
                                       RngKey{778, 1, 0, 1});
  const Vector two_hi = variance_probe(game, corner, 0.2,
                                       EstimatorKind::kTwoPoint, n,
                                       RngKey{778, 2, 0, 2});
  const Vector two_lo = variance_probe(game, corner, 0.1,
                                       EstimatorKind::kTwoPoint, n,
                                       RngKey{778, 3, 0, 2});
  const double one_ratio = one_lo.sum() / one_hi.sum();
  const double two_ratio = two_lo.sum() / two_hi.sum();
  const bool ok = one_ratio >= 2.5 && one_ratio <= 6.0 && two_ratio >= 0.5 &&
                  two_ratio <= 2.0;
  report(5, "variance scaling", ok,
         fmt("one-point ratio %.3f in [2.5, 6], two-point ratio %.3f in "
             "[0.5, 2]",
             one_ratio, two_ratio));
}

// 6. Samples rarely escape the action set once rho dominates sigma, and
//    the escape fraction decreases in rho / sigma.
void criterion_escape_probability() {
  const GameDefinition game = make_canonical_quadratic();
  const double sigma = 0.05;  // half-width 0.5 => rho 0.5 gives a 5 sigma gap
  auto fraction_at = [&](double rho, std::uint64_t lane) {
    Vector mu(2);
    mu << game.action_sets.shrink(rho).factor(0).lower()[0],
        game.action_sets.shrink(rho).factor(1).lower()[0];
    return escape_probability_probe(game.action_sets, mu, sigma, rho, 100000,
                                    RngKey{779, 0, 0, lane});
  };
  const double far = fraction_at(0.5, 0);   // rho * half-width = 5 sigma
  const double near = fraction_at(0.2, 1);  // rho * half-width = 2 sigma
  const bool ok = far <= 1e-4 && near > far;
  report(6, "escape probability", ok,
         fmt("fraction %.2g at 5 sigma (limit 1e-4), %.4f at 2 sigma "
             "(must exceed it)",
             far, near));
}

// 7. The fixed-point solver agrees with closed forms and enumeration.
void criterion_solver_correctness() {
  const GameDefinition canonical = make_canonical_quadratic();
  const VISolveResult ne = solve_ne(canonical, 1e-10);
  const double canonical_err =
      (ne.point - zonash_test::linear_solve_ne(canonical)).norm();

  Vector costs(2);
  costs << 1.0, 1.0;
  const GameDefinition cournot = make_cournot(2, 3.0, 1.0, costs, 2.0);
  const double cournot_err =
      (solve_ne(cournot, 1e-10).point - zonash_test::linear_solve_ne(cournot))
          .norm();

  const double theta =
      canonical.nu / (2.0 * canonical.lipschitz * canonical.lipschitz);
  const double residual_recomputed =
      (canonical.action_sets.project(
           ne.point - theta * canonical.pseudo_gradient(ne.point)) -
       ne.point)
          .norm();
  const double residual_err = std::abs(residual_recomputed - ne.residual);

  Matrix B(2, 2);
  B << 2, 1, 1, 2;
  Vector b(2);
  b << -1, -1;
  Vector lo = Vector::Constant(1, 0.5), hi = Vector::Constant(1, 1.0);
  const GameDefinition boundary = make_affine_game(
      {B, b}, ProductSet({ConvexSet::box(lo, hi), ConvexSet::box(lo, hi)}));
  const auto oracle = zonash_test::kkt_active_set_solve(
      B, b, Vector::Constant(2, 0.5), Vector::Constant(2, 1.0));
  const double boundary_err =
      oracle ? (solve_ne(boundary, 1e-10).point - *oracle).norm() : 1.0;

  const bool ok = canonical_err <= 1e-8 && cournot_err <= 1e-8 &&
                  residual_err <= 1e-12 && boundary_err <= 1e-8;
  report(7, "VI solver correctness", ok,
         fmt("errors: canonical %.2g, cournot %.2g, residual %.2g, "
             "boundary %.2g",
             canonical_err, cournot_err, residual_err, boundary_err));
}

// 8. Geometry: idempotent and non-expansive projections, nested
//    shrinkage, and the Lipschitz-in-rho bound with C = diameter +
//    distance (pilot-verified with a worst observed ratio of 0.90 C).
void criterion_geometry() {
  KeyedRng rng(RngKey{780, 0, 0, 0});
  Vector lo(2), hi(2), anchor(2), center(2), ball_anchor(2);
  lo << -1.0, 0.5;
  hi << 2.0, 3.0;
  anchor << 1.5, 2.0;
  center << 1.0, -2.0;
  ball_anchor << 0.3, -2.2;
  const ConvexSet sets[] = {
      ConvexSet::box(lo, hi, anchor),
      ConvexSet::ball(center, 1.7, ball_anchor),
  };
  bool ok = true;
  std::string detail = "all properties held";
  for (const ConvexSet& set : sets) {
    for (int i = 0; i < 10000 && ok; ++i) {
      const Vector x =
          set.anchor() + 2.0 * set.diameter() * rng.normal_vector(2);
      const Vector y =
          set.anchor() + 2.0 * set.diameter() * rng.normal_vector(2);
      const Vector px = set.project(x);
      if (set.project(px) != px) {
        ok = false;
        detail = "projection not idempotent";
        break;
      }
      if ((px - set.project(y)).norm() > (x - y).norm() + 1e-12) {
        ok = false;
        detail = "projection expansive";
        break;
      }
      const double rho = 0.5 * rng.uniform01();
      const double rho_prime = 0.5 * rng.uniform01();
      const double c = set.diameter() + set.distance(x);
      if ((set.shrink(rho).project(x) - set.shrink(rho_prime).project(x))
              .norm() > c * std::abs(rho - rho_prime) + 1e-12) {
        ok = false;
        detail = "shrunk projection not Lipschitz in rho";
        break;
      }
      const double outer_rho = 0.4 * rng.uniform01();
      const double inner_rho = outer_rho + (0.99 - outer_rho) * rng.uniform01();
      KeyedRng sampler(RngKey{780, 1, static_cast<std::uint64_t>(i), 0});
      if (!set.shrink(outer_rho)
               .contains(set.shrink(inner_rho).sample_uniform(sampler),
                         1e-12)) {
        ok = false;
        detail = "shrunk sets not nested";
        break;
      }
    }
  }
  report(8, "geometry suite", ok, detail);
}

// 9. Played actions stay in the action set and states in the shrunk set,
//    with zero tolerance, across an entire run.
void criterion_feasibility() {
  const GameDefinition game = make_canonical_quadratic();
  const Schedule schedule = Schedule::theorem1(game.nu);
  LearnerState state = make_initial_state(game, schedule);
  bool ok = game.action_sets.shrink(schedule.rho(1)).contains(state.mu, 0.0);
  long checked = 0;
  for (long t = 1; t < 10000 && ok; ++t) {
    const double rho = schedule.rho(state.t);
    state = step(game, state, schedule, EstimatorKind::kOnePoint,
                 RunKey{4242, 0});
    ok = game.action_sets.contains(state.last_action, 0.0) &&
         game.action_sets.shrink(rho).contains(state.mu, 0.0);
    ++checked;
  }
  report(9, "feasibility invariant", ok,
         fmt("%ld iterations checked exactly", checked));
}

// 10. Two CLI invocations with the same config produce byte-identical
//     CSVs, including under different worker counts.
void criterion_reproducibility() {
  const std::string dir = "acceptance_tmp";
  if (std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) != 0) {
    report(10, "reproducibility", false, "could not prepare temp directory");
    return;
  }
  const std::string config_path = dir + "/config.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({
  "game": {"game": "canonical_quadratic"},
  "estimator": "two_point",
  "schedule": {"mode": "theorem2"},
  "horizon": 5000,
  "runs": 12,
  "seed": 31337,
  "checkpoints": 32
})";
  }
  const std::string cli = ZONASH_CLI_PATH;
  const std::string out1 = dir + "/a.csv", out2 = dir + "/b.csv";
  const int rc1 = std::system((cli + " run --config " + config_path +
                               " --out " + out1 + " --threads 1 > /dev/null")
                                  .c_str());
  const int rc2 = std::system((cli + " run --config " + config_path +
                               " --out " + out2 + " --threads 4 > /dev/null")
                                  .c_str());
  const std::string text1 = slurp(out1), text2 = slurp(out2);
  const bool ok = rc1 == 0 && rc2 == 0 && !text1.empty() && text1 == text2;
  report(10, "reproducibility", ok,
         fmt("%zu identical bytes across worker counts 1 and 4",
             text1.size()));
  if (std::system(("rm -rf " + dir).c_str()) != 0) {
    std::fprintf(stderr, "warning: could not remove %s\n", dir.c_str());
  }
}

}  // namespace

int main() {
  const RateEstimate two = criterion_two_point_rate();
  const RateEstimate one = criterion_one_point_rate();
  criterion_rate_ordering(two, one);
  criterion_unbiasedness();
  criterion_variance_scaling();
  criterion_escape_probability();
  criterion_solver_correctness();
  criterion_geometry();
  criterion_feasibility();
  criterion_reproducibility();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
