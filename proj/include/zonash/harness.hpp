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

#ifndef ZONASH_HARNESS_HPP_
#define ZONASH_HARNESS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "zonash/common.hpp"
#include "zonash/config.hpp"
#include "zonash/estimators.hpp"
#include "zonash/games.hpp"
#include "zonash/learner.hpp"
#include "zonash/solvers.hpp"

namespace zonash {

// Full description of one experiment. Game and schedule stay in their
// JSON form so a config round-trips losslessly into the output metadata.
struct ExperimentConfig {
  Json game_spec;
  EstimatorKind estimator = EstimatorKind::kTwoPoint;
  Json schedule_spec;
  long horizon = 10000;
  int runs = 1;
  std::uint64_t seed = 1;
  int checkpoints = 64;
  std::optional<Vector> init;  // absent: start from the set anchor
  std::string reference_mode = "closed_form";
  std::string out;
  int threads = 0;  // 0: hardware concurrency
};

inline ExperimentConfig experiment_from_json(const Json& j) {
  ZN_REQUIRE(j.is_object(), "config must be a JSON object");
  ZN_REQUIRE(j.contains("game"), "config needs a \"game\" section");
  ZN_REQUIRE(j.contains("schedule"), "config needs a \"schedule\" section");
  ExperimentConfig cfg;
  cfg.game_spec = j.at("game");
  cfg.schedule_spec = j.at("schedule");
  if (j.contains("estimator")) {
    cfg.estimator = estimator_from_string(j.at("estimator").get<std::string>());
  }
  if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<long>();
  if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("checkpoints")) {
    cfg.checkpoints = j.at("checkpoints").get<int>();
  }
  if (j.contains("init")) {
    const Json& init = j.at("init");
    if (init.is_string()) {
      ZN_REQUIRE(init.get<std::string>() == "anchor",
                 "init must be \"anchor\" or a vector");
    } else {
      cfg.init = detail::vector_from_json(init, "init");
    }
  }
  if (j.contains("reference")) {
    cfg.reference_mode = j.at("reference").get<std::string>();
    ZN_REQUIRE(cfg.reference_mode == "closed_form" ||
                   cfg.reference_mode == "solver",
               "reference must be \"closed_form\" or \"solver\"");
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  ZN_REQUIRE(cfg.horizon >= 2, "config: horizon must be >= 2");
  ZN_REQUIRE(cfg.runs >= 1, "config: runs must be >= 1");
  ZN_REQUIRE(cfg.checkpoints >= 1, "config: checkpoints must be >= 1");
  return cfg;
}

struct ReferencePoint {
  Vector point;
  std::string source;  // "closed_form" or "solver"
};

// Equilibrium used as the distance reference. The closed form solves
// M(a) = B a + b = 0 directly and is accepted only when the solution is
// feasible; everything else falls back to the fixed-point solver.
inline ReferencePoint resolve_reference(const GameDefinition& game,
                                        const std::string& mode) {
  if (mode == "closed_form" && game.affine) {
    const Vector candidate =
        game.affine->B.fullPivLu().solve(-game.affine->b);
    if (game.action_sets.contains(candidate, 1e-12)) {
      return {candidate, "closed_form"};
    }
  }
  return {solve_ne(game, 1e-10).point, "solver"};
}

struct AggregateRow {
  long t = 0;
  double mean_sq_dist = 0.0;
  double std_error = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
};

struct AggregatedTable {
  std::vector<AggregateRow> rows;
  // Metadata recorded alongside the CSV.
  Vector reference;
  std::string reference_source;
  std::string game_name;
  std::string estimator;
  long horizon = 0;
  int runs = 0;
  std::uint64_t seed = 0;
};

// Executes `runs` independent trajectories and aggregates the squared
// distances per checkpoint. Runs are distributed over a worker pool, but
// every random draw is keyed by (seed, run, t, player), so results are
// stored per run index and reduced in index order: the output is
// byte-identical for any worker count.
inline AggregatedTable run_experiment(const ExperimentConfig& cfg) {
  const GameDefinition game = game_from_json(cfg.game_spec);
  const Schedule schedule = schedule_from_json(cfg.schedule_spec, game.nu);
  const ReferencePoint ref = resolve_reference(game, cfg.reference_mode);

  std::vector<Trajectory> trajectories(cfg.runs);
  int workers = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, cfg.runs);

  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto work = [&](int worker_id) {
    for (int r = worker_id; r < cfg.runs; r += workers) {
      {
        std::lock_guard<std::mutex> lk(failure_mutex);
        if (failure) return;
      }
      try {
        trajectories[r] =
            run(game, schedule, cfg.estimator, cfg.horizon, ref.point,
                cfg.seed, static_cast<std::uint64_t>(r), cfg.checkpoints,
                cfg.init);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(NumericalError(
              "run " + std::to_string(r) + " failed: " + e.what()));
        }
        return;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t n_rows = trajectories.front().points.size();
  AggregatedTable table;
  table.reference = ref.point;
  table.reference_source = ref.source;
  table.game_name = game.name;
  table.estimator = to_string(cfg.estimator);
  table.horizon = cfg.horizon;
  table.runs = cfg.runs;
  table.seed = cfg.seed;
  table.rows.resize(n_rows);
  for (std::size_t row = 0; row < n_rows; ++row) {
    const TrajectoryPoint& first = trajectories.front().points[row];
    double mean = 0.0, m2 = 0.0;
    for (int r = 0; r < cfg.runs; ++r) {
      const TrajectoryPoint& p = trajectories[r].points[row];
      ZN_REQUIRE(p.t == first.t, "run_experiment: checkpoint grids differ");
      const double delta = p.sq_dist - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (p.sq_dist - mean);
    }
    const double std_error =
        cfg.runs > 1 ? std::sqrt(m2 / (static_cast<double>(cfg.runs) *
                                       static_cast<double>(cfg.runs - 1)))
                     : 0.0;
    table.rows[row] = AggregateRow{first.t,     mean,      std_error,
                                   first.sigma, first.rho, first.gamma};
  }
  return table;
}

struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  long window_lo = 0;
  long window_hi = 0;
  int n_points = 0;
};

// Ordinary least squares of log(mean squared distance) on log(t). With no
// explicit tail fraction the window is the last decade of t; a fraction
// f in (0, 1] keeps the last ceil(f * n) checkpoints instead.
inline RateEstimate fit_rate(const AggregatedTable& table,
                             std::optional<double> tail_fraction = {}) {
  ZN_REQUIRE(!table.rows.empty(), "fit_rate: empty table");
  std::size_t start = 0;
  if (tail_fraction) {
    ZN_REQUIRE(*tail_fraction > 0.0 && *tail_fraction <= 1.0,
               "fit_rate: tail_fraction must lie in (0, 1]");
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(*tail_fraction * table.rows.size())));
    start = table.rows.size() - keep;
  } else {
    const double t_min =
        static_cast<double>(table.rows.back().t) / 10.0;
    while (start < table.rows.size() &&
           static_cast<double>(table.rows[start].t) < t_min) {
      ++start;
    }
  }
  const std::size_t n = table.rows.size() - start;
  ZN_REQUIRE(n >= 3, "fit_rate: need at least 3 checkpoints in the window");

  double sx = 0.0, sy = 0.0;
  for (std::size_t i = start; i < table.rows.size(); ++i) {
    ZN_REQUIRE(table.rows[i].mean_sq_dist > 0.0,
               "fit_rate: non-positive mean at t=" +
                   std::to_string(table.rows[i].t) +
                   " (distance underflow; rerun with a larger game scale)");
    sx += std::log(static_cast<double>(table.rows[i].t));
    sy += std::log(table.rows[i].mean_sq_dist);
  }
  const double mean_x = sx / static_cast<double>(n);
  const double mean_y = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i < table.rows.size(); ++i) {
    const double dx = std::log(static_cast<double>(table.rows[i].t)) - mean_x;
    const double dy = std::log(table.rows[i].mean_sq_dist) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  ZN_REQUIRE(sxx > 0.0, "fit_rate: degenerate abscissae");
  RateEstimate est;
  est.slope = sxy / sxx;
  est.intercept = mean_y - est.slope * mean_x;
  double rss = 0.0;
  for (std::size_t i = start; i < table.rows.size(); ++i) {
    const double x = std::log(static_cast<double>(table.rows[i].t));
    const double y = std::log(table.rows[i].mean_sq_dist);
    const double resid = y - (est.intercept + est.slope * x);
    rss += resid * resid;
  }
  est.stderr_slope =
      n > 2 ? std::sqrt(rss / (static_cast<double>(n - 2) * sxx)) : 0.0;
  est.window_lo = table.rows[start].t;
  est.window_hi = table.rows.back().t;
  est.n_points = static_cast<int>(n);
  return est;
}

namespace detail {

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// CSV with header t,mean_sq_dist,stderr,sigma,rho,gamma. Floating-point
// fields carry 17 significant digits so a parse round-trips bit-exactly.
inline void export_csv(const AggregatedTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "t,mean_sq_dist,stderr,sigma,rho,gamma\n";
  for (const AggregateRow& row : table.rows) {
    out << row.t << ',' << detail::format_g17(row.mean_sq_dist) << ','
        << detail::format_g17(row.std_error) << ','
        << detail::format_g17(row.sigma) << ',' << detail::format_g17(row.rho)
        << ',' << detail::format_g17(row.gamma) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

inline AggregatedTable import_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ZN_REQUIRE(line == "t,mean_sq_dist,stderr,sigma,rho,gamma",
             "unexpected CSV header in " + path);
  AggregatedTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string field;
    AggregateRow row;
    auto next_field = [&]() -> std::string {
      if (!std::getline(ss, field, ',')) {
        throw IoError("short CSV row in " + path);
      }
      return field;
    };
    row.t = std::stol(next_field());
    row.mean_sq_dist = std::stod(next_field());
    row.std_error = std::stod(next_field());
    row.sigma = std::stod(next_field());
    row.rho = std::stod(next_field());
    row.gamma = std::stod(next_field());
    table.rows.push_back(row);
  }
  return table;
}

struct DiagnosticRow {
  std::string probe;
  std::string detail;
  double measured = 0.0;
  std::string bound;
  bool passed = false;
};

struct DiagnosticsReport {
  std::vector<DiagnosticRow> rows;

  bool all_passed() const {
    for (const DiagnosticRow& r : rows) {
      if (!r.passed) return false;
    }
    return true;
  }
};

// Grid for run_diagnostics. The variance-scaling probe needs a state with
// clearly non-zero costs, so its default probe point is the upper corner
// of box-shaped sets rather than the anchor.
struct DiagnosticsGrid {
  std::vector<double> sigmas = {0.2, 0.1};  // descending pair
  std::vector<double> rho_over_sigma = {2.0, 5.0};
  double escape_sigma = 0.05;
  long samples = 200000;
  std::uint64_t seed = 7;
  std::optional<Vector> unbiased_mu;  // default: anchor
  std::optional<Vector> variance_mu;  // default: box upper corner / anchor
};

inline DiagnosticsGrid grid_from_json(const Json& j) {
  DiagnosticsGrid grid;
  if (j.contains("sigmas")) {
    grid.sigmas.clear();
    for (const Json& v : j.at("sigmas")) grid.sigmas.push_back(v.get<double>());
  }
  if (j.contains("rho_over_sigma")) {
    grid.rho_over_sigma.clear();
    for (const Json& v : j.at("rho_over_sigma")) {
      grid.rho_over_sigma.push_back(v.get<double>());
    }
  }
  if (j.contains("escape_sigma")) {
    grid.escape_sigma = j.at("escape_sigma").get<double>();
  }
  if (j.contains("samples")) grid.samples = j.at("samples").get<long>();
  if (j.contains("seed")) grid.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("unbiased_mu")) {
    grid.unbiased_mu = detail::vector_from_json(j.at("unbiased_mu"),
                                                "unbiased_mu");
  }
  if (j.contains("variance_mu")) {
    grid.variance_mu = detail::vector_from_json(j.at("variance_mu"),
                                                "variance_mu");
  }
  return grid;
}

namespace detail {

inline Vector default_variance_mu(const ProductSet& sets) {
  Vector v(sets.dim());
  for (int i = 0; i < sets.num_factors(); ++i) {
    const ConvexSet& f = sets.factor(i);
    if (f.kind() == ConvexSet::Kind::kBox) {
      v.segment(sets.offset(i), f.dim()) = f.upper();
    } else {
      v.segment(sets.offset(i), f.dim()) = f.anchor();
    }
  }
  return v;
}

// Corner of the rho-shrunk set closest to the boundary of the full set.
inline Vector shrunk_worst_point(const ProductSet& sets, double rho) {
  const ProductSet shrunk = sets.shrink(rho);
  Vector v(sets.dim());
  for (int i = 0; i < shrunk.num_factors(); ++i) {
    const ConvexSet& f = shrunk.factor(i);
    if (f.kind() == ConvexSet::Kind::kBox) {
      v.segment(sets.offset(i), f.dim()) = f.lower();
    } else {
      Vector p = f.center();
      p[0] += f.radius();
      v.segment(sets.offset(i), f.dim()) = p;
    }
  }
  return v;
}

}  // namespace detail

// Runs the estimator diagnostics over a (sigma, rho) grid: pseudo-gradient
// consistency against finite differences, sampled strong monotonicity,
// estimator unbiasedness, variance scaling as sigma halves, and the
// escape-probability decay in rho / sigma.
inline DiagnosticsReport run_diagnostics(const GameDefinition& game,
                                         const DiagnosticsGrid& grid) {
  DiagnosticsReport report;
  const int nd = game.joint_dim();

  {  // pseudo-gradient vs central finite differences
    KeyedRng rng(RngKey{grid.seed, 0, 0, 0x47524144ULL});
    std::vector<Vector> points;
    points.reserve(100);
    for (int p = 0; p < 100; ++p) {
      points.push_back(game.action_sets.sample_uniform(rng));
    }
    const double h = 1e-4;
    const GradientConsistencyReport r =
        check_gradient_consistency(game, points, h);
    report.rows.push_back({"gradient_consistency", "h=1e-4, 100 points",
                           r.max_abs_deviation,
                           "<= " + detail::format_g17(r.tolerance), r.passed});
  }

  {  // sampled strong monotonicity
    const MonotonicityReport r =
        check_strong_monotonicity(game, 1000, grid.seed);
    report.rows.push_back({"strong_monotonicity", "1000 pairs", r.min_ratio,
                           ">= nu - 1e-9 = " +
                               detail::format_g17(game.nu - 1e-9),
                           r.passed});
  }

  const Vector unbiased_mu =
      grid.unbiased_mu ? *grid.unbiased_mu : game.action_sets.anchor();
  for (EstimatorKind kind :
       {EstimatorKind::kOnePoint, EstimatorKind::kTwoPoint}) {
    for (double sigma : grid.sigmas) {
      const EstimatorMeanProbe probe = estimator_mean_probe(
          game, unbiased_mu, sigma, kind, grid.samples,
          RngKey{grid.seed, 1, 0, kind == EstimatorKind::kOnePoint ? 1u : 2u});
      Vector reference(nd);
      Vector ref_se = Vector::Zero(nd);
      if (game.affine) {
        reference = game.pseudo_gradient(unbiased_mu);
      } else {
        const McGradientEstimate mc = smoothed_pseudo_gradient_mc(
            game, unbiased_mu, sigma, 4 * grid.samples,
            RngKey{grid.seed, 2, 0, 3});
        reference = mc.estimate;
        ref_se = mc.std_error;
      }
      double worst = 0.0;
      bool ok = true;
      for (int k = 0; k < nd; ++k) {
        const double combined = std::sqrt(probe.std_error[k] * probe.std_error[k] +
                                          ref_se[k] * ref_se[k]);
        const double dev = std::abs(probe.mean[k] - reference[k]);
        worst = std::max(worst, combined > 0.0 ? dev / combined : dev);
        if (dev > 4.0 * combined) ok = false;
      }
      report.rows.push_back({"unbiasedness",
                             to_string(kind) + ", sigma=" +
                                 detail::format_g17(sigma),
                             worst, "<= 4 combined std errors", ok});
    }
  }

  if (grid.sigmas.size() == 2 && grid.sigmas[0] > grid.sigmas[1]) {
    const Vector variance_mu =
        grid.variance_mu ? *grid.variance_mu
                         : detail::default_variance_mu(game.action_sets);
    for (EstimatorKind kind :
         {EstimatorKind::kOnePoint, EstimatorKind::kTwoPoint}) {
      const Vector hi = variance_probe(
          game, variance_mu, grid.sigmas[0], kind, grid.samples,
          RngKey{grid.seed, 3, 0, kind == EstimatorKind::kOnePoint ? 1u : 2u});
      const Vector lo = variance_probe(
          game, variance_mu, grid.sigmas[1], kind, grid.samples,
          RngKey{grid.seed, 4, 0, kind == EstimatorKind::kOnePoint ? 1u : 2u});
      const bool one_point = kind == EstimatorKind::kOnePoint;
      const double band_lo = one_point ? 2.5 : 0.5;
      const double band_hi = one_point ? 6.0 : 2.0;
      const std::string detail_str =
          to_string(kind) + ", sigma " + detail::format_g17(grid.sigmas[0]) +
          " -> " + detail::format_g17(grid.sigmas[1]);
      if (hi.sum() == 0.0 && lo.sum() == 0.0) {
        // Zero-variance estimates (e.g. identically zero costs).
        report.rows.push_back(
            {"variance_scaling", detail_str, 0.0, "zero variance", true});
      } else {
        const double ratio = lo.sum() / hi.sum();
        report.rows.push_back(
            {"variance_scaling", detail_str, ratio,
             "in [" + detail::format_g17(band_lo) + ", " +
                 detail::format_g17(band_hi) + "]",
             ratio >= band_lo && ratio <= band_hi});
      }
    }
  }

  {  // escape probability at rho/sigma ratios scaled by the set half-width
    double half_width = std::numeric_limits<double>::infinity();
    for (int i = 0; i < game.action_sets.num_factors(); ++i) {
      const ConvexSet& f = game.action_sets.factor(i);
      if (f.kind() == ConvexSet::Kind::kBox) {
        half_width = std::min(half_width,
                              0.5 * (f.upper() - f.lower()).minCoeff());
      } else {
        half_width = std::min(half_width, f.radius());
      }
    }
    std::vector<double> fractions;
    for (std::size_t k = 0; k < grid.rho_over_sigma.size(); ++k) {
      const double rho = std::min(
          0.95, grid.rho_over_sigma[k] * grid.escape_sigma / half_width);
      const Vector mu = detail::shrunk_worst_point(game.action_sets, rho);
      const double frac = escape_probability_probe(
          game.action_sets, mu, grid.escape_sigma, rho, grid.samples,
          RngKey{grid.seed, 5, static_cast<std::uint64_t>(k), 0});
      fractions.push_back(frac);
      const bool is_far = grid.rho_over_sigma[k] >= 5.0;
      report.rows.push_back({"escape_probability",
                             "rho/sigma=" +
                                 detail::format_g17(grid.rho_over_sigma[k]) +
                                 ", sigma=" +
                                 detail::format_g17(grid.escape_sigma),
                             frac, is_far ? "<= 1e-4" : "recorded",
                             !is_far || frac <= 1e-4});
    }
    for (std::size_t k = 1; k < fractions.size(); ++k) {
      report.rows.push_back({"escape_probability_decay",
                             "ratio " +
                                 detail::format_g17(grid.rho_over_sigma[k - 1]) +
                                 " -> " +
                                 detail::format_g17(grid.rho_over_sigma[k]),
                             fractions[k] - fractions[k - 1],
                             "strictly decreasing",
                             fractions[k] < fractions[k - 1]});
    }
  }

  return report;
}

inline DiagnosticsReport run_diagnostics(const Json& game_spec,
                                         const Json& grid_spec) {
  return run_diagnostics(game_from_json(game_spec), grid_from_json(grid_spec));
}

}  // namespace zonash

#endif  // ZONASH_HARNESS_HPP_
