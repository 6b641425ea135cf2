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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "zonash/config.hpp"
#include "zonash/harness.hpp"
#include "zonash/solvers.hpp"

namespace {

using zonash::Json;

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zonash::IoError("cannot open config file " + path);
  Json j;
  in >> j;
  return j;
}

Json rate_to_json(const zonash::RateEstimate& est) {
  return Json{{"slope", est.slope},
              {"intercept", est.intercept},
              {"stderr_slope", est.stderr_slope},
              {"window", {est.window_lo, est.window_hi}},
              {"n_points", est.n_points}};
}

void write_metadata(const zonash::AggregatedTable& table,
                    const Json& config_echo, const std::string& csv_path) {
  Json meta;
  meta["config"] = config_echo;
  meta["reference_source"] = table.reference_source;
  meta["reference"] = std::vector<double>(
      table.reference.data(), table.reference.data() + table.reference.size());
  meta["game"] = table.game_name;
  meta["estimator"] = table.estimator;
  meta["horizon"] = table.horizon;
  meta["runs"] = table.runs;
  meta["seed"] = table.seed;
  const std::string path = csv_path + ".meta.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw zonash::IoError("cannot open " + path + " for writing");
  out << meta.dump(2) << '\n';
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<int> runs, std::optional<long> horizon,
            std::optional<std::string> out, std::optional<int> threads) {
  Json config = load_json_file(config_path);
  if (seed) config["seed"] = *seed;
  if (runs) config["runs"] = *runs;
  if (horizon) config["horizon"] = *horizon;
  if (out) config["out"] = *out;
  if (threads) config["threads"] = *threads;
  const zonash::ExperimentConfig cfg = zonash::experiment_from_json(config);
  ZN_REQUIRE(!cfg.out.empty(), "run: output path required (config key "
                               "\"out\" or --out)");

  const zonash::AggregatedTable table = zonash::run_experiment(cfg);
  zonash::export_csv(table, cfg.out);
  write_metadata(table, config, cfg.out);

  std::cout << "game=" << table.game_name << " estimator=" << table.estimator
            << " runs=" << table.runs << " horizon=" << table.horizon
            << " reference=" << table.reference_source << '\n';
  std::cout << "final mean_sq_dist="
            << table.rows.back().mean_sq_dist << " at t="
            << table.rows.back().t << '\n';
  const zonash::RateEstimate est = zonash::fit_rate(table);
  std::cout << "last-decade slope=" << est.slope << " (stderr "
            << est.stderr_slope << ", " << est.n_points << " points)\n";
  std::cout << "wrote " << cfg.out << '\n';
  return 0;
}

int cmd_rates(const std::string& csv_path, std::optional<double> tail) {
  const zonash::AggregatedTable table = zonash::import_csv(csv_path);
  const zonash::RateEstimate est = zonash::fit_rate(table, tail);
  std::cout << rate_to_json(est).dump(2) << '\n';
  return 0;
}

int cmd_diagnose(const std::string& config_path,
                 std::optional<std::string> out) {
  const Json config = load_json_file(config_path);
  ZN_REQUIRE(config.contains("game"), "diagnose: config needs a \"game\" key");
  const Json grid = config.contains("grid") ? config.at("grid") : Json::object();
  const zonash::DiagnosticsReport report =
      zonash::run_diagnostics(config.at("game"), grid);
  for (const zonash::DiagnosticRow& row : report.rows) {
    std::cout << (row.passed ? "[PASS] " : "[FAIL] ") << row.probe << " ("
              << row.detail << "): measured=" << row.measured << " bound "
              << row.bound << '\n';
  }
  if (out) {
    std::ofstream f(*out, std::ios::binary);
    if (!f) throw zonash::IoError("cannot open " + *out + " for writing");
    f << "probe,detail,measured,bound,passed\n";
    for (const zonash::DiagnosticRow& row : report.rows) {
      f << row.probe << ",\"" << row.detail << "\"," << row.measured << ",\""
        << row.bound << "\"," << (row.passed ? 1 : 0) << '\n';
    }
  }
  std::cout << (report.all_passed() ? "all probes passed"
                                    : "some probes FAILED")
            << '\n';
  return 0;
}

int cmd_solve_ne(const std::string& config_path, double rho,
                 std::optional<double> sigma, double tol) {
  const Json config = load_json_file(config_path);
  const Json game_spec = config.contains("game") && config.at("game").is_object()
                             ? config.at("game")
                             : config;
  const zonash::GameDefinition game = zonash::game_from_json(game_spec);
  zonash::VISolveResult result;
  if (rho > 0.0 || sigma) {
    std::optional<double> s;
    if (sigma && *sigma > 0.0) s = *sigma;
    result = zonash::solve_regularized_ne(game, rho, s, tol);
  } else {
    result = zonash::solve_ne(game, tol);
  }
  Json jout{{"point", std::vector<double>(result.point.data(),
                                          result.point.data() +
                                              result.point.size())},
            {"residual", result.residual},
            {"iterations", result.iterations},
            {"converged", result.converged}};
  std::cout << jout.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Payoff-based Nash equilibrium learning experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<long> horizon;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<double> tail_fraction;
  double rho = 0.0;
  std::optional<double> sigma;
  double tol = 1e-10;

  CLI::App* run_cmd =
      app.add_subcommand("run", "run an experiment and write a CSV table");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--seed", seed, "override config seed");
  run_cmd->add_option("--runs", runs, "override config run count");
  run_cmd->add_option("--horizon", horizon, "override config horizon");
  run_cmd->add_option("--out", out, "override config output path");
  run_cmd->add_option("--threads", threads, "worker count (0 = hardware)");

  CLI::App* rates_cmd =
      app.add_subcommand("rates", "fit a log-log slope to an experiment CSV");
  rates_cmd->add_option("--csv", csv_path, "CSV produced by run")->required();
  rates_cmd->add_option("--tail-fraction", tail_fraction,
                        "fraction of checkpoints in the fit window "
                        "(default: last decade of t)");

  CLI::App* diag_cmd =
      app.add_subcommand("diagnose", "run the estimator diagnostics grid");
  diag_cmd->add_option("--config", config_path, "JSON config file")->required();
  diag_cmd->add_option("--out", out, "optional CSV report path");

  CLI::App* solve_cmd =
      app.add_subcommand("solve-ne", "solve for the Nash equilibrium");
  solve_cmd->add_option("--config", config_path, "JSON config file")
      ->required();
  solve_cmd->add_option("--rho", rho, "shrinkage of the action set");
  solve_cmd->add_option("--sigma", sigma, "smoothing level (omit for exact)");
  solve_cmd->add_option("--tol", tol, "fixed-point tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return cmd_run(config_path, seed, runs, horizon, out, threads);
    }
    if (rates_cmd->parsed()) return cmd_rates(csv_path, tail_fraction);
    if (diag_cmd->parsed()) return cmd_diagnose(config_path, out);
    if (solve_cmd->parsed()) return cmd_solve_ne(config_path, rho, sigma, tol);
  } catch (const zonash::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const zonash::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
