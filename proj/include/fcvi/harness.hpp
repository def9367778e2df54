// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcvi/metrics.hpp"
#include "fcvi/saddle.hpp"
#include "fcvi/solver.hpp"

namespace fcvi {

// A declarative experiment: one instance, one method + policy, a grid of
// horizons x seeds, noise parameters, probe settings.
struct ExperimentConfig {
  std::shared_ptr<const ProblemInstance> instance;
  std::shared_ptr<const SaddleProblem> saddle;  // set when the instance came from a reduction
  std::string method;
  std::string policy_name;
  PolicyParams policy;
  std::vector<long> horizons;
  std::vector<std::uint64_t> seeds;
  StochasticOracleSpec noise;  // master_seed is replaced per cell
  std::optional<Vector> x0;
  ProbeOptions probes;
  bool record_timings = false;
  std::string label;
  nlohmann::ordered_json echo;
};

ExperimentConfig config_from_json(const nlohmann::ordered_json& j, const std::string& base_dir);
ExperimentConfig load_config(const std::string& path);

// Feasibility-channel right-hand side of the theorem matching the policy,
// evaluated with the instance constants. Missing when the policy has no
// closed bound here (fully_stoch_B) or the instance lacks a known solution.
std::optional<double> theorem_bound(const ProblemInstance& inst, const StepSchedule& schedule,
                                    const StochasticOracleSpec& noise, long T, const Vector& x0);

struct ExperimentOutcome {
  int exit_code = 0;  // 0 ok, 1 a cell failed at runtime
  std::string summary_path;
};

// Runs every (T, seed) cell, writes one trace CSV per cell plus
// summary.json into out_dir. Cells run concurrently up to `workers`;
// outputs are written atomically and the summary is a deterministic
// reduction in cell order. Cell failures are recorded and do not stop the
// sweep.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 int workers = 1);

struct ReportOutput {
  std::string table_text;
  std::string table_csv;
  std::string plot_data_csv;  // tidy long format: one row per (cell, channel)
};

ReportOutput build_report(const std::vector<std::string>& summary_paths);

// CLI entry; args exclude argv[0]. Exit codes: 0 success, 1 runtime
// failure, 2 config error.
int run_cli(const std::vector<std::string>& args);

// Default worker count: FCVI_WORKERS when set, else 1.
int default_workers();

}  // namespace fcvi
