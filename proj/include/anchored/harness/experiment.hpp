#ifndef ANCHORED_HARNESS_EXPERIMENT_HPP
#define ANCHORED_HARNESS_EXPERIMENT_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anchored/diagnostics.hpp"
#include "anchored/harness/config.hpp"
#include "anchored/problems.hpp"
#include "anchored/runner.hpp"

namespace anchored::harness {

SaddleProblem<double> build_problem(const ProblemSpec& spec);

RunConfig<double> build_run_config(const ExperimentConfig& config,
                                   const SaddleProblem<double>& problem);

struct ExperimentSummary {
  std::string label;
  bool complete = false;
  std::string error;
  Index iterations = 0;
  double final_grad_norm_sq = 0;
  std::optional<RateReport> rate;
  std::string rate_note;
  std::optional<LyapunovReport> lyapunov;  // absent when z* is unknown
  std::vector<std::string> warnings;
  std::string csv_path;
  std::string coords_path;
  int exit_code = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  RunResult<double> run;
  std::optional<BoundConstants> bound_constants;
  ExperimentSummary summary;
};

/// Runs the solver and computes diagnostics; writes nothing.
ExperimentResult execute(const ExperimentConfig& config);

/// execute() plus the CSV (flushed even for partial runs) and, for 1 x 1
/// problems, the coordinate sidecar `<stem>.coords.csv`.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs configs concurrently; results come back in input order.
std::vector<ExperimentResult> run_suite(const std::vector<ExperimentConfig>& configs);

void print_summary(std::ostream& os, const ExperimentSummary& summary, bool color);

std::string coords_path_for(const std::string& csv_path);

}  // namespace anchored::harness

#endif  // ANCHORED_HARNESS_EXPERIMENT_HPP
