#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ednet/evaluate.hpp"
#include "ednet/scenario.hpp"
#include "ednet/solvers.hpp"

namespace ednet {

enum class Algorithm { FrankWolfe, Pga, MaxSum, MaxAlpha };

Algorithm parse_algorithm(const std::string& name);  // throws ConfigError
std::string algorithm_name(Algorithm a);

struct RunParams {
  SolverParams solver;
  int realizations = 1000;
  bool fixed_beta = false;
  int eval_utility_samples = 1000;
  std::uint64_t eval_seed = 9001;
  bool timings = false;  // wall-clock fields in CSV output
};

struct RunRecord {
  std::string algorithm;
  SolveTrajectory trajectory;
  EvalReport eval;
  double solve_seconds = 0.0;
  double eval_seconds = 0.0;
};

/// Runs one solver and evaluates its final point.
RunRecord run_solver(const Scenario& scenario, Algorithm algorithm,
                     const RunParams& params);

struct CompareRow {
  std::string algorithm;
  double utility = 0.0;
  double utility_se = 0.0;
  double norm_utility = 0.0;  // utility / U_FW
  double mean_error = 0.0;
  double error_se = 0.0;
  double runtime_s = 0.0;
};

/// Runs all four algorithms with shared evaluation seeds.
std::vector<CompareRow> run_compare(const Scenario& scenario,
                                    const RunParams& params,
                                    std::vector<RunRecord>* records = nullptr);

enum class SweepAxis { SourceScale, CapacityDownsize };

SweepAxis parse_sweep_axis(const std::string& name);  // throws ConfigError

struct SweepRow {
  double factor = 1.0;
  std::string algorithm;
  double utility = 0.0;
  double mean_error = 0.0;
};

/// Source rates multiplied by `factor`, or capacities divided by it.
Scenario scale_scenario(const Scenario& scenario, SweepAxis axis,
                        double factor);

std::vector<SweepRow> run_sweep(const Scenario& scenario, SweepAxis axis,
                                const std::vector<double>& factors,
                                const RunParams& params);

/// Fixed CSV schemas (see docs/formats.md).
std::string compare_csv(const std::vector<CompareRow>& rows, bool timings);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trajectory_csv(const SolveTrajectory& trajectory);
std::string run_record_json(const Scenario& scenario, const RunRecord& record,
                            const RunParams& params, bool timings);

/// Deterministic numeric formatting used in all CSV output.
std::string format_double(double value);

}  // namespace ednet
