#include "ednet/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>

namespace ednet {

using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
  if (name == "fw") return Algorithm::FrankWolfe;
  if (name == "pga") return Algorithm::Pga;
  if (name == "maxsum") return Algorithm::MaxSum;
  if (name == "maxalpha") return Algorithm::MaxAlpha;
  throw ConfigError("unknown algorithm: " + name +
                    " (expected fw|pga|maxsum|maxalpha)");
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FrankWolfe:
      return "fw";
    case Algorithm::Pga:
      return "pga";
    case Algorithm::MaxSum:
      return "maxsum";
    case Algorithm::MaxAlpha:
      return "maxalpha";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "source_scale") return SweepAxis::SourceScale;
  if (name == "capacity_downsize") return SweepAxis::CapacityDownsize;
  throw ConfigError("unknown sweep axis: " + name +
                    " (expected source_scale|capacity_downsize)");
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

RunRecord run_solver(const Scenario& scenario, Algorithm algorithm,
                     const RunParams& params) {
  RunRecord record;
  record.algorithm = algorithm_name(algorithm);

  const auto t0 = std::chrono::steady_clock::now();
  switch (algorithm) {
    case Algorithm::FrankWolfe:
      record.trajectory = frank_wolfe(scenario, params.solver);
      break;
    case Algorithm::Pga:
      record.trajectory = pga(scenario, params.solver);
      break;
    case Algorithm::MaxSum:
      record.trajectory = max_sum(scenario);
      break;
    case Algorithm::MaxAlpha:
      record.trajectory = max_alpha(scenario, params.solver);
      break;
  }
  record.solve_seconds = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  record.eval = estimation_error_report(
      record.trajectory.final, scenario, params.realizations, params.eval_seed,
      params.fixed_beta, params.eval_utility_samples);
  record.eval_seconds = seconds_since(t1);
  return record;
}

std::vector<CompareRow> run_compare(const Scenario& scenario,
                                    const RunParams& params,
                                    std::vector<RunRecord>* records) {
  const Algorithm order[] = {Algorithm::FrankWolfe, Algorithm::Pga,
                             Algorithm::MaxSum, Algorithm::MaxAlpha};
  std::vector<CompareRow> rows;
  double u_fw = 0.0;
  for (Algorithm a : order) {
    RunParams per_run = params;
    per_run.solver.seed = derive_seed(
        {params.solver.seed, 0x414c47, static_cast<std::uint64_t>(a)});
    RunRecord rec = run_solver(scenario, a, per_run);
    CompareRow row;
    row.algorithm = rec.algorithm;
    row.utility = rec.eval.utility.value;
    row.utility_se = rec.eval.utility.std_error;
    row.mean_error = rec.eval.mean_error_avg;
    row.error_se = rec.eval.error_se_avg;
    row.runtime_s = rec.solve_seconds;
    if (a == Algorithm::FrankWolfe) u_fw = row.utility;
    rows.push_back(row);
    if (records) records->push_back(std::move(rec));
  }
  for (CompareRow& row : rows)
    row.norm_utility = u_fw != 0.0 ? row.utility / u_fw
                                   : std::numeric_limits<double>::quiet_NaN();
  return rows;
}

Scenario scale_scenario(const Scenario& scenario, SweepAxis axis,
                        double factor) {
  if (!(factor > 0.0)) throw ConfigError("sweep factor must be positive");
  Scenario scaled = scenario;
  if (axis == SweepAxis::SourceScale) {
    for (auto& g : scaled.gen_rates) g *= factor;
  } else {
    for (Edge& e : scaled.network.edges) e.capacity /= factor;
  }
  return scaled;
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, SweepAxis axis,
                                const std::vector<double>& factors,
                                const RunParams& params) {
  if (factors.empty()) throw ConfigError("sweep requires at least one factor");
  std::vector<SweepRow> rows;
  for (double factor : factors) {
    const Scenario scaled = scale_scenario(scenario, axis, factor);
    // Per-algorithm seeds do not depend on the factor, so factor 1 rows
    // reproduce the plain comparison.
    const auto compare_rows = run_compare(scaled, params);
    for (const CompareRow& c : compare_rows)
      rows.push_back(SweepRow{factor, c.algorithm, c.utility, c.mean_error});
  }
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows, bool timings) {
  std::ostringstream out;
  out << "algorithm,utility,utility_se,norm_utility,mean_error,error_se,"
         "runtime_s\n";
  for (const CompareRow& r : rows) {
    out << r.algorithm << ',' << format_double(r.utility) << ','
        << format_double(r.utility_se) << ',' << format_double(r.norm_utility)
        << ',' << format_double(r.mean_error) << ','
        << format_double(r.error_se) << ',';
    if (timings) out << format_double(r.runtime_s);
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "factor,algorithm,utility,mean_error\n";
  for (const SweepRow& r : rows)
    out << format_double(r.factor) << ',' << r.algorithm << ','
        << format_double(r.utility) << ',' << format_double(r.mean_error)
        << '\n';
  return out.str();
}

std::string trajectory_csv(const SolveTrajectory& trajectory) {
  std::ostringstream out;
  out << "k,tau,estimated_U,grad_inf_norm,lp_value\n";
  for (const IterateRecord& it : trajectory.iterates)
    out << it.k << ',' << format_double(it.tau) << ','
        << format_double(it.utility_estimate) << ','
        << format_double(it.grad_inf_norm) << ','
        << format_double(it.lp_value) << '\n';
  return out.str();
}

std::string run_record_json(const Scenario& scenario, const RunRecord& record,
                            const RunParams& params, bool timings) {
  json j;
  j["format"] = "ednet-run-v1";
  j["algorithm"] = record.algorithm;
  j["params"] = {
      {"delta", params.solver.delta},
      {"seed", params.solver.seed},
      {"gradient_samples", params.solver.estimator.sample_count},
      {"truncation_multiplier", params.solver.estimator.truncation_multiplier},
      {"explicit_truncation", params.solver.estimator.explicit_truncation},
      {"utility_samples", params.eval_utility_samples},
      {"trajectory_utility_samples",
       params.solver.trajectory_utility_samples},
      {"realizations", params.realizations},
      {"fixed_beta", params.fixed_beta},
      {"eval_seed", params.eval_seed},
      {"alpha", params.solver.alpha},
      {"pga_iterations", params.solver.pga.iterations},
      {"pga_projection_iterations", params.solver.pga.projection_iterations},
      {"pga_step_scale", params.solver.pga.step_scale},
  };

  const auto violations =
      feasibility_check(record.trajectory.final, scenario, 1e-6);
  double max_violation = 0.0;
  for (const Violation& v : violations)
    max_violation = std::max(max_violation, v.magnitude);
  j["final"] = {{"rates", std::vector<double>(
                              record.trajectory.final.values.data(),
                              record.trajectory.final.values.data() +
                                  record.trajectory.final.values.size())},
                {"feasible", violations.empty()},
                {"max_violation", max_violation}};

  j["iterations"] = record.trajectory.iterates.size();
  j["lp_pivots_total"] = record.trajectory.lp_pivots_total;

  j["eval"] = {{"utility", record.eval.utility.value},
               {"utility_se", record.eval.utility.std_error},
               {"mean_error", record.eval.mean_error},
               {"error_se", record.eval.error_se},
               {"mean_error_avg", record.eval.mean_error_avg},
               {"error_se_avg", record.eval.error_se_avg},
               {"realizations", record.eval.realizations},
               {"fixed_beta", record.eval.fixed_beta},
               {"infeasible_input", record.eval.infeasible_input}};

  if (timings)
    j["timings"] = {{"solve_seconds", record.solve_seconds},
                    {"eval_seconds", record.eval_seconds}};
  return j.dump(2) + "\n";
}

}  // namespace ednet
