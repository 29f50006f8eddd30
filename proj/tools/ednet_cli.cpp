// Command-line front end: scenario generation, solver runs, baseline
// comparison, parameter sweeps, and theory-constant diagnostics.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ednet/runner.hpp"
#include "ednet/scenario_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ednet::IoError("cannot write output file: " + path);
  out << content;
  if (!out) throw ednet::IoError("failed writing output file: " + path);
}

struct CommonOpts {
  std::uint64_t seed = 1;
  double delta = 0.01;
  int samples = 100;
  double trunc_mult = 2.0;
  int explicit_trunc = -1;
  int utility_samples = 1000;
  int trajectory_utility_samples = 100;
  int realizations = 1000;
  bool fixed_beta = false;
  std::uint64_t eval_seed = 9001;
  double alpha = 5.0;
  int pga_iters = 100;
  int pga_proj_iters = 50;
  double pga_step_scale = 0.05;
  bool timings = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "solver base seed");
    cmd->add_option("--delta", delta, "Frank-Wolfe step fraction in (0,1]");
    cmd->add_option("--samples", samples, "gradient estimator sample count N");
    cmd->add_option("--trunc-mult", trunc_mult,
                    "truncation multiplier m, n' = ceil(m max lambda T)");
    cmd->add_option("--trunc", explicit_trunc, "explicit truncation n'");
    cmd->add_option("--utility-samples", utility_samples,
                    "Monte Carlo samples for utility evaluation");
    cmd->add_option("--trajectory-utility-samples",
                    trajectory_utility_samples,
                    "per-iterate utility samples (0 disables)");
    cmd->add_option("--realizations", realizations,
                    "evaluation realizations R");
    cmd->add_flag("--fixed-beta", fixed_beta,
                  "evaluate against the scenario's fixed true models");
    cmd->add_option("--eval-seed", eval_seed, "evaluation seed");
    cmd->add_option("--alpha", alpha, "MaxAlpha fairness exponent");
    cmd->add_option("--pga-iters", pga_iters, "PGA iterations");
    cmd->add_option("--pga-proj-iters", pga_proj_iters,
                    "PGA projection iterations");
    cmd->add_option("--pga-step-scale", pga_step_scale, "PGA step scale");
    cmd->add_flag("--timings", timings,
                  "include wall-clock columns in CSV output");
  }

  ednet::RunParams run_params() const {
    ednet::RunParams p;
    p.solver.delta = delta;
    p.solver.seed = seed;
    p.solver.estimator.sample_count = samples;
    p.solver.estimator.truncation_multiplier = trunc_mult;
    p.solver.estimator.explicit_truncation = explicit_trunc;
    p.solver.estimator.utility_samples = utility_samples;
    p.solver.trajectory_utility_samples = trajectory_utility_samples;
    p.solver.alpha = alpha;
    p.solver.pga.iterations = pga_iters;
    p.solver.pga.projection_iterations = pga_proj_iters;
    p.solver.pga.step_scale = pga_step_scale;
    p.realizations = realizations;
    p.fixed_beta = fixed_beta;
    p.eval_utility_samples = utility_samples;
    p.eval_seed = eval_seed;
    p.timings = timings;
    return p;
  }
};

std::vector<double> parse_factors(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    const std::string tok = csv.substr(pos, comma - pos);
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ednet::ConfigError("bad factor value: " + tok);
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"experimental design networks: rate allocation over a DAG"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand(
      "gen", "materialize a scenario from a generator config");
  std::string gen_config, gen_out;
  gen->add_option("config", gen_config, "config JSON path")->required();
  gen->add_option("out", gen_out, "output scenario JSON path")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on a scenario");
  std::string solve_scenario, solve_algorithm, solve_out, solve_csv;
  CommonOpts solve_opts;
  solve->add_option("scenario", solve_scenario, "scenario JSON")->required();
  solve->add_option("--algorithm", solve_algorithm,
                    "fw|pga|maxsum|maxalpha")->required();
  solve->add_option("--out", solve_out, "run record JSON path");
  solve->add_option("--iters-csv", solve_csv, "per-iteration CSV path");
  solve_opts.attach(solve);

  // compare
  auto* compare = app.add_subcommand(
      "compare", "run all four algorithms with shared evaluation seeds");
  std::string compare_scenario, compare_out;
  CommonOpts compare_opts;
  compare->add_option("scenario", compare_scenario, "scenario JSON")
      ->required();
  compare->add_option("--out", compare_out, "comparison CSV path")->required();
  compare_opts.attach(compare);

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "rescale source rates or capacities and rerun all algorithms");
  std::string sweep_scenario, sweep_axis, sweep_factors, sweep_out;
  CommonOpts sweep_opts;
  sweep->add_option("scenario", sweep_scenario, "scenario JSON")->required();
  sweep->add_option("--axis", sweep_axis, "source_scale|capacity_downsize")
      ->required();
  sweep->add_option("--factors", sweep_factors, "comma-separated factors")
      ->required();
  sweep->add_option("--out", sweep_out, "sweep CSV path")->required();
  sweep_opts.attach(sweep);

  // constants
  auto* constants = app.add_subcommand(
      "constants", "print lambda_max, G_max, L and suggested K, n', N");
  std::string constants_scenario;
  double eps0 = 0.1, eps1 = 0.1, eps2 = 0.1;
  constants->add_option("scenario", constants_scenario, "scenario JSON")
      ->required();
  constants->add_option("--eps0", eps0, "failure probability budget");
  constants->add_option("--eps1", eps1, "truncation budget");
  constants->add_option("--eps2", eps2, "additive suboptimality budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage/help
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const ednet::ScenarioConfig cfg =
          ednet::load_scenario_config(gen_config);
      const ednet::Scenario sc = ednet::build_scenario(cfg);
      ednet::save_scenario(sc, gen_out);
      std::cout << "wrote " << gen_out << " (" << sc.network.node_count
                << " nodes, " << sc.network.edges.size() << " edges, "
                << sc.topology_stats.directed_pre_pruning
                << " directed pre-pruning)\n";
      return kExitOk;
    }

    if (solve->parsed()) {
      ednet::Algorithm algorithm;
      try {
        algorithm = ednet::parse_algorithm(solve_algorithm);
      } catch (const ednet::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
      const ednet::Scenario sc = ednet::load_scenario(solve_scenario);
      const ednet::RunParams params = solve_opts.run_params();
      const ednet::RunRecord record =
          ednet::run_solver(sc, algorithm, params);
      if (record.eval.infeasible_input)
        std::cerr << "warning: final point infeasible (max violation "
                  << record.eval.max_violation << ")\n";
      if (!solve_out.empty())
        write_file(solve_out, ednet::run_record_json(sc, record, params,
                                                     params.timings));
      if (!solve_csv.empty())
        write_file(solve_csv, ednet::trajectory_csv(record.trajectory));
      std::cout << "algorithm=" << record.algorithm
                << " utility=" << ednet::format_double(record.eval.utility.value)
                << " mean_error="
                << ednet::format_double(record.eval.mean_error_avg) << "\n";
      return kExitOk;
    }

    if (compare->parsed()) {
      const ednet::Scenario sc = ednet::load_scenario(compare_scenario);
      const ednet::RunParams params = compare_opts.run_params();
      const auto rows = ednet::run_compare(sc, params);
      write_file(compare_out, ednet::compare_csv(rows, params.timings));
      std::cout << "wrote " << compare_out << "\n";
      return kExitOk;
    }

    if (sweep->parsed()) {
      ednet::SweepAxis axis;
      try {
        axis = ednet::parse_sweep_axis(sweep_axis);
      } catch (const ednet::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
      const auto factors = parse_factors(sweep_factors);
      const ednet::Scenario sc = ednet::load_scenario(sweep_scenario);
      const ednet::RunParams params = sweep_opts.run_params();
      const auto rows = ednet::run_sweep(sc, axis, factors, params);
      write_file(sweep_out, ednet::sweep_csv(rows));
      std::cout << "wrote " << sweep_out << "\n";
      return kExitOk;
    }

    if (constants->parsed()) {
      const ednet::Scenario sc = ednet::load_scenario(constants_scenario);
      const ednet::TheoryConstants tc = ednet::compute_theory_constants(sc);
      const ednet::RateIndex idx = sc.rate_index();
      const double x_l =
          static_cast<double>(idx.feature_count) * idx.learner_count;
      const double k_suggest =
          ((std::sqrt(2.0) / 2.0) * x_l * sc.horizon * tc.lambda_max *
               tc.lambda_max +
           2.0 * tc.lambda_max) *
          tc.g_max / eps2;
      const double n_prime_suggest =
          tc.lambda_max * sc.horizon + std::log(1.0 / eps1);
      const double n_samples_suggest =
          sc.horizon * sc.horizon * n_prime_suggest * k_suggest * k_suggest *
          std::log(x_l * k_suggest / eps0);
      std::cout << "lambda_max " << ednet::format_double(tc.lambda_max) << "\n"
                << "g_max " << ednet::format_double(tc.g_max) << "\n"
                << "lipschitz " << ednet::format_double(tc.lipschitz) << "\n"
                << "suggested_K " << ednet::format_double(std::ceil(k_suggest))
                << "\n"
                << "suggested_n_prime "
                << ednet::format_double(std::ceil(n_prime_suggest)) << "\n"
                << "suggested_N "
                << ednet::format_double(std::ceil(n_samples_suggest)) << "\n";
      return kExitOk;
    }
  } catch (const ednet::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
