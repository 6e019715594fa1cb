// feasimap CLI: run feasibility-search campaigns and inspect results.
//
//   feasimap run <config.toml> [overrides]   execute a campaign
//   feasimap grid <problem> <model> <res>    grid predictions for plotting
//   feasimap compare <dir>                   method comparison table
//   feasimap rho <problem> <samples>         Monte Carlo feasible volume

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "feasimap/campaign.hpp"
#include "feasimap/errors.hpp"
#include "feasimap/kern/kernels.hpp"
#include "feasimap/problems.hpp"

int main(int argc, char** argv) {
  CLI::App app{"feasimap: Bayesian search for feasible design spaces"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a campaign from a TOML config");
  std::string config_path;
  run->add_option("config", config_path, "Campaign config file")->required();
  std::string output_dir_flag;
  run->add_option("--output-dir", output_dir_flag, "Override output directory");
  int reps_flag = -1;
  run->add_option("--reps", reps_flag, "Override repetitions per (problem, method)");
  long long seed_flag = -1;
  run->add_option("--master-seed", seed_flag, "Override master seed");
  int workers_flag = -1;
  run->add_option("--workers", workers_flag, "Worker threads (default: cores)");
  std::vector<std::string> problems_flag, methods_flag;
  run->add_option("--problems", problems_flag, "Override problem list");
  run->add_option("--methods", methods_flag, "Override method list");
  int validation_flag = -1;
  run->add_option("--validation-samples", validation_flag, "Override validation sample count");
  int budget_mult_flag = -1;
  run->add_option("--budget-multiplier", budget_mult_flag, "Override budget multiplier");
  int acq_mult_flag = -1;
  run->add_option("--acq-eval-multiplier", acq_mult_flag, "Override acquisition eval multiplier");

  // grid
  auto* grid = app.add_subcommand("grid", "Evaluate a stored model on a grid");
  std::string grid_problem, grid_model, grid_out;
  std::size_t grid_res = 0;
  grid->add_option("problem", grid_problem, "Problem id")->required();
  grid->add_option("model", grid_model, "Multi-surrogate JSON file")->required();
  grid->add_option("resolution", grid_res, "Points per axis")->required();
  grid->add_option("--out", grid_out, "Write CSV here instead of stdout");

  // compare
  auto* compare = app.add_subcommand("compare", "Summarize a campaign directory");
  std::string compare_dir;
  compare->add_option("dir", compare_dir, "Campaign output directory")->required();

  // rho
  auto* rho = app.add_subcommand("rho", "Monte Carlo feasible-volume percentage");
  std::string rho_problem;
  std::size_t rho_samples = 0;
  long long rho_seed = 2024;
  rho->add_option("problem", rho_problem, "Problem id")->required();
  rho->add_option("samples", rho_samples, "Number of uniform samples (>= 1e4)")->required();
  rho->add_option("--seed", rho_seed, "Sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      feasimap::CampaignConfig cfg = feasimap::load_campaign_config(config_path);
      if (const char* env = std::getenv("FEASIMAP_OUT")) cfg.output_dir = env;
      if (!output_dir_flag.empty()) cfg.output_dir = output_dir_flag;
      if (reps_flag > 0) cfg.reps = reps_flag;
      if (seed_flag >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_flag);
      if (workers_flag > 0) cfg.workers = workers_flag;
      if (!problems_flag.empty()) cfg.problems = problems_flag;
      if (!methods_flag.empty()) cfg.methods = methods_flag;
      if (validation_flag > 0) cfg.validation_samples = validation_flag;
      if (budget_mult_flag > 0) cfg.budget_multiplier = budget_mult_flag;
      if (acq_mult_flag > 0) cfg.acq_eval_multiplier = acq_mult_flag;

      std::fprintf(stderr, "kernel lane: %s\n", feasimap::kern::ops().name);
      const feasimap::CampaignOutcome outcome = feasimap::run_campaign(cfg);
      std::printf("executed %d runs (%d skipped, %d aborted); summary: %s\n", outcome.executed,
                  outcome.skipped, outcome.aborted, outcome.summary_path.c_str());
      std::cout << feasimap::compare_report(cfg.output_dir);
    } else if (*grid) {
      const std::string csv = feasimap::emit_grid(grid_problem, grid_model, grid_res);
      if (grid_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(grid_out);
        if (!out) throw feasimap::InputError("cannot open " + grid_out);
        out << csv;
      }
    } else if (*compare) {
      std::cout << feasimap::compare_report(compare_dir);
    } else if (*rho) {
      const auto& spec = feasimap::problem_by_id(rho_problem);
      const double value = feasimap::monte_carlo_rho(spec, rho_samples,
                                                     static_cast<std::uint64_t>(rho_seed));
      std::printf("%s rho = %.4f%% (reference %.4f%%, %zu samples)\n", spec.id.c_str(), value,
                  spec.reference_rho, rho_samples);
    }
  } catch (const feasimap::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
