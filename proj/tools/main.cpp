#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "irteval/cli.hpp"
#include "irteval/errors.hpp"
#include "irteval/logging.hpp"
#include "irteval/version.hpp"

namespace {

int dispatch(int argc, char** argv) {
  CLI::App app{"Item-response-theory evaluation engine: calibrate item banks, "
               "estimate abilities, run adaptive evaluation sessions, and compare strategies"};
  app.set_version_flag("--version", std::string(irteval::kToolVersion));
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_override;
  std::string log_level = "info";
  int threads = 0;
  app.add_option("--seed", seed_override, "Override the seed of the invoked command");
  app.add_option("--log-level", log_level, "debug|info|warning|error|off")->capture_default_str();
  app.add_option("--threads", threads, "Worker thread count (0 = library default)");

  // fit ----------------------------------------------------------------
  irteval::FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Calibrate a 2PL item bank from a response matrix");
  fit_cmd->add_option("--matrix", fit.matrix_path, "Response matrix CSV")->required();
  fit_cmd->add_option("--config", fit.config_path, "Calibration config JSON (defaults when omitted)");
  fit_cmd->add_option("--out", fit.out_bank_path, "Output item bank TSV")->required();
  fit_cmd->add_option("--truth-bank", fit.truth_bank_path,
                      "Known generating bank; adds recovery correlations to the diagnostics");

  // run ----------------------------------------------------------------
  irteval::RunOptions run;
  std::string strategy = "fluid";
  std::optional<int> budget;
  std::optional<double> se_threshold;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one evaluation session against a calibrated bank");
  run_cmd->add_option("--bank", run.bank_path, "Item bank TSV")->required();
  run_cmd->add_option("--strategy", strategy, "fluid|random|random-irt")->capture_default_str();
  run_cmd->add_option("--budget", budget, "Maximum number of items to administer");
  run_cmd->add_option("--se-threshold", se_threshold, "Stop once the ability standard error drops below this");
  run_cmd->add_option("--session-seed", run.session.seed, "Seed for seeded strategies");
  run_cmd->add_option("--prior-mean", run.session.prior_mean, "Ability prior mean")->capture_default_str();
  run_cmd->add_option("--prior-sd", run.session.prior_sd, "Ability prior sd")->capture_default_str();
  run_cmd->add_option("--responses", run.responses_path, "Recorded response matrix CSV");
  run_cmd->add_option("--model-id", run.model_id, "Row of --responses to evaluate");
  run_cmd->add_option("--simulate-theta", run.simulate_theta, "Simulate a test-taker at this true ability");
  run_cmd->add_option("--oracle-seed", run.oracle_seed, "Seed for the simulated oracle");
  run_cmd->add_option("--out", run.out_log_path, "Output session log (JSON lines)")->required();

  // compare ------------------------------------------------------------
  irteval::CompareOptions compare;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Compare evaluation strategies over a simulated training run");
  compare_cmd->add_option("--config", compare.config_path, "Experiment config JSON")->required();
  compare_cmd->add_option("--out-dir", compare.out_dir, "Output directory for result tables")->required();

  // report -------------------------------------------------------------
  irteval::ReportOptions report;
  CLI::App* report_cmd = app.add_subcommand("report", "Render SVG plots from compare output");
  report_cmd->add_option("--results", report.results_dir, "Directory written by compare")->required();
  report_cmd->add_option("--out-dir", report.out_dir, "Output directory for plots")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  irteval::set_log_level(irteval::parse_log_level(log_level));
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif

  if (fit_cmd->parsed()) {
    fit.seed_override = seed_override;
    return irteval::cmd_fit(fit);
  }
  if (run_cmd->parsed()) {
    run.session.strategy = irteval::strategy_from_string(strategy);
    run.session.budget = budget;
    run.session.se_threshold = se_threshold;
    if (seed_override) run.session.seed = *seed_override;
    return irteval::cmd_run(run);
  }
  if (compare_cmd->parsed()) {
    compare.seed_override = seed_override;
    return irteval::cmd_compare(compare);
  }
  report.out_dir = report.out_dir.empty() ? report.results_dir : report.out_dir;
  return irteval::cmd_report(report);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const irteval::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const irteval::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
