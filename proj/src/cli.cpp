#include "irteval/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <unordered_map>

#include "json.hpp"

#include "irteval/calibration.hpp"
#include "irteval/data_io.hpp"
#include "irteval/experiment.hpp"
#include "irteval/logging.hpp"
#include "irteval/metrics.hpp"
#include "irteval/report.hpp"
#include "irteval/simulation.hpp"

namespace irteval {

namespace {

using nlohmann::json;

CalibrationConfig load_calibration_config(const std::optional<std::filesystem::path>& path) {
  CalibrationConfig config;
  if (!path) return config;
  const json root = json::parse(read_file(*path), nullptr, false);
  if (root.is_discarded()) throw ParseError(path->string() + ": malformed JSON");
  config.chain_count = root.value("chain_count", config.chain_count);
  config.iterations_per_chain = root.value("iterations_per_chain", config.iterations_per_chain);
  config.burn_in = root.value("burn_in", config.burn_in);
  config.thinning = root.value("thinning", config.thinning);
  config.seed = root.value("seed", config.seed);
  if (root.contains("proposal_scales")) {
    const json& scales = root.at("proposal_scales");
    config.proposal_scales.theta = scales.value("theta", config.proposal_scales.theta);
    config.proposal_scales.difficulty = scales.value("difficulty", config.proposal_scales.difficulty);
    config.proposal_scales.log_discrimination =
        scales.value("log_discrimination", config.proposal_scales.log_discrimination);
    config.proposal_scales.log_sigma = scales.value("log_sigma", config.proposal_scales.log_sigma);
  }
  return config;
}

}  // namespace

int cmd_fit(const FitOptions& options) {
  const ResponseMatrix matrix = read_response_matrix(options.matrix_path);
  CalibrationConfig config = load_calibration_config(options.config_path);
  if (options.seed_override) config.seed = *options.seed_override;

  const CalibratedBank bank = fit_2pl(matrix, config);
  write_item_bank(bank.items, options.out_bank_path);

  std::filesystem::path abilities_path = options.out_bank_path;
  abilities_path += ".abilities.tsv";
  write_train_abilities(bank.train_abilities, abilities_path);

  json diagnostics;
  diagnostics["location_shift"] = bank.diagnostics.location_shift;
  diagnostics["scale"] = bank.diagnostics.scale;
  diagnostics["max_r_hat"] = bank.diagnostics.max_r_hat;
  diagnostics["warnings"] = bank.diagnostics.warnings;
  json params = json::object();
  for (const ParameterDiagnostic& d : bank.diagnostics.parameters) {
    params[d.name] = {{"acceptance_rate", d.acceptance_rate}, {"r_hat", d.r_hat}};
  }
  diagnostics["parameters"] = std::move(params);

  if (options.truth_bank_path) {
    const std::vector<ItemParams> truth = read_item_bank(*options.truth_bank_path);
    std::unordered_map<std::string, const ItemParams*> truth_by_id;
    for (const auto& item : truth) truth_by_id.emplace(item.item_id, &item);
    std::vector<double> true_a, true_b, est_a, est_b;
    for (const auto& item : bank.items) {
      const auto it = truth_by_id.find(item.item_id);
      if (it == truth_by_id.end()) continue;
      true_a.push_back(it->second->discrimination);
      true_b.push_back(it->second->difficulty);
      est_a.push_back(item.discrimination);
      est_b.push_back(item.difficulty);
    }
    if (true_a.size() < 2) {
      throw ValidationError("truth bank shares fewer than 2 item ids with the fitted bank");
    }
    json recovery;
    recovery["difficulty_pearson"] = pearson_correlation(true_b, est_b);
    recovery["difficulty_spearman"] = spearman_correlation(true_b, est_b);
    recovery["discrimination_pearson"] = pearson_correlation(true_a, est_a);
    diagnostics["recovery"] = std::move(recovery);
    std::printf("recovery: difficulty r=%.4f (rank %.4f), discrimination r=%.4f\n",
                diagnostics["recovery"]["difficulty_pearson"].get<double>(),
                diagnostics["recovery"]["difficulty_spearman"].get<double>(),
                diagnostics["recovery"]["discrimination_pearson"].get<double>());
  }

  std::filesystem::path diagnostics_path = options.out_bank_path;
  diagnostics_path += ".diagnostics.json";
  write_file(diagnostics_path, diagnostics.dump(2) + "\n");

  for (const std::string& warning : bank.diagnostics.warnings) {
    log_warning("fit: " + warning);
  }
  std::printf("fit: %d items, %d models, max R-hat %.4f\n", static_cast<int>(bank.items.size()),
              static_cast<int>(bank.train_abilities.size()), bank.diagnostics.max_r_hat);
  std::printf("fit: wrote %s, %s, %s\n", options.out_bank_path.c_str(), abilities_path.c_str(),
              diagnostics_path.c_str());
  return 0;
}

int cmd_run(const RunOptions& options) {
  const std::vector<ItemParams> bank = read_item_bank(options.bank_path);

  std::unique_ptr<ResponseOracle> oracle;
  if (options.simulate_theta) {
    if (options.responses_path) {
      throw ValidationError("run: set either --simulate-theta or --responses, not both");
    }
    oracle = simulated_oracle(Ability{*options.simulate_theta}, bank, options.oracle_seed);
  } else if (options.responses_path) {
    if (!options.model_id) {
      throw ValidationError("run: --responses requires --model-id to pick the row");
    }
    const ResponseMatrix matrix = read_response_matrix(*options.responses_path);
    const auto row = std::find(matrix.model_ids.begin(), matrix.model_ids.end(), *options.model_id);
    if (row == matrix.model_ids.end()) {
      throw ValidationError("run: model '" + *options.model_id + "' not present in " +
                            options.responses_path->string());
    }
    const int i = static_cast<int>(row - matrix.model_ids.begin());
    std::unordered_map<std::string, bool> responses;
    for (int j = 0; j < matrix.item_count(); ++j) {
      const Cell c = matrix.at(i, j);
      if (c == Cell::missing) continue;
      responses.emplace(matrix.item_ids[j], c == Cell::correct);
    }
    oracle = std::make_unique<RecordedResponses>(std::move(responses));
  } else {
    throw ValidationError("run: an oracle source is required (--simulate-theta or --responses)");
  }

  const EvalSession session = run_session(bank, *oracle, options.session);
  write_session_log(session, options.out_log_path);
  std::printf("run: strategy=%s items=%d final_score=%.6f stop_reason=%s\n",
              std::string(to_string(session.config.strategy)).c_str(),
              static_cast<int>(session.administered.size()), session.final_score,
              std::string(to_string(session.stop_reason)).c_str());
  std::printf("run: wrote %s\n", options.out_log_path.c_str());
  return 0;
}

int cmd_compare(const CompareOptions& options) {
  ExperimentConfig config = parse_experiment_config(options.config_path);
  if (options.seed_override) config.master_seed = *options.seed_override;

  const CompareOutput output = run_compare(config);
  write_compare_output(output, options.out_dir);

  for (Strategy strategy : output.strategies) {
    for (int budget : output.budgets) {
      const auto tv = aggregate_mean(output, strategy, budget, &CellResult::tv);
      const auto mono = aggregate_mean(output, strategy, budget, &CellResult::monotonicity);
      std::printf("compare: %s budget=%d mean_tv=%s mean_monotonicity=%s\n",
                  std::string(to_string(strategy)).c_str(), budget,
                  tv ? format_double(*tv).c_str() : "n/a", mono ? format_double(*mono).c_str() : "n/a");
    }
  }
  std::printf("compare: wrote tables to %s\n", options.out_dir.c_str());
  return 0;
}

int cmd_report(const ReportOptions& options) {
  const std::vector<std::filesystem::path> written = emit_report(options.results_dir, options.out_dir);
  for (const auto& path : written) {
    std::printf("report: wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace irteval
