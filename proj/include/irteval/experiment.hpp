#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irteval/calibration.hpp"
#include "irteval/session.hpp"
#include "irteval/simulation.hpp"

namespace irteval {

/// Where an experiment's item bank comes from: a bank file or a synthetic
/// specification. Exactly one must be set.
struct BankSource {
  std::optional<std::filesystem::path> file;
  std::optional<SyntheticBankSpec> synthetic;
};

/// One strategy-comparison experiment over a simulated training run.
struct ExperimentConfig {
  BankSource bank;
  std::optional<TrajectorySpec> trajectory_spec;
  std::optional<std::filesystem::path> trajectory_file;
  std::vector<Strategy> strategies;
  std::vector<int> budgets;
  int replications = 1;
  std::uint64_t master_seed = 0;
  double prior_mean = 0.0;
  double prior_sd = 1.0;
  // Optional second bank; enables rank-distance validity against full-bank
  // accuracy on that bank.
  std::optional<BankSource> reference_bank;
  // Optional dynamic-stopping analysis (items-to-stop table, replication 0).
  std::optional<double> se_threshold;
};

ExperimentConfig parse_experiment_config(const std::filesystem::path& path);

/// Metrics of one (strategy, budget, replication) cell. Metric fields are
/// absent when the curve was degenerate for that metric.
struct CellResult {
  Strategy strategy = Strategy::fluid;
  int budget = 0;
  int replication = 0;
  std::vector<double> scores;  // one per checkpoint
  std::optional<double> tv;
  std::optional<double> monotonicity;
  std::optional<double> rank_distance;
};

struct SelectionRecord {
  int checkpoint = 0;
  int step = 0;
  std::string item_id;
  double difficulty = 0.0;
};

struct StopRecord {
  int checkpoint = 0;
  int items_administered = 0;
  double final_se = 0.0;
  StopReason stop_reason = StopReason::se_threshold;
};

struct CompareOutput {
  std::vector<ItemParams> bank;
  std::vector<Ability> trajectory;
  std::vector<Strategy> strategies;
  std::vector<int> budgets;
  int replications = 0;
  bool has_reference = false;
  std::vector<CellResult> cells;           // ordered by (strategy, budget, replication)
  std::vector<SelectionRecord> selections; // FLUID, first budget, replication 0
  std::vector<StopRecord> stops;           // present when se_threshold configured
};

/// Runs every (strategy, budget, replication) cell: evaluates each
/// checkpoint of the simulated trajectory with the strategy, assembles the
/// training curve, and computes total variation, monotonicity, and (with a
/// reference bank) rank-distance validity. Cells and checkpoints execute
/// concurrently; output is deterministic for a given config.
CompareOutput run_compare(const ExperimentConfig& config);

/// Writes results.tsv, curves.tsv, aggregate.tsv, bank.tsv, trajectory.tsv
/// and, when populated, selections.tsv and stops.tsv into `out_dir`.
void write_compare_output(const CompareOutput& output, const std::filesystem::path& out_dir);

/// Unweighted mean of a metric over replications; empty when every cell is
/// missing the metric.
std::optional<double> aggregate_mean(const CompareOutput& output, Strategy strategy, int budget,
                                     std::optional<double> CellResult::*metric);

std::vector<ItemParams> load_bank_source(const BankSource& source);
std::vector<Ability> load_trajectory(const ExperimentConfig& config);

/// Plain two-column trajectory table (checkpoint, theta).
void write_trajectory_file(std::span<const Ability> trajectory, const std::filesystem::path& path);
std::vector<Ability> read_trajectory_file(const std::filesystem::path& path);

}  // namespace irteval
