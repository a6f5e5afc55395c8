#include "irteval/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "irteval/data_io.hpp"
#include "irteval/metrics.hpp"
#include "irteval/rng.hpp"

namespace irteval {

namespace {

using nlohmann::json;

SyntheticBankSpec parse_bank_spec(const json& node) {
  SyntheticBankSpec spec;
  spec.item_count = node.at("item_count").get<int>();
  spec.difficulty_mean = node.value("difficulty_mean", 0.0);
  spec.difficulty_sd = node.value("difficulty_sd", 1.0);
  spec.log_discrimination_mean = node.value("log_discrimination_mean", 0.0);
  spec.log_discrimination_sd = node.value("log_discrimination_sd", 0.5);
  spec.seed = node.value("seed", std::uint64_t{0});
  return spec;
}

BankSource parse_bank_source(const json& node, const std::filesystem::path& base) {
  BankSource source;
  if (node.contains("file")) {
    std::filesystem::path p = node.at("file").get<std::string>();
    if (p.is_relative()) p = base / p;
    source.file = p;
  }
  if (node.contains("synthetic")) {
    source.synthetic = parse_bank_spec(node.at("synthetic"));
  }
  if (source.file.has_value() == source.synthetic.has_value()) {
    throw ValidationError("bank source must set exactly one of 'file' and 'synthetic'");
  }
  return source;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::filesystem::path& path) {
  const json root = json::parse(read_file(path), nullptr, false);
  if (root.is_discarded()) throw ParseError(path.string() + ": malformed JSON");
  const std::filesystem::path base = path.parent_path();

  ExperimentConfig config;
  try {
    config.bank = parse_bank_source(root.at("bank"), base);
    if (root.contains("reference_bank")) {
      config.reference_bank = parse_bank_source(root.at("reference_bank"), base);
    }

    const json& traj = root.at("trajectory");
    if (traj.contains("file")) {
      std::filesystem::path p = traj.at("file").get<std::string>();
      if (p.is_relative()) p = base / p;
      config.trajectory_file = p;
    } else {
      TrajectorySpec spec;
      spec.checkpoint_count = traj.at("checkpoint_count").get<int>();
      spec.start_ability = traj.at("start_ability").get<double>();
      spec.end_ability = traj.at("end_ability").get<double>();
      spec.shape = trajectory_shape_from_string(traj.value("shape", "LINEAR"));
      spec.noise_sd = traj.value("noise_sd", 0.0);
      spec.seed = traj.value("seed", std::uint64_t{0});
      config.trajectory_spec = spec;
    }

    for (const json& s : root.at("strategies")) {
      config.strategies.push_back(strategy_from_string(s.get<std::string>()));
    }
    for (const json& b : root.at("budgets")) {
      config.budgets.push_back(b.get<int>());
    }
    config.replications = root.value("replications", 1);
    config.master_seed = root.value("master_seed", std::uint64_t{0});
    config.prior_mean = root.value("prior_mean", 0.0);
    config.prior_sd = root.value("prior_sd", 1.0);
    if (root.contains("se_threshold") && !root.at("se_threshold").is_null()) {
      config.se_threshold = root.at("se_threshold").get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  if (config.strategies.empty() || config.budgets.empty()) {
    throw ValidationError(path.string() + ": at least one strategy and one budget are required");
  }
  for (int budget : config.budgets) {
    if (budget <= 0) throw ValidationError(path.string() + ": budgets must be positive");
  }
  if (config.replications < 1) {
    throw ValidationError(path.string() + ": replications must be >= 1");
  }
  return config;
}

std::vector<ItemParams> load_bank_source(const BankSource& source) {
  if (source.file) return read_item_bank(*source.file);
  return generate_bank(*source.synthetic);
}

std::vector<Ability> load_trajectory(const ExperimentConfig& config) {
  if (config.trajectory_file) return read_trajectory_file(*config.trajectory_file);
  if (config.trajectory_spec) return generate_trajectory(*config.trajectory_spec);
  throw ValidationError("experiment config: trajectory spec or file required");
}

void write_trajectory_file(std::span<const Ability> trajectory, const std::filesystem::path& path) {
  std::string out = "checkpoint\ttheta\n";
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    out += std::to_string(t);
    out += '\t';
    out += format_double(trajectory[t].theta);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<Ability> read_trajectory_file(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<Ability> trajectory;
  std::size_t start = 0;
  int line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line_no == 1 || line.empty()) continue;  // header
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected two tab-separated fields");
    }
    char* parse_end = nullptr;
    const double theta = std::strtod(line.c_str() + tab + 1, &parse_end);
    if (parse_end == line.c_str() + tab + 1) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": invalid theta");
    }
    trajectory.push_back(Ability{theta});
  }
  if (trajectory.size() < 2) {
    throw ValidationError(path.string() + ": trajectory needs at least 2 checkpoints");
  }
  return trajectory;
}

namespace {

std::string checkpoint_id(int t) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "ckpt-%03d", t);
  return buffer;
}

TrainingCurve curve_from_scores(std::span<const double> scores, Strategy strategy, int budget) {
  TrainingCurve curve;
  curve.model_id = "simulated";
  curve.benchmark_id = std::string(to_string(strategy)) + "@" + std::to_string(budget);
  for (std::size_t t = 0; t < scores.size(); ++t) {
    curve.points.push_back({static_cast<int>(t), scores[t]});
  }
  return curve;
}

}  // namespace

CompareOutput run_compare(const ExperimentConfig& config) {
  CompareOutput output;
  output.bank = load_bank_source(config.bank);
  output.trajectory = load_trajectory(config);
  output.strategies = config.strategies;
  output.budgets = config.budgets;
  output.replications = config.replications;

  std::vector<ItemParams> reference_bank;
  if (config.reference_bank) {
    reference_bank = load_bank_source(*config.reference_bank);
    output.has_reference = true;
  }

  const int checkpoints = static_cast<int>(output.trajectory.size());
  const int cell_count =
      static_cast<int>(config.strategies.size() * config.budgets.size()) * config.replications;

  output.cells.resize(cell_count);
  for (std::size_t s = 0; s < config.strategies.size(); ++s) {
    for (std::size_t b = 0; b < config.budgets.size(); ++b) {
      for (int rep = 0; rep < config.replications; ++rep) {
        const int cell = static_cast<int>((s * config.budgets.size() + b) * config.replications) + rep;
        output.cells[cell].strategy = config.strategies[s];
        output.cells[cell].budget = config.budgets[b];
        output.cells[cell].replication = rep;
        output.cells[cell].scores.assign(checkpoints, 0.0);
      }
    }
  }

  // Selected items of the (FLUID, first budget, replication 0) cell feed
  // the item-selection map; slots are per checkpoint so parallel tasks can
  // fill them independently.
  std::vector<std::vector<SelectionRecord>> selection_slots(checkpoints);
  const bool track_selections =
      std::find(config.strategies.begin(), config.strategies.end(), Strategy::fluid) != config.strategies.end();

  const std::int64_t tasks = static_cast<std::int64_t>(cell_count) * checkpoints;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t task = 0; task < tasks; ++task) {
    const int cell = static_cast<int>(task / checkpoints);
    const int t = static_cast<int>(task % checkpoints);
    CellResult& result = output.cells[cell];

    const std::uint64_t oracle_seed = rng::derive(
        config.master_seed, {rng::hash_bytes("oracle"), static_cast<std::uint64_t>(result.replication),
                             static_cast<std::uint64_t>(t)});
    const SimulatedOracle oracle(output.trajectory[t], output.bank, oracle_seed);

    SessionConfig session_config;
    session_config.strategy = result.strategy;
    session_config.budget = result.budget;
    session_config.seed = rng::derive(
        config.master_seed, {rng::hash_bytes("session"), static_cast<std::uint64_t>(result.replication),
                             static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(result.budget)});
    session_config.prior_mean = config.prior_mean;
    session_config.prior_sd = config.prior_sd;

    const EvalSession session = run_session(output.bank, oracle, session_config);
    result.scores[t] = session.final_score;

    if (track_selections && result.strategy == Strategy::fluid && result.budget == config.budgets.front() &&
        result.replication == 0) {
      std::vector<SelectionRecord>& slot = selection_slots[t];
      slot.reserve(session.administered.size());
      for (std::size_t step = 0; step < session.administered.size(); ++step) {
        const auto it = std::find_if(output.bank.begin(), output.bank.end(), [&](const ItemParams& item) {
          return item.item_id == session.administered[step].item_id;
        });
        slot.push_back({t, static_cast<int>(step), session.administered[step].item_id,
                        it != output.bank.end() ? it->difficulty : 0.0});
      }
    }
  }
  for (auto& slot : selection_slots) {
    output.selections.insert(output.selections.end(), slot.begin(), slot.end());
  }

  // Reference ranking per replication: full-bank accuracy on the second
  // bank, simulated at each checkpoint's true ability.
  std::vector<std::vector<double>> reference_accuracy;
  if (output.has_reference) {
    reference_accuracy.assign(config.replications, std::vector<double>(checkpoints, 0.0));
#pragma omp parallel for schedule(dynamic) collapse(2)
    for (int rep = 0; rep < config.replications; ++rep) {
      for (int t = 0; t < checkpoints; ++t) {
        const std::uint64_t seed = rng::derive(config.master_seed,
                                               {rng::hash_bytes("reference"), static_cast<std::uint64_t>(rep),
                                                static_cast<std::uint64_t>(t)});
        const SimulatedOracle oracle(output.trajectory[t], reference_bank, seed);
        double correct = 0.0;
        for (const ItemParams& item : reference_bank) {
          correct += *oracle.answer(item.item_id) ? 1.0 : 0.0;
        }
        reference_accuracy[rep][t] = correct / static_cast<double>(reference_bank.size());
      }
    }
  }

  for (CellResult& cell : output.cells) {
    const TrainingCurve curve = curve_from_scores(cell.scores, cell.strategy, cell.budget);
    try {
      cell.tv = total_variation(curve);
    } catch (const ComputeError&) {
      cell.tv.reset();
    }
    try {
      cell.monotonicity = monotonicity(curve);
    } catch (const ComputeError&) {
      cell.monotonicity.reset();
    }
    if (output.has_reference) {
      RankTable predicted, reference;
      for (int t = 0; t < checkpoints; ++t) {
        predicted.entries.push_back({checkpoint_id(t), cell.scores[t]});
        reference.entries.push_back({checkpoint_id(t), reference_accuracy[cell.replication][t]});
      }
      cell.rank_distance = rank_distance(predicted, reference);
    }
  }

  // Items-to-stop analysis: dynamic stopping at the configured threshold,
  // unbounded budget, replication 0 seeds.
  if (config.se_threshold) {
    output.stops.resize(checkpoints);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < checkpoints; ++t) {
      const std::uint64_t oracle_seed = rng::derive(
          config.master_seed, {rng::hash_bytes("oracle"), std::uint64_t{0}, static_cast<std::uint64_t>(t)});
      const SimulatedOracle oracle(output.trajectory[t], output.bank, oracle_seed);
      SessionConfig session_config;
      session_config.strategy = Strategy::fluid;
      session_config.se_threshold = config.se_threshold;
      session_config.seed = rng::derive(config.master_seed,
                                        {rng::hash_bytes("stops"), static_cast<std::uint64_t>(t)});
      session_config.prior_mean = config.prior_mean;
      session_config.prior_sd = config.prior_sd;
      const EvalSession session = run_session(output.bank, oracle, session_config);
      output.stops[t] = {t, static_cast<int>(session.administered.size()),
                         session.trajectory.empty() ? std::numeric_limits<double>::infinity()
                                                    : session.trajectory.back().standard_error,
                         session.stop_reason};
    }
  }
  return output;
}

std::optional<double> aggregate_mean(const CompareOutput& output, Strategy strategy, int budget,
                                     std::optional<double> CellResult::*metric) {
  double sum = 0.0;
  int count = 0;
  for (const CellResult& cell : output.cells) {
    if (cell.strategy != strategy || cell.budget != budget) continue;
    if (!(cell.*metric)) continue;
    sum += *(cell.*metric);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

void write_compare_output(const CompareOutput& output, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::string results = "strategy\tbudget\treplication\ttv\tmonotonicity\trank_distance\n";
  auto field = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const CellResult& cell : output.cells) {
    results += std::string(to_string(cell.strategy)) + '\t' + std::to_string(cell.budget) + '\t' +
               std::to_string(cell.replication) + '\t' + field(cell.tv) + '\t' + field(cell.monotonicity) +
               '\t' + field(cell.rank_distance) + '\n';
  }
  write_file(out_dir / "results.tsv", results);

  std::string curves = "strategy\tbudget\treplication\tcheckpoint\tscore\n";
  for (const CellResult& cell : output.cells) {
    for (std::size_t t = 0; t < cell.scores.size(); ++t) {
      curves += std::string(to_string(cell.strategy)) + '\t' + std::to_string(cell.budget) + '\t' +
                std::to_string(cell.replication) + '\t' + std::to_string(t) + '\t' +
                format_double(cell.scores[t]) + '\n';
    }
  }
  write_file(out_dir / "curves.tsv", curves);

  std::string aggregate = "measure\tmethod";
  for (int budget : output.budgets) aggregate += '\t' + std::to_string(budget);
  aggregate += '\n';
  struct MetricRow {
    const char* name;
    std::optional<double> CellResult::*metric;
  };
  std::vector<MetricRow> rows = {{"total_variation", &CellResult::tv},
                                 {"monotonicity", &CellResult::monotonicity}};
  if (output.has_reference) rows.push_back({"rank_distance", &CellResult::rank_distance});
  for (const MetricRow& row : rows) {
    for (Strategy strategy : output.strategies) {
      aggregate += std::string(row.name) + '\t' + std::string(to_string(strategy));
      for (int budget : output.budgets) {
        const std::optional<double> mean = aggregate_mean(output, strategy, budget, row.metric);
        aggregate += '\t' + (mean ? format_double(*mean) : std::string());
      }
      aggregate += '\n';
    }
  }
  write_file(out_dir / "aggregate.tsv", aggregate);

  write_item_bank(output.bank, out_dir / "bank.tsv");
  write_trajectory_file(output.trajectory, out_dir / "trajectory.tsv");

  if (!output.selections.empty()) {
    std::string selections = "checkpoint\tstep\titem_id\tdifficulty\n";
    for (const SelectionRecord& record : output.selections) {
      selections += std::to_string(record.checkpoint) + '\t' + std::to_string(record.step) + '\t' +
                    record.item_id + '\t' + format_double(record.difficulty) + '\n';
    }
    write_file(out_dir / "selections.tsv", selections);
  }
  if (!output.stops.empty()) {
    std::string stops = "checkpoint\titems_administered\tfinal_se\tstop_reason\n";
    for (const StopRecord& record : output.stops) {
      stops += std::to_string(record.checkpoint) + '\t' + std::to_string(record.items_administered) + '\t' +
               format_double(record.final_se) + '\t' + std::string(to_string(record.stop_reason)) + '\n';
    }
    write_file(out_dir / "stops.tsv", stops);
  }
}

}  // namespace irteval
