#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "irteval/session.hpp"

namespace irteval {

struct FitOptions {
  std::filesystem::path matrix_path;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_bank_path;
  // When set, calibration recovery correlations against the known
  // generating parameters are added to the diagnostics.
  std::optional<std::filesystem::path> truth_bank_path;
  std::optional<std::uint64_t> seed_override;
};

struct RunOptions {
  std::filesystem::path bank_path;
  // Oracle source: either a recorded response matrix plus a model id, or a
  // simulated test-taker at a fixed true ability.
  std::optional<std::filesystem::path> responses_path;
  std::optional<std::string> model_id;
  std::optional<double> simulate_theta;
  std::uint64_t oracle_seed = 0;
  SessionConfig session;
  std::filesystem::path out_log_path;
};

struct CompareOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed_override;
};

struct ReportOptions {
  std::filesystem::path results_dir;
  std::filesystem::path out_dir;
};

int cmd_fit(const FitOptions& options);
int cmd_run(const RunOptions& options);
int cmd_compare(const CompareOptions& options);
int cmd_report(const ReportOptions& options);

}  // namespace irteval
