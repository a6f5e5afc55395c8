#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irteval/irt.hpp"

namespace irteval {

/// One cell of a response matrix: correct, incorrect, or unobserved.
enum class Cell : std::int8_t { incorrect = 0, correct = 1, missing = -1 };

/// Binary success/failure records of models x items, missing entries
/// allowed. Row-major storage.
struct ResponseMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> item_ids;
  std::vector<Cell> cells;

  int model_count() const { return static_cast<int>(model_ids.size()); }
  int item_count() const { return static_cast<int>(item_ids.size()); }

  Cell at(int model, int item) const {
    return cells[static_cast<std::size_t>(model) * item_ids.size() + item];
  }
  void set(int model, int item, Cell value) {
    cells[static_cast<std::size_t>(model) * item_ids.size() + item] = value;
  }

  static ResponseMatrix filled(std::vector<std::string> model_ids, std::vector<std::string> item_ids,
                               Cell fill = Cell::missing);
};

enum class FindingSeverity { warning, error };

struct Finding {
  FindingSeverity severity = FindingSeverity::warning;
  std::string message;
  std::string model_id;  // set when the finding points at a row
  std::string item_id;   // set when the finding points at a column
};

/// Structural checks: duplicate ids, all-missing rows/columns, all-constant
/// columns, empty data. Duplicates and empty data are errors; the rest are
/// warnings (fit_2pl handles them by dropping the affected parameters).
std::vector<Finding> validate_matrix(const ResponseMatrix& matrix);

/// Per-block random-walk proposal scales (standard deviations). Scales are
/// adapted toward 30-45% acceptance during burn-in and frozen afterwards.
struct ProposalScales {
  double theta = 0.5;
  double difficulty = 0.5;
  double log_discrimination = 0.3;
  double log_sigma = 0.3;
};

struct CalibrationConfig {
  int chain_count = 4;
  int iterations_per_chain = 5000;
  int burn_in = 2500;
  int thinning = 5;
  ProposalScales proposal_scales;
  std::uint64_t seed = 0;
};

struct TrainAbility {
  std::string model_id;
  double theta = 0.0;
};

struct ParameterDiagnostic {
  std::string name;
  double acceptance_rate = 0.0;
  double r_hat = 1.0;
};

struct FitDiagnostics {
  std::vector<ParameterDiagnostic> parameters;
  std::vector<std::string> warnings;
  // Affine identification transform applied to the raw posterior means:
  // theta' = (theta - location_shift) / scale, b' likewise, a' = a * scale.
  double location_shift = 0.0;
  double scale = 1.0;
  double max_r_hat = 1.0;
};

/// Calibration output: items in one-to-one correspondence with the matrix
/// item_ids, train abilities standardized to mean 0 / sd 1.
struct CalibratedBank {
  std::vector<ItemParams> items;
  std::vector<TrainAbility> train_abilities;
  FitDiagnostics diagnostics;
};

/// Fits the two-parameter logistic model by Metropolis-within-Gibbs with
/// hierarchical priors (theta_i ~ N(mu_t, s_t^2), b_j ~ N(mu_b, s_b^2),
/// ln a_j ~ N(mu_a, s_a^2); mu ~ N(0,1), sigma ~ half-N(1)), one block per
/// parameter. Point estimates are posterior means after burn-in and
/// thinning, pooled over chains. RNG streams are partitioned per parameter
/// block, so results are bit-identical for a given seed at any thread
/// count, and adding items never perturbs existing parameter streams.
CalibratedBank fit_2pl(const ResponseMatrix& matrix, const CalibrationConfig& config);

namespace reference {
/// Serial sweep loops, kept for testing the OpenMP path against.
CalibratedBank fit_2pl_serial(const ResponseMatrix& matrix, const CalibrationConfig& config);
}  // namespace reference

}  // namespace irteval
