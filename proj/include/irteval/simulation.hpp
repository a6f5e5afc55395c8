#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "irteval/irt.hpp"
#include "irteval/oracle.hpp"

namespace irteval {

enum class TrajectoryShape { linear, logistic_growth };

std::string_view to_string(TrajectoryShape shape);
TrajectoryShape trajectory_shape_from_string(std::string_view text);

/// Simulated ability trajectory over a training run.
struct TrajectorySpec {
  int checkpoint_count = 50;
  double start_ability = -7.0;
  double end_ability = 7.0;
  TrajectoryShape shape = TrajectoryShape::linear;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticBankSpec {
  int item_count = 1000;
  double difficulty_mean = 0.0;
  double difficulty_sd = 1.0;
  double log_discrimination_mean = 0.0;
  double log_discrimination_sd = 0.5;
  std::uint64_t seed = 0;
};

/// Bank with normal difficulties and log-normal discriminations; item ids
/// are zero-padded sequence numbers. Bit-reproducible per seed.
std::vector<ItemParams> generate_bank(const SyntheticBankSpec& spec);

/// LINEAR interpolates start to end inclusive; LOGISTIC_GROWTH applies a
/// logistic ramp rescaled to hit both endpoints exactly (this shape is an
/// extra robustness scenario, not part of the source experiments).
/// Per-checkpoint additive noise with sd `noise_sd`, seeded.
std::vector<Ability> generate_trajectory(const TrajectorySpec& spec);

/// Oracle that answers item j correctly with the 2PL probability at the
/// fixed true ability. Each item's draw is keyed by (seed, item_id), so
/// answers are stable across queries, independent of query order, and
/// shared between strategies run against the same oracle.
class SimulatedOracle final : public ResponseOracle {
 public:
  SimulatedOracle(Ability true_ability, std::span<const ItemParams> bank, std::uint64_t seed);

  std::optional<bool> answer(const std::string& item_id) const override;

  Ability true_ability() const { return true_ability_; }

 private:
  Ability true_ability_;
  std::uint64_t seed_;
  std::unordered_map<std::string, double> probability_by_id_;
};

std::unique_ptr<ResponseOracle> simulated_oracle(Ability true_ability, std::span<const ItemParams> bank,
                                                 std::uint64_t seed);

/// Fisher information of every (checkpoint, item) pair.
struct InformationSurface {
  int checkpoint_count = 0;
  int item_count = 0;
  std::vector<double> values;  // row-major, checkpoint-major

  double at(int checkpoint, int item) const {
    return values[static_cast<std::size_t>(checkpoint) * item_count + item];
  }
};

/// OpenMP-parallel surface evaluation; entries are independent, so the
/// result is identical at any thread count.
InformationSurface information_surface(std::span<const ItemParams> bank, std::span<const Ability> trajectory);

namespace reference {
/// Plain double-loop version kept for testing and benchmarking.
InformationSurface information_surface_serial(std::span<const ItemParams> bank,
                                              std::span<const Ability> trajectory);
}  // namespace reference

/// Item ids "0000", "0001", ... padded to at least 4 digits.
std::string sequence_item_id(int index, int count);

}  // namespace irteval
