#include "irteval/simulation.hpp"

#include <cmath>
#include <cstdio>

#include "irteval/rng.hpp"

namespace irteval {

std::string_view to_string(TrajectoryShape shape) {
  return shape == TrajectoryShape::linear ? "LINEAR" : "LOGISTIC_GROWTH";
}

TrajectoryShape trajectory_shape_from_string(std::string_view text) {
  if (text == "LINEAR" || text == "linear") return TrajectoryShape::linear;
  if (text == "LOGISTIC_GROWTH" || text == "logistic_growth") return TrajectoryShape::logistic_growth;
  throw ValidationError("unknown trajectory shape: " + std::string(text));
}

std::string sequence_item_id(int index, int count) {
  int width = 4;
  for (int limit = 10000; limit <= count && width < 12; limit *= 10) ++width;
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%0*d", width, index);
  return buffer;
}

std::vector<ItemParams> generate_bank(const SyntheticBankSpec& spec) {
  if (spec.item_count < 1) throw ValidationError("generate_bank: item_count must be >= 1");
  if (spec.difficulty_sd < 0.0 || spec.log_discrimination_sd < 0.0) {
    throw ValidationError("generate_bank: standard deviations must be >= 0");
  }
  rng::Stream stream(rng::derive(spec.seed, {rng::hash_bytes("bank")}));
  std::vector<ItemParams> bank;
  bank.reserve(spec.item_count);
  for (int j = 0; j < spec.item_count; ++j) {
    ItemParams item;
    item.item_id = sequence_item_id(j, spec.item_count);
    item.difficulty = stream.next_normal(spec.difficulty_mean, spec.difficulty_sd);
    item.discrimination = std::exp(stream.next_normal(spec.log_discrimination_mean, spec.log_discrimination_sd));
    bank.push_back(std::move(item));
  }
  return bank;
}

std::vector<Ability> generate_trajectory(const TrajectorySpec& spec) {
  if (spec.checkpoint_count < 2) throw ValidationError("generate_trajectory: checkpoint_count must be >= 2");
  if (spec.noise_sd < 0.0) throw ValidationError("generate_trajectory: noise_sd must be >= 0");

  rng::Stream noise(rng::derive(spec.seed, {rng::hash_bytes("trajectory")}));
  const double span = spec.end_ability - spec.start_ability;
  const int n = spec.checkpoint_count;

  // Logistic ramp over normalized progress, rescaled so the endpoints are
  // hit exactly. Rate 10 gives a visible plateau at both ends.
  constexpr double kGrowthRate = 10.0;
  const double ramp_lo = logistic(-0.5 * kGrowthRate);
  const double ramp_hi = logistic(0.5 * kGrowthRate);

  std::vector<Ability> trajectory;
  trajectory.reserve(n);
  for (int t = 0; t < n; ++t) {
    const double progress = static_cast<double>(t) / static_cast<double>(n - 1);
    double base;
    if (spec.shape == TrajectoryShape::linear) {
      base = spec.start_ability + span * progress;
    } else {
      const double ramp = (logistic(kGrowthRate * (progress - 0.5)) - ramp_lo) / (ramp_hi - ramp_lo);
      base = spec.start_ability + span * ramp;
    }
    trajectory.push_back(Ability{base + noise.next_normal(0.0, spec.noise_sd)});
  }
  return trajectory;
}

SimulatedOracle::SimulatedOracle(Ability true_ability, std::span<const ItemParams> bank, std::uint64_t seed)
    : true_ability_(true_ability), seed_(seed) {
  probability_by_id_.reserve(bank.size());
  for (const auto& item : bank) {
    probability_by_id_.emplace(item.item_id, response_probability(true_ability, item));
  }
}

std::optional<bool> SimulatedOracle::answer(const std::string& item_id) const {
  const auto it = probability_by_id_.find(item_id);
  if (it == probability_by_id_.end()) return std::nullopt;
  const double draw = rng::to_unit(rng::combine(seed_, rng::hash_bytes(item_id)));
  return draw < it->second;
}

std::unique_ptr<ResponseOracle> simulated_oracle(Ability true_ability, std::span<const ItemParams> bank,
                                                 std::uint64_t seed) {
  return std::make_unique<SimulatedOracle>(true_ability, bank, seed);
}

InformationSurface information_surface(std::span<const ItemParams> bank, std::span<const Ability> trajectory) {
  if (bank.empty() || trajectory.empty()) {
    throw ValidationError("information_surface: bank and trajectory must be non-empty");
  }
  InformationSurface surface;
  surface.checkpoint_count = static_cast<int>(trajectory.size());
  surface.item_count = static_cast<int>(bank.size());
  surface.values.resize(static_cast<std::size_t>(surface.checkpoint_count) * surface.item_count);

  const std::int64_t cells = static_cast<std::int64_t>(surface.values.size());
#pragma omp parallel for schedule(static) if (cells >= 4096)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const int t = static_cast<int>(cell / surface.item_count);
    const int j = static_cast<int>(cell % surface.item_count);
    surface.values[cell] = item_information(trajectory[t], bank[j]);
  }
  return surface;
}

namespace reference {

InformationSurface information_surface_serial(std::span<const ItemParams> bank,
                                              std::span<const Ability> trajectory) {
  if (bank.empty() || trajectory.empty()) {
    throw ValidationError("information_surface: bank and trajectory must be non-empty");
  }
  InformationSurface surface;
  surface.checkpoint_count = static_cast<int>(trajectory.size());
  surface.item_count = static_cast<int>(bank.size());
  surface.values.reserve(static_cast<std::size_t>(surface.checkpoint_count) * surface.item_count);
  for (const Ability& ability : trajectory) {
    for (const ItemParams& item : bank) {
      surface.values.push_back(item_information(ability, item));
    }
  }
  return surface;
}

}  // namespace reference

}  // namespace irteval
