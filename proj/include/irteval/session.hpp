#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "irteval/ability.hpp"
#include "irteval/irt.hpp"
#include "irteval/oracle.hpp"

namespace irteval {

enum class Strategy { fluid, random, random_irt };
enum class StopReason { budget, se_threshold, bank_exhausted };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view text);
std::string_view to_string(StopReason reason);
StopReason stop_reason_from_string(std::string_view text);

struct SessionConfig {
  Strategy strategy = Strategy::fluid;
  std::optional<int> budget;          // absent = unbounded
  std::optional<double> se_threshold; // absent = no dynamic stopping
  std::uint64_t seed = 0;
  double prior_mean = 0.0;
  double prior_sd = 1.0;
};

/// One executed evaluation session: the administered items in order, the
/// ability-estimate trajectory (one entry per administered item), and the
/// final score (ability for FLUID/RANDOM_IRT, accuracy for RANDOM).
struct EvalSession {
  SessionConfig config;
  std::vector<Response> administered;
  std::vector<AbilityEstimate> trajectory;
  double final_score = 0.0;
  StopReason stop_reason = StopReason::budget;
};

/// The unadministered item with maximal Fisher information at the current
/// ability; ties broken by lexicographically smallest item_id. Returns
/// nullptr when the bank is exhausted.
const ItemParams* select_next_item(std::span<const ItemParams> bank,
                                   const std::unordered_set<std::string>& already_administered,
                                   Ability current_ability);

namespace reference {
/// Plain linear-scan version of select_next_item, kept for testing the
/// parallel reduction against.
const ItemParams* select_next_item_serial(std::span<const ItemParams> bank,
                                          const std::unordered_set<std::string>& already_administered,
                                          Ability current_ability);
}  // namespace reference

/// The item a session opens with: select_next_item over the empty set at
/// the prior mean. Deterministic for a fixed bank.
const ItemParams& first_item(std::span<const ItemParams> bank, double prior_mean);

/// Runs one evaluation session against the oracle. FLUID alternates
/// information-greedy selection, oracle answer, and MAP re-estimation;
/// RANDOM and RANDOM_IRT administer a seeded uniform subset without
/// replacement and differ only in the final score.
EvalSession run_session(std::span<const ItemParams> bank, const ResponseOracle& oracle,
                        const SessionConfig& config);

/// Re-estimates every trajectory entry of `session` from its administered
/// responses and the given bank; throws ComputeError if any logged theta
/// or standard error deviates by more than `tolerance`.
void verify_session_replay(const EvalSession& session, std::span<const ItemParams> bank,
                           double tolerance = 1e-9);

}  // namespace irteval
