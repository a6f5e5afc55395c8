#include "irteval/session.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "irteval/logging.hpp"
#include "irteval/metrics.hpp"
#include "irteval/rng.hpp"

namespace irteval {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::fluid: return "FLUID";
    case Strategy::random: return "RANDOM";
    default: return "RANDOM_IRT";
  }
}

Strategy strategy_from_string(std::string_view text) {
  if (text == "FLUID" || text == "fluid") return Strategy::fluid;
  if (text == "RANDOM" || text == "random") return Strategy::random;
  if (text == "RANDOM_IRT" || text == "random_irt" || text == "random-irt") return Strategy::random_irt;
  throw ValidationError("unknown strategy: " + std::string(text));
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::budget: return "BUDGET";
    case StopReason::se_threshold: return "SE_THRESHOLD";
    default: return "BANK_EXHAUSTED";
  }
}

StopReason stop_reason_from_string(std::string_view text) {
  if (text == "BUDGET") return StopReason::budget;
  if (text == "SE_THRESHOLD") return StopReason::se_threshold;
  if (text == "BANK_EXHAUSTED") return StopReason::bank_exhausted;
  throw ValidationError("unknown stop reason: " + std::string(text));
}

namespace {

// Strict total order on candidates: higher information first, then
// lexicographically smaller item_id. Item ids are unique within a bank,
// so the argmax is unique and any reduction order yields the same winner.
bool better_candidate(double info_a, const ItemParams* a, double info_b, const ItemParams* b) {
  if (info_a != info_b) return info_a > info_b;
  return a->item_id < b->item_id;
}

const ItemParams* scan_candidates(std::span<const ItemParams> bank,
                                  const std::unordered_set<std::string>& administered,
                                  Ability ability, std::size_t begin, std::size_t end) {
  const ItemParams* best = nullptr;
  double best_info = 0.0;
  for (std::size_t j = begin; j < end; ++j) {
    const ItemParams& item = bank[j];
    if (administered.count(item.item_id)) continue;
    const double info = item_information(ability, item);
    if (best == nullptr || better_candidate(info, &item, best_info, best)) {
      best = &item;
      best_info = info;
    }
  }
  return best;
}

void validate_session_config(const SessionConfig& config) {
  if (!config.budget && !config.se_threshold) {
    throw ValidationError("session config: at least one of budget and se_threshold must be set");
  }
  if (config.budget && *config.budget <= 0) {
    throw ValidationError("session config: budget must be positive");
  }
  if (config.se_threshold && !(*config.se_threshold > 0.0)) {
    throw ValidationError("session config: se_threshold must be positive");
  }
  if (!(config.prior_sd > 0.0) || !std::isfinite(config.prior_sd) || !std::isfinite(config.prior_mean)) {
    throw ValidationError("session config: prior must have finite mean and positive sd");
  }
}

// Items with unusable parameters are excluded up front.
std::vector<ItemParams> usable_bank(std::span<const ItemParams> bank) {
  std::vector<ItemParams> usable;
  usable.reserve(bank.size());
  for (const auto& item : bank) {
    const bool ok = item.discrimination > 0.0 && std::isfinite(item.discrimination) &&
                    std::isfinite(item.difficulty);
    if (!ok) {
      log_warning("session: excluding item '" + item.item_id + "' with unusable parameters");
      continue;
    }
    usable.push_back(item);
  }
  return usable;
}

}  // namespace

const ItemParams* select_next_item(std::span<const ItemParams> bank,
                                   const std::unordered_set<std::string>& already_administered,
                                   Ability current_ability) {
#ifdef _OPENMP
  if (bank.size() >= 4096) {
    const ItemParams* best = nullptr;
    double best_info = 0.0;
#pragma omp parallel
    {
      const int threads = omp_get_num_threads();
      const int tid = omp_get_thread_num();
      const std::size_t chunk = (bank.size() + threads - 1) / threads;
      const std::size_t begin = std::min(bank.size(), chunk * static_cast<std::size_t>(tid));
      const std::size_t end = std::min(bank.size(), begin + chunk);
      const ItemParams* local = scan_candidates(bank, already_administered, current_ability, begin, end);
      if (local != nullptr) {
        const double local_info = item_information(current_ability, *local);
#pragma omp critical(irteval_select_next_item)
        {
          if (best == nullptr || better_candidate(local_info, local, best_info, best)) {
            best = local;
            best_info = local_info;
          }
        }
      }
    }
    return best;
  }
#endif
  return scan_candidates(bank, already_administered, current_ability, 0, bank.size());
}

namespace reference {

const ItemParams* select_next_item_serial(std::span<const ItemParams> bank,
                                          const std::unordered_set<std::string>& already_administered,
                                          Ability current_ability) {
  return scan_candidates(bank, already_administered, current_ability, 0, bank.size());
}

}  // namespace reference

const ItemParams& first_item(std::span<const ItemParams> bank, double prior_mean) {
  if (bank.empty()) throw ValidationError("first_item: empty bank");
  const ItemParams* item = select_next_item(bank, {}, Ability{prior_mean});
  return *item;
}

EvalSession run_session(std::span<const ItemParams> bank, const ResponseOracle& oracle,
                        const SessionConfig& config) {
  validate_session_config(config);
  const std::vector<ItemParams> items = usable_bank(bank);
  if (items.empty()) throw ValidationError("run_session: bank has no usable items");

  EvalSession session;
  session.config = config;

  const AbilityPrior prior{config.prior_mean, config.prior_sd};
  std::vector<ResponseWithItem> answered;
  std::unordered_set<std::string> administered_ids;

  // RANDOM and RANDOM_IRT share the administration order for a given seed;
  // they differ only in how the final score aggregates.
  std::vector<std::size_t> random_order;
  if (config.strategy != Strategy::fluid) {
    random_order.resize(items.size());
    std::iota(random_order.begin(), random_order.end(), std::size_t{0});
    rng::Stream shuffle_stream(rng::derive(config.seed, {rng::hash_bytes("session.shuffle")}));
    for (std::size_t i = random_order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_stream.next_below(i));
      std::swap(random_order[i - 1], random_order[j]);
    }
  }

  double current_theta = config.prior_mean;
  session.stop_reason = StopReason::bank_exhausted;

  while (true) {
    if (config.budget && static_cast<int>(session.administered.size()) >= *config.budget) {
      session.stop_reason = StopReason::budget;
      break;
    }
    const ItemParams* next = nullptr;
    if (config.strategy == Strategy::fluid) {
      next = select_next_item(items, administered_ids, Ability{current_theta});
    } else if (session.administered.size() < random_order.size()) {
      next = &items[random_order[session.administered.size()]];
    }
    if (next == nullptr) {
      session.stop_reason = StopReason::bank_exhausted;
      break;
    }

    const std::optional<bool> answer = oracle.answer(next->item_id);
    if (!answer) {
      throw ComputeError("session: oracle has no answer for item '" + next->item_id + "'");
    }

    administered_ids.insert(next->item_id);
    session.administered.push_back(Response{next->item_id, *answer});
    answered.push_back(ResponseWithItem{session.administered.back(), *next});

    const AbilityEstimate estimate = estimate_ability(answered, EstimationMethod::map, prior);
    session.trajectory.push_back(estimate);
    current_theta = estimate.theta;

    if (config.se_threshold && estimate.standard_error < *config.se_threshold) {
      session.stop_reason = StopReason::se_threshold;
      break;
    }
  }

  if (config.strategy == Strategy::random) {
    session.final_score = accuracy(session.administered);
  } else {
    session.final_score = session.trajectory.empty() ? config.prior_mean : session.trajectory.back().theta;
  }
  return session;
}

void verify_session_replay(const EvalSession& session, std::span<const ItemParams> bank,
                           double tolerance) {
  std::unordered_map<std::string, const ItemParams*> by_id;
  for (const auto& item : bank) by_id.emplace(item.item_id, &item);

  const AbilityPrior prior{session.config.prior_mean, session.config.prior_sd};
  std::vector<ResponseWithItem> answered;
  answered.reserve(session.administered.size());
  for (std::size_t t = 0; t < session.administered.size(); ++t) {
    const Response& response = session.administered[t];
    const auto it = by_id.find(response.item_id);
    if (it == by_id.end()) {
      throw ComputeError("replay: bank has no item '" + response.item_id + "'");
    }
    answered.push_back(ResponseWithItem{response, *it->second});
    const AbilityEstimate estimate = estimate_ability(answered, EstimationMethod::map, prior);
    const AbilityEstimate& logged = session.trajectory.at(t);
    if (std::abs(estimate.theta - logged.theta) > tolerance ||
        std::abs(estimate.standard_error - logged.standard_error) > tolerance) {
      throw ComputeError("replay: estimate at step " + std::to_string(t) +
                         " deviates from the logged value (theta " + std::to_string(estimate.theta) +
                         " vs " + std::to_string(logged.theta) + ")");
    }
  }
}

}  // namespace irteval
