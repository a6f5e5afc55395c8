#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "irteval/errors.hpp"

namespace irteval {

/// Calibrated parameters of one binary item.
struct ItemParams {
  std::string item_id;
  double discrimination = 1.0;  // a, must be > 0
  double difficulty = 0.0;      // b, on the ability scale
};

/// Latent ability of a test-taker.
struct Ability {
  double theta = 0.0;
};

/// Operational ability range. Estimates and grid searches stay inside it.
inline constexpr double kAbilityMin = -10.0;
inline constexpr double kAbilityMax = 10.0;

/// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before logs so
/// extreme parameters keep the log-likelihood finite.
inline constexpr double kProbFloor = 1e-12;

/// One binary response to an item.
struct Response {
  std::string item_id;
  bool correct = false;
};

/// A response paired with the parameters of the item it answers.
struct ResponseWithItem {
  Response response;
  ItemParams item;
};

/// Standard logistic 1/(1+exp(-x)), evaluated in the overflow-free branch.
inline double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline void validate_item(const ItemParams& item) {
  if (!(item.discrimination > 0.0) || !std::isfinite(item.discrimination)) {
    throw ValidationError("item '" + item.item_id + "': discrimination must be a positive finite real, got " +
                          std::to_string(item.discrimination));
  }
  if (!std::isfinite(item.difficulty)) {
    throw ValidationError("item '" + item.item_id + "': difficulty must be finite");
  }
}

/// Success probability of the two-parameter logistic model:
/// p = logistic(a * (theta - b)).
inline double response_probability(Ability ability, const ItemParams& item) {
  return logistic(item.discrimination * (ability.theta - item.difficulty));
}

/// Fisher information of one item at the given ability: a^2 p (1-p).
/// Maximized over theta at theta = b, where it equals a^2 / 4.
inline double item_information(Ability ability, const ItemParams& item) {
  const double p = response_probability(ability, item);
  return item.discrimination * item.discrimination * p * (1.0 - p);
}

/// Log Bernoulli probability of a response given the linear predictor
/// eta = a * (theta - b), with the probability clamped away from {0, 1}.
inline double bernoulli_log_prob(double linear_predictor, bool correct) {
  double p = logistic(linear_predictor);
  p = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
  return correct ? std::log(p) : std::log1p(-p);
}

/// Sum of log Bernoulli probabilities over a response set. Each response
/// must be paired with the parameters of the item it names.
inline double log_likelihood(std::span<const ResponseWithItem> responses, Ability ability) {
  double total = 0.0;
  for (const auto& entry : responses) {
    if (entry.response.item_id != entry.item.item_id) {
      throw ValidationError("response for item '" + entry.response.item_id +
                            "' paired with parameters of item '" + entry.item.item_id + "'");
    }
    const double eta = entry.item.discrimination * (ability.theta - entry.item.difficulty);
    total += bernoulli_log_prob(eta, entry.response.correct);
  }
  return total;
}

/// Total Fisher information of an item set at the given ability.
inline double test_information(std::span<const ItemParams> items, Ability ability) {
  double total = 0.0;
  for (const auto& item : items) total += item_information(ability, item);
  return total;
}

inline double test_information(std::span<const ResponseWithItem> responses, Ability ability) {
  double total = 0.0;
  for (const auto& entry : responses) total += item_information(ability, entry.item);
  return total;
}

/// Standard error of an ability estimate backed by `total_information`
/// expected Fisher information; infinite when no information is available.
inline double standard_error(double total_information) {
  if (total_information <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(total_information);
}

}  // namespace irteval
