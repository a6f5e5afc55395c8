#pragma once

#include <limits>
#include <span>
#include <string_view>

#include "irteval/irt.hpp"

namespace irteval {

enum class EstimationMethod { map, mle };

std::string_view to_string(EstimationMethod method);
EstimationMethod estimation_method_from_string(std::string_view text);

/// Normal prior on ability, used by MAP estimation and by the standard
/// error of MAP estimates (prior precision counts as information).
struct AbilityPrior {
  double mean = 0.0;
  double sd = 1.0;
};

struct AbilityEstimate {
  double theta = 0.0;
  double standard_error = std::numeric_limits<double>::infinity();
  EstimationMethod method = EstimationMethod::map;
  int response_count = 0;
  bool clamped = false;  // true when the maximizer hit the operational range
};

/// Maximizes the response log-likelihood (MLE) or log-likelihood plus log
/// normal prior density (MAP) over the operational ability range.
///
/// Newton-Raphson on the strictly concave objective, started at the prior
/// mean, with a bisection fallback whenever the Newton step leaves the
/// current bracket. Accurate to well within 1e-6 in theta.
///
/// MLE requires a mixed response pattern (at least one correct and one
/// incorrect); otherwise the maximizer diverges and a ComputeError is
/// raised instructing the caller to use MAP.
AbilityEstimate estimate_ability(std::span<const ResponseWithItem> responses, EstimationMethod method,
                                 AbilityPrior prior = {});

}  // namespace irteval
