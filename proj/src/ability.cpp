#include "irteval/ability.hpp"

#include <cmath>

namespace irteval {

std::string_view to_string(EstimationMethod method) {
  return method == EstimationMethod::map ? "MAP" : "MLE";
}

EstimationMethod estimation_method_from_string(std::string_view text) {
  if (text == "MAP" || text == "map") return EstimationMethod::map;
  if (text == "MLE" || text == "mle") return EstimationMethod::mle;
  throw ValidationError("unknown estimation method: " + std::string(text));
}

namespace {

struct Derivatives {
  double gradient = 0.0;
  double hessian = 0.0;
};

// First and second derivative of the objective in theta. The prior terms
// are included for MAP. The hessian is strictly negative everywhere.
Derivatives objective_derivatives(std::span<const ResponseWithItem> responses, double theta,
                                  EstimationMethod method, const AbilityPrior& prior) {
  Derivatives d;
  for (const auto& entry : responses) {
    const double a = entry.item.discrimination;
    const double p = logistic(a * (theta - entry.item.difficulty));
    d.gradient += a * ((entry.response.correct ? 1.0 : 0.0) - p);
    d.hessian -= a * a * p * (1.0 - p);
  }
  if (method == EstimationMethod::map) {
    const double precision = 1.0 / (prior.sd * prior.sd);
    d.gradient -= (theta - prior.mean) * precision;
    d.hessian -= precision;
  }
  return d;
}

}  // namespace

AbilityEstimate estimate_ability(std::span<const ResponseWithItem> responses, EstimationMethod method,
                                 AbilityPrior prior) {
  if (!(prior.sd > 0.0) || !std::isfinite(prior.sd) || !std::isfinite(prior.mean)) {
    throw ValidationError("ability prior must have finite mean and positive sd");
  }
  for (const auto& entry : responses) {
    validate_item(entry.item);
    if (entry.response.item_id != entry.item.item_id) {
      throw ValidationError("response for item '" + entry.response.item_id +
                            "' paired with parameters of item '" + entry.item.item_id + "'");
    }
  }

  if (method == EstimationMethod::mle) {
    bool any_correct = false;
    bool any_incorrect = false;
    for (const auto& entry : responses) {
      (entry.response.correct ? any_correct : any_incorrect) = true;
    }
    if (!any_correct || !any_incorrect) {
      throw ComputeError(
          "divergent estimate: MLE requires at least one correct and one incorrect response; use MAP");
    }
  }

  AbilityEstimate estimate;
  estimate.method = method;
  estimate.response_count = static_cast<int>(responses.size());

  const double start = method == EstimationMethod::map ? prior.mean : 0.0;
  double theta = std::clamp(start, kAbilityMin, kAbilityMax);

  // The gradient is strictly decreasing in theta. Maintain a bracket
  // [lo, hi] with gradient(lo) >= 0 >= gradient(hi) once the signs are
  // known; Newton steps that escape it fall back to bisection.
  double lo = kAbilityMin;
  double hi = kAbilityMax;

  const Derivatives at_lo = objective_derivatives(responses, lo, method, prior);
  if (at_lo.gradient <= 0.0) {
    // Maximizer at or below the lower edge of the operational range.
    estimate.theta = lo;
    estimate.clamped = at_lo.gradient < 0.0;
  } else {
    const Derivatives at_hi = objective_derivatives(responses, hi, method, prior);
    if (at_hi.gradient >= 0.0) {
      estimate.theta = hi;
      estimate.clamped = at_hi.gradient > 0.0;
    } else {
      for (int iteration = 0; iteration < 100; ++iteration) {
        const Derivatives d = objective_derivatives(responses, theta, method, prior);
        if (d.gradient > 0.0) {
          lo = theta;
        } else {
          hi = theta;
        }
        double next = theta - d.gradient / d.hessian;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        const double step = next - theta;
        theta = next;
        if (std::abs(step) < 1e-8) break;
      }
      estimate.theta = theta;
    }
  }

  double information = 0.0;
  for (const auto& entry : responses) {
    information += item_information(Ability{estimate.theta}, entry.item);
  }
  if (method == EstimationMethod::map) {
    information += 1.0 / (prior.sd * prior.sd);
  }
  estimate.standard_error = standard_error(information);
  return estimate;
}

}  // namespace irteval
