#include "irteval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace irteval {

namespace {

void validate_curve(const TrainingCurve& curve, const char* op) {
  if (curve.points.size() < 2) {
    throw ValidationError(std::string(op) + ": curve needs at least 2 points, got " +
                          std::to_string(curve.points.size()));
  }
  for (std::size_t t = 1; t < curve.points.size(); ++t) {
    if (curve.points[t].checkpoint <= curve.points[t - 1].checkpoint) {
      throw ValidationError(std::string(op) + ": checkpoint indices must be strictly increasing");
    }
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double accuracy(std::span<const Response> responses) {
  if (responses.empty()) throw ValidationError("accuracy: empty response set");
  double correct = 0.0;
  for (const auto& r : responses) correct += r.correct ? 1.0 : 0.0;
  return correct / static_cast<double>(responses.size());
}

double total_variation(const TrainingCurve& curve) {
  validate_curve(curve, "total_variation");
  const auto& pts = curve.points;
  const double net = std::abs(pts.back().score - pts.front().score);
  if (net == 0.0) {
    throw ComputeError("total_variation: degenerate endpoints (first and last score coincide)");
  }
  double path = 0.0;
  for (std::size_t t = 1; t < pts.size(); ++t) {
    path += std::abs(pts[t].score - pts[t - 1].score);
  }
  const double n = static_cast<double>(pts.size());
  return n / (n - 1.0) * path / net;
}

std::vector<double> mean_ranks(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double shared = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("pearson_correlation: series must have equal length >= 2");
  }
  return pearson(x, y);
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("spearman_correlation: series must have equal length >= 2");
  }
  const std::vector<double> rx = mean_ranks(x);
  const std::vector<double> ry = mean_ranks(y);
  return pearson(rx, ry);
}

double monotonicity(const TrainingCurve& curve) {
  validate_curve(curve, "monotonicity");
  std::vector<double> scores;
  scores.reserve(curve.points.size());
  for (const auto& p : curve.points) scores.push_back(p.score);
  const bool all_equal = std::all_of(scores.begin(), scores.end(),
                                     [&](double s) { return s == scores.front(); });
  if (all_equal) {
    throw ComputeError("monotonicity: degenerate curve (all scores identical)");
  }
  // Checkpoints are strictly increasing, so their ranks are 1..n.
  std::vector<double> time_ranks(scores.size());
  std::iota(time_ranks.begin(), time_ranks.end(), 1.0);
  const std::vector<double> score_ranks = mean_ranks(scores);
  return std::abs(pearson(time_ranks, score_ranks));
}

double rank_distance(const RankTable& predicted, const RankTable& reference) {
  if (predicted.entries.size() < 2 || reference.entries.size() < 2) {
    throw ValidationError("rank_distance: tables need at least 2 models");
  }
  auto collect_ids = [](const RankTable& table) {
    std::set<std::string> ids;
    for (const auto& e : table.entries) {
      if (!ids.insert(e.model_id).second) {
        throw ValidationError("rank_distance: duplicate model_id '" + e.model_id + "'");
      }
    }
    return ids;
  };
  const auto predicted_ids = collect_ids(predicted);
  const auto reference_ids = collect_ids(reference);
  if (predicted_ids != reference_ids) {
    std::string diff;
    for (const auto& id : predicted_ids) {
      if (!reference_ids.count(id)) diff += " +" + id;
    }
    for (const auto& id : reference_ids) {
      if (!predicted_ids.count(id)) diff += " -" + id;
    }
    throw ValidationError("rank_distance: model sets differ:" + diff);
  }

  auto ranks_by_id = [](const RankTable& table) {
    std::vector<double> scores;
    scores.reserve(table.entries.size());
    for (const auto& e : table.entries) scores.push_back(e.score);
    const std::vector<double> ranks = mean_ranks(scores);
    std::unordered_map<std::string, double> by_id;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      by_id.emplace(table.entries[i].model_id, ranks[i]);
    }
    return by_id;
  };
  const auto predicted_ranks = ranks_by_id(predicted);
  const auto reference_ranks = ranks_by_id(reference);

  double total = 0.0;
  for (const auto& [id, rank] : predicted_ranks) {
    total += std::abs(rank - reference_ranks.at(id));
  }
  return total / static_cast<double>(predicted_ranks.size());
}

double adjacent_ability_gap(std::span<const double> abilities) {
  if (abilities.size() < 2) {
    throw ValidationError("adjacent_ability_gap: need at least 2 values");
  }
  const auto [min_it, max_it] = std::minmax_element(abilities.begin(), abilities.end());
  if (*min_it == *max_it) {
    throw ValidationError("adjacent_ability_gap: need at least 2 distinct values");
  }
  return (*max_it - *min_it) / static_cast<double>(abilities.size() - 1);
}

}  // namespace irteval
