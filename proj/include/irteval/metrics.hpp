#pragma once

#include <span>
#include <string>
#include <vector>

#include "irteval/irt.hpp"

namespace irteval {

struct CurvePoint {
  int checkpoint = 0;
  double score = 0.0;
};

/// Ordered per-checkpoint scores of one model on one benchmark.
struct TrainingCurve {
  std::string model_id;
  std::string benchmark_id;
  std::vector<CurvePoint> points;
};

struct RankEntry {
  std::string model_id;
  double score = 0.0;
};

/// Scores per model; ranks are derived with ties sharing the mean rank.
struct RankTable {
  std::vector<RankEntry> entries;
};

/// Mean of binary correctness values. Errors on an empty response set.
double accuracy(std::span<const Response> responses);

/// Normalized total variation of a training curve:
///   n/(n-1) * sum_t |x_{t+1} - x_t| / |x_n - x_1|.
/// Equals n/(n-1) exactly for monotone curves; errors when the endpoints
/// coincide (the denominator vanishes).
double total_variation(const TrainingCurve& curve);

/// Absolute Spearman rank correlation between checkpoint order and scores,
/// ties handled by mean ranks. Errors when all scores are identical.
double monotonicity(const TrainingCurve& curve);

/// Mean ranks of `scores` in ascending order, 1-based, ties averaged.
std::vector<double> mean_ranks(std::span<const double> scores);

/// Pearson correlation of two equally sized series.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (mean-rank ties).
double spearman_correlation(std::span<const double> x, std::span<const double> y);

/// Mean absolute difference between the ranks a model receives in the two
/// tables. Both tables must cover the same model set.
double rank_distance(const RankTable& predicted, const RankTable& reference);

/// Mean gap between rank-adjacent abilities: (max - min) / (count - 1).
/// Supports choosing a standard-error threshold for dynamic stopping.
double adjacent_ability_gap(std::span<const double> abilities);

}  // namespace irteval
