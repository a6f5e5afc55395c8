#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "irteval/irt.hpp"

namespace irteval {

/// Samples of one item characteristic curve; used by the ICC plot and its
/// tests (the curve must cross 0.5 at theta = difficulty).
struct IccSamples {
  ItemParams item;
  std::vector<double> thetas;
  std::vector<double> probabilities;
};

IccSamples sample_icc(const ItemParams& item, double theta_min = -6.0, double theta_max = 6.0,
                      int sample_count = 121);

/// Reads the output directory of a compare run (results.tsv, curves.tsv,
/// bank.tsv, trajectory.tsv, optional selections.tsv / stops.tsv) and
/// emits static SVG plots into `out_dir`:
///   - training_curves_budget<B>.svg   per-strategy training curves
///   - information_surface.svg         information heat map over training
///   - selected_difficulty.svg         administered-item difficulty map
///   - items_to_stop.svg               dynamic-stopping item counts
///   - icc.svg                         item characteristic curves
/// Returns the paths written. Rerunning on the same inputs reproduces the
/// same bytes.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& results_dir,
                                               const std::filesystem::path& out_dir);

}  // namespace irteval
