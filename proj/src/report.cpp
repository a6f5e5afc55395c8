#include "irteval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "irteval/data_io.hpp"
#include "irteval/experiment.hpp"
#include "irteval/session.hpp"

namespace irteval {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 45.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

struct Axis {
  double min = 0.0;
  double max = 1.0;

  double to_x(double v) const {
    return kMarginLeft + (v - min) / (max - min) * (kWidth - kMarginLeft - kMarginRight);
  }
  double to_y(double v) const {
    return kHeight - kMarginBottom - (v - min) / (max - min) * (kHeight - kMarginTop - kMarginBottom);
  }
};

Axis fit_axis(std::span<const double> values) {
  Axis axis;
  axis.min = *std::min_element(values.begin(), values.end());
  axis.max = *std::max_element(values.begin(), values.end());
  if (axis.max - axis.min < 1e-12) {
    axis.min -= 0.5;
    axis.max += 0.5;
  }
  const double pad = 0.04 * (axis.max - axis.min);
  axis.min -= pad;
  axis.max += pad;
  return axis;
}

class SvgBuilder {
 public:
  SvgBuilder() {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
             num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    body_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void frame(const std::string& x_label, const std::string& y_label) {
    body_ += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
             num(kWidth - kMarginLeft - kMarginRight) + "\" height=\"" +
             num(kHeight - kMarginTop - kMarginBottom) +
             "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    text(kWidth / 2.0, kHeight - 10.0, x_label, "middle");
    body_ += "<text x=\"16\" y=\"" + num(kHeight / 2.0) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
             num(kHeight / 2.0) + ")\">" + y_label + "</text>\n";
  }

  void text(double x, double y, const std::string& content, const char* anchor = "start",
            const char* fill = "#000000") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
             "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + fill + "\">" + content + "</text>\n";
  }

  void polyline(std::span<const double> xs, std::span<const double> ys, const char* color) {
    body_ += "<polyline fill=\"none\" stroke=\"";
    body_ += color;
    body_ += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i > 0) body_ += ' ';
      body_ += num(xs[i]) + "," + num(ys[i]);
    }
    body_ += "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + fill + "\"/>\n";
  }

  void circle(double x, double y, double radius, const std::string& fill) {
    body_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(radius) + "\" fill=\"" + fill +
             "\"/>\n";
  }

  std::string finish() {
    return body_ + "</svg>\n";
  }

 private:
  std::string body_;
};

// Linear ramp between two RGB stops; enough for the heat and order maps.
std::string color_ramp(double t, int r0, int g0, int b0, int r1, int g1, int b1) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(r0 + t * (r1 - r0)));
  const int g = static_cast<int>(std::lround(g0 + t * (g1 - g0)));
  const int b = static_cast<int>(std::lround(b0 + t * (b1 - b0)));
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
  return buffer;
}

struct TsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
  }
};

TsvTable read_tsv(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  TsvTable table;
  std::size_t start = 0;
  bool header = true;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    const std::string line = content.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t field_start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', field_start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(field_start));
        break;
      }
      fields.push_back(line.substr(field_start, tab - field_start));
      field_start = tab + 1;
    }
    if (header) {
      table.columns = std::move(fields);
      header = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

void require_columns(const TsvTable& table, const std::vector<std::string>& required,
                     const std::filesystem::path& path) {
  std::string missing;
  for (const std::string& name : required) {
    if (table.column(name) < 0) missing += (missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) {
    throw ParseError(path.string() + ": missing columns: " + missing);
  }
}

void emit_training_curves(const TsvTable& curves, const std::filesystem::path& out_dir,
                          std::vector<std::filesystem::path>& written) {
  const int strategy_col = curves.column("strategy");
  const int budget_col = curves.column("budget");
  const int rep_col = curves.column("replication");
  const int ckpt_col = curves.column("checkpoint");
  const int score_col = curves.column("score");

  // replication-0 curves keyed by (budget, strategy)
  std::map<int, std::map<std::string, std::vector<std::pair<int, double>>>> by_budget;
  for (const auto& row : curves.rows) {
    if (row[rep_col] != "0") continue;
    by_budget[std::stoi(row[budget_col])][row[strategy_col]].push_back(
        {std::stoi(row[ckpt_col]), std::stod(row[score_col])});
  }

  for (auto& [budget, by_strategy] : by_budget) {
    SvgBuilder svg;
    svg.frame("checkpoint", "normalized score");
    int color_index = 0;
    double legend_y = kMarginTop + 16.0;
    for (auto& [strategy, points] : by_strategy) {
      std::sort(points.begin(), points.end());
      std::vector<double> xs, ys;
      double lo = points.front().second, hi = points.front().second;
      for (const auto& [t, score] : points) {
        lo = std::min(lo, score);
        hi = std::max(hi, score);
      }
      const double span = hi - lo < 1e-12 ? 1.0 : hi - lo;
      Axis x_axis{0.0, static_cast<double>(points.back().first)};
      Axis y_axis{-0.04, 1.04};
      for (const auto& [t, score] : points) {
        xs.push_back(x_axis.to_x(t));
        ys.push_back(y_axis.to_y((score - lo) / span));
      }
      const char* color = kPalette[color_index % 5];
      svg.polyline(xs, ys, color);
      svg.text(kWidth - kMarginRight - 150.0, legend_y, strategy, "start", color);
      legend_y += 16.0;
      ++color_index;
    }
    const std::filesystem::path path = out_dir / ("training_curves_budget" + std::to_string(budget) + ".svg");
    write_file(path, svg.finish());
    written.push_back(path);
  }
}

void emit_information_surface(const std::vector<ItemParams>& bank, const std::vector<Ability>& trajectory,
                              const std::filesystem::path& out_dir,
                              std::vector<std::filesystem::path>& written) {
  // Items sorted by difficulty, downsampled to at most 160 display rows.
  std::vector<const ItemParams*> sorted;
  sorted.reserve(bank.size());
  for (const auto& item : bank) sorted.push_back(&item);
  std::sort(sorted.begin(), sorted.end(), [](const ItemParams* a, const ItemParams* b) {
    if (a->difficulty != b->difficulty) return a->difficulty < b->difficulty;
    return a->item_id < b->item_id;
  });
  const std::size_t max_rows = 160;
  const std::size_t stride = std::max<std::size_t>(1, sorted.size() / max_rows);
  std::vector<ItemParams> display;
  for (std::size_t j = 0; j < sorted.size(); j += stride) display.push_back(*sorted[j]);

  const InformationSurface surface = information_surface(display, trajectory);
  double max_info = 0.0;
  for (double v : surface.values) max_info = std::max(max_info, v);
  if (max_info <= 0.0) max_info = 1.0;

  SvgBuilder svg;
  svg.frame("checkpoint", "items by difficulty");
  const double cell_w = (kWidth - kMarginLeft - kMarginRight) / surface.checkpoint_count;
  const double cell_h = (kHeight - kMarginTop - kMarginBottom) / surface.item_count;
  for (int t = 0; t < surface.checkpoint_count; ++t) {
    for (int j = 0; j < surface.item_count; ++j) {
      const double value = surface.at(t, j) / max_info;
      // easy items at the bottom, hard at the top
      const double x = kMarginLeft + t * cell_w;
      const double y = kHeight - kMarginBottom - (j + 1) * cell_h;
      svg.rect(x, y, cell_w + 0.5, cell_h + 0.5, color_ramp(value, 20, 24, 60, 250, 230, 80));
    }
  }
  const std::filesystem::path path = out_dir / "information_surface.svg";
  write_file(path, svg.finish());
  written.push_back(path);
}

void emit_selected_difficulty(const TsvTable& selections, const std::filesystem::path& out_dir,
                              std::vector<std::filesystem::path>& written) {
  const int ckpt_col = selections.column("checkpoint");
  const int step_col = selections.column("step");
  const int diff_col = selections.column("difficulty");

  std::vector<double> xs, ys, steps;
  for (const auto& row : selections.rows) {
    xs.push_back(std::stod(row[ckpt_col]));
    ys.push_back(std::stod(row[diff_col]));
    steps.push_back(std::stod(row[step_col]));
  }
  if (xs.empty()) return;

  const Axis x_axis = fit_axis(xs);
  const Axis y_axis = fit_axis(ys);
  const double max_step = *std::max_element(steps.begin(), steps.end());

  SvgBuilder svg;
  svg.frame("checkpoint", "difficulty of selected item");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double order = max_step > 0.0 ? steps[i] / max_step : 0.0;
    // bright = selected early, dark = selected late
    svg.circle(x_axis.to_x(xs[i]), y_axis.to_y(ys[i]), 2.0, color_ramp(order, 252, 200, 60, 60, 20, 90));
  }
  const std::filesystem::path path = out_dir / "selected_difficulty.svg";
  write_file(path, svg.finish());
  written.push_back(path);
}

void emit_items_to_stop(const TsvTable& stops, const std::filesystem::path& out_dir,
                        std::vector<std::filesystem::path>& written) {
  const int ckpt_col = stops.column("checkpoint");
  const int items_col = stops.column("items_administered");

  std::vector<double> xs, ys;
  for (const auto& row : stops.rows) {
    xs.push_back(std::stod(row[ckpt_col]));
    ys.push_back(std::stod(row[items_col]));
  }
  if (xs.empty()) return;

  const Axis x_axis = fit_axis(xs);
  Axis y_axis = fit_axis(ys);
  y_axis.min = std::min(0.0, y_axis.min);

  SvgBuilder svg;
  svg.frame("checkpoint", "items to reach the SE threshold");
  std::vector<double> px, py;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    px.push_back(x_axis.to_x(xs[i]));
    py.push_back(y_axis.to_y(ys[i]));
  }
  svg.polyline(px, py, kPalette[0]);
  const std::filesystem::path path = out_dir / "items_to_stop.svg";
  write_file(path, svg.finish());
  written.push_back(path);
}

void emit_icc(const std::vector<ItemParams>& bank, const std::filesystem::path& out_dir,
              std::vector<std::filesystem::path>& written) {
  // Difficulty quintile representatives.
  std::vector<ItemParams> sorted(bank.begin(), bank.end());
  std::sort(sorted.begin(), sorted.end(), [](const ItemParams& a, const ItemParams& b) {
    if (a.difficulty != b.difficulty) return a.difficulty < b.difficulty;
    return a.item_id < b.item_id;
  });
  std::vector<ItemParams> chosen;
  const int curves = std::min<int>(5, static_cast<int>(sorted.size()));
  for (int c = 0; c < curves; ++c) {
    chosen.push_back(sorted[(sorted.size() - 1) * c / std::max(1, curves - 1)]);
  }

  SvgBuilder svg;
  svg.frame("ability", "success probability");
  const Axis x_axis{-6.3, 6.3};
  const Axis y_axis{-0.04, 1.04};
  double legend_y = kMarginTop + 16.0;
  for (int c = 0; c < curves; ++c) {
    const IccSamples samples = sample_icc(chosen[c]);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < samples.thetas.size(); ++i) {
      xs.push_back(x_axis.to_x(samples.thetas[i]));
      ys.push_back(y_axis.to_y(samples.probabilities[i]));
    }
    const char* color = kPalette[c % 5];
    svg.polyline(xs, ys, color);
    svg.text(kMarginLeft + 8.0, legend_y,
             chosen[c].item_id + " (a=" + num(chosen[c].discrimination) + ", b=" + num(chosen[c].difficulty) + ")",
             "start", color);
    legend_y += 16.0;
  }
  const std::filesystem::path path = out_dir / "icc.svg";
  write_file(path, svg.finish());
  written.push_back(path);
}

}  // namespace

IccSamples sample_icc(const ItemParams& item, double theta_min, double theta_max, int sample_count) {
  validate_item(item);
  if (sample_count < 2) throw ValidationError("sample_icc: sample_count must be >= 2");
  IccSamples samples;
  samples.item = item;
  samples.thetas.reserve(sample_count);
  samples.probabilities.reserve(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    const double theta = theta_min + (theta_max - theta_min) * i / (sample_count - 1);
    samples.thetas.push_back(theta);
    samples.probabilities.push_back(response_probability(Ability{theta}, item));
  }
  return samples;
}

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& results_dir,
                                               const std::filesystem::path& out_dir) {
  const std::filesystem::path results_path = results_dir / "results.tsv";
  const TsvTable results = read_tsv(results_path);
  require_columns(results, {"strategy", "budget", "replication", "tv", "monotonicity", "rank_distance"},
                  results_path);

  const std::filesystem::path curves_path = results_dir / "curves.tsv";
  const TsvTable curves = read_tsv(curves_path);
  require_columns(curves, {"strategy", "budget", "replication", "checkpoint", "score"}, curves_path);

  const std::vector<ItemParams> bank = read_item_bank(results_dir / "bank.tsv");
  const std::vector<Ability> trajectory = read_trajectory_file(results_dir / "trajectory.tsv");

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  emit_training_curves(curves, out_dir, written);
  emit_information_surface(bank, trajectory, out_dir, written);
  if (std::filesystem::exists(results_dir / "selections.tsv")) {
    const std::filesystem::path path = results_dir / "selections.tsv";
    const TsvTable selections = read_tsv(path);
    require_columns(selections, {"checkpoint", "step", "item_id", "difficulty"}, path);
    emit_selected_difficulty(selections, out_dir, written);
  }
  if (std::filesystem::exists(results_dir / "stops.tsv")) {
    const std::filesystem::path path = results_dir / "stops.tsv";
    const TsvTable stops = read_tsv(path);
    require_columns(stops, {"checkpoint", "items_administered", "final_se", "stop_reason"}, path);
    emit_items_to_stop(stops, out_dir, written);
  }
  emit_icc(bank, out_dir, written);
  return written;
}

}  // namespace irteval
