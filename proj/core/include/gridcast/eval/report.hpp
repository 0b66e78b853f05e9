#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridcast/eval/stats.hpp"
#include "gridcast/models/trained_model.hpp"
#include "gridcast/preprocess.hpp"
#include "gridcast/series.hpp"

namespace gridcast {

// Actual and forecast values of one evaluation window of one series.
struct WindowResult {
  Hour start{};
  std::string series_id;
  std::vector<double> actual;
  std::vector<double> forecast;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) denominator; 0 for a single window
};

struct EvalReport {
  std::string model_id;
  std::string dataset_id;
  Level level = Level::grid;
  WindowKind kind = WindowKind::day;
  std::vector<Hour> starts;
  std::vector<std::string> series;
  std::vector<double> rmse;
  std::vector<double> mape;
  std::vector<double> smape;
  MetricSummary rmse_summary;
  MetricSummary mape_summary;
  MetricSummary smape_summary;
  // Set when only one window exists and the std is not defined.
  bool single_window = false;

  std::size_t windows() const noexcept { return starts.size(); }
};

MetricSummary summarize(std::span<const double> values);

// Per-window metrics and their mean/std. Throws NoWindows on empty input.
EvalReport evaluate_windows(std::span<const WindowResult> results, std::string model_id, std::string dataset_id,
                            Level level, WindowKind kind);

// Forecasts every window with the model. Level::grid expects one frame;
// Level::hierarchical sums the per-frame forecasts and actuals into one grid
// series per window; Level::substation keeps one result per frame and window.
// Windows are processed in fixed-size chunks, so results do not depend on
// `threads`.
std::vector<WindowResult> forecast_windows(const TrainedModel& model, std::span<const CovariateFrame> frames,
                                           std::span<const EvalWindow> windows, Level level, std::size_t threads = 1);

// <dir>/windows.csv, <dir>/forecasts.csv and <dir>/summary.json.
void write_report(const EvalReport& report, std::span<const WindowResult> results, const std::filesystem::path& dir);
EvalReport read_report(const std::filesystem::path& dir);

// Welch test on the per-window MAPE vectors of two reports over the same
// window set (else WindowSetMismatch).
SignificanceResult compare_reports(const EvalReport& a, const EvalReport& b);

}  // namespace gridcast
