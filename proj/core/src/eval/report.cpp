#include "gridcast/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"
#include "gridcast/eval/metrics.hpp"

namespace gridcast {

using nlohmann::ordered_json;

MetricSummary summarize(std::span<const double> values) {
  return {sample_mean(values), std::sqrt(sample_variance(values))};
}

EvalReport evaluate_windows(std::span<const WindowResult> results, std::string model_id, std::string dataset_id,
                            Level level, WindowKind kind) {
  if (results.empty()) fail(ErrorCode::NoWindows, "no evaluation windows");
  EvalReport r;
  r.model_id = std::move(model_id);
  r.dataset_id = std::move(dataset_id);
  r.level = level;
  r.kind = kind;
  for (const auto& w : results) {
    if (w.actual.size() != w.forecast.size() || w.actual.empty()) {
      fail(ErrorCode::IndexMismatch, "window " + format_hour(w.start) + " has misaligned forecast and truth");
    }
    r.starts.push_back(w.start);
    r.series.push_back(w.series_id);
    r.rmse.push_back(rmse(w.actual, w.forecast));
    r.mape.push_back(mape(w.actual, w.forecast));
    r.smape.push_back(smape(w.actual, w.forecast));
  }
  r.rmse_summary = summarize(r.rmse);
  r.mape_summary = summarize(r.mape);
  r.smape_summary = summarize(r.smape);
  r.single_window = results.size() == 1;
  return r;
}

namespace {

std::vector<double> actual_values(const CovariateFrame& f, std::size_t anchor, std::size_t horizon) {
  std::vector<double> v(horizon);
  for (std::size_t t = 0; t < horizon; ++t) v[t] = f.past_known.at(anchor + t, 0);
  return v;
}

}  // namespace

std::vector<WindowResult> forecast_windows(const TrainedModel& model, std::span<const CovariateFrame> frames,
                                           std::span<const EvalWindow> windows, Level level, std::size_t threads) {
  if (windows.empty()) fail(ErrorCode::NoWindows, "no evaluation windows");
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "no series to forecast");
  if (level == Level::grid && frames.size() != 1) {
    fail(ErrorCode::InvalidArgument, "grid-level evaluation takes exactly one series");
  }
  const std::size_t H = model.horizon();
  const std::size_t history = required_history(model);
  for (const auto& w : windows) {
    if (w.target.length != H) {
      fail(ErrorCode::SchemaMismatch, "window horizon " + std::to_string(w.target.length) + " differs from model " +
                                          std::to_string(H));
    }
  }
  // One task per (frame, window), forecast in fixed chunks.
  struct Task {
    std::size_t frame;
    std::size_t window;
    std::size_t anchor;
  };
  std::vector<Task> tasks;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    for (std::size_t f = 0; f < frames.size(); ++f) {
      tasks.push_back({f, w, frames[f].index.offset_of(windows[w].target.start)});
    }
  }
  std::vector<std::vector<double>> outputs(tasks.size());
  constexpr std::size_t chunk = 64;
  const std::size_t n_chunks = (tasks.size() + chunk - 1) / chunk;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk, end = std::min(tasks.size(), begin + chunk);
    std::vector<ForecastWindow> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(cut_window(frames[tasks[i].frame], tasks[i].anchor, history, H));
    }
    auto out = forecast(model, batch);
    for (std::size_t i = begin; i < end; ++i) outputs[i] = std::move(out[i - begin]);
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n_chunks, 1));
  if (threads == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t c = t; c < n_chunks; c += threads) run_chunk(c);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<WindowResult> results;
  if (level == Level::hierarchical) {
    for (std::size_t w = 0; w < windows.size(); ++w) {
      std::vector<Series> fc, act;
      for (std::size_t f = 0; f < frames.size(); ++f) {
        const std::size_t i = w * frames.size() + f;
        const HourlyIndex idx(windows[w].target.start, H);
        fc.emplace_back(frames[f].series_id, idx, outputs[i]);
        act.emplace_back(frames[f].series_id, idx, actual_values(frames[f], tasks[i].anchor, H));
      }
      const Series grid_fc = aggregate_bottom_up(fc);
      const Series grid_act = aggregate_bottom_up(act);
      results.push_back({windows[w].target.start, grid_fc.id(),
                         std::vector<double>(grid_act.values().begin(), grid_act.values().end()),
                         std::vector<double>(grid_fc.values().begin(), grid_fc.values().end())});
    }
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& f = frames[tasks[i].frame];
      results.push_back({windows[tasks[i].window].target.start, f.series_id, actual_values(f, tasks[i].anchor, H),
                         std::move(outputs[i])});
    }
  }
  return results;
}

void write_report(const EvalReport& report, std::span<const WindowResult> results, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string windows = "window_start,series,rmse,mape,smape\n";
  for (std::size_t i = 0; i < report.windows(); ++i) {
    windows += format_hour(report.starts[i]) + "," + report.series[i] + "," + csv::format_double(report.rmse[i]) +
               "," + csv::format_double(report.mape[i]) + "," + csv::format_double(report.smape[i]) + "\n";
  }
  csv::write_file_atomic(dir / "windows.csv", windows);

  std::string fc = "window_start,series,timestamp,actual,forecast\n";
  for (const auto& w : results) {
    for (std::size_t t = 0; t < w.actual.size(); ++t) {
      fc += format_hour(w.start) + "," + w.series_id + "," +
            format_hour(w.start + std::chrono::hours(static_cast<long>(t))) + "," + csv::format_double(w.actual[t]) +
            "," + csv::format_double(w.forecast[t]) + "\n";
    }
  }
  csv::write_file_atomic(dir / "forecasts.csv", fc);

  ordered_json j;
  j["model"] = report.model_id;
  j["dataset"] = report.dataset_id;
  j["level"] = std::string(to_string(report.level));
  j["horizon"] = std::string(to_string(report.kind));
  j["windows"] = report.windows();
  auto metric = [](const MetricSummary& m) { return ordered_json{{"mean", m.mean}, {"std", m.std}}; };
  j["rmse"] = metric(report.rmse_summary);
  j["mape"] = metric(report.mape_summary);
  j["smape"] = metric(report.smape_summary);
  j["single_window"] = report.single_window;
  csv::write_file_atomic(dir / "summary.json", j.dump(2) + "\n");
}

EvalReport read_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "summary.json");
  if (!in) fail(ErrorCode::IoError, "cannot open " + (dir / "summary.json").string());
  std::ostringstream buf;
  buf << in.rdbuf();
  EvalReport r;
  try {
    const auto j = ordered_json::parse(buf.str());
    r.model_id = j.at("model").get<std::string>();
    r.dataset_id = j.at("dataset").get<std::string>();
    r.level = parse_level(j.at("level").get<std::string>());
    const auto kind = j.at("horizon").get<std::string>();
    if (kind != "day" && kind != "week") fail(ErrorCode::ParseError, "unknown horizon '" + kind + "'");
    r.kind = kind == "day" ? WindowKind::day : WindowKind::week;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, (dir / "summary.json").string() + ": " + e.what());
  }
  csv::Reader reader(dir / "windows.csv");
  const auto c_start = reader.column("window_start"), c_series = reader.column("series");
  const auto c_rmse = reader.column("rmse"), c_mape = reader.column("mape"), c_smape = reader.column("smape");
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = (dir / "windows.csv").string() + ":" + std::to_string(reader.line());
    r.starts.push_back(parse_timestamp(row[c_start]));
    r.series.push_back(row[c_series]);
    r.rmse.push_back(csv::parse_double(row[c_rmse], where));
    r.mape.push_back(csv::parse_double(row[c_mape], where));
    r.smape.push_back(csv::parse_double(row[c_smape], where));
  }
  if (r.starts.empty()) fail(ErrorCode::NoWindows, (dir / "windows.csv").string() + " lists no windows");
  r.rmse_summary = summarize(r.rmse);
  r.mape_summary = summarize(r.mape);
  r.smape_summary = summarize(r.smape);
  r.single_window = r.starts.size() == 1;
  return r;
}

SignificanceResult compare_reports(const EvalReport& a, const EvalReport& b) {
  if (a.kind != b.kind) fail(ErrorCode::WindowSetMismatch, "reports cover different horizons");
  if (a.windows() != b.windows()) {
    fail(ErrorCode::WindowSetMismatch, "reports cover " + std::to_string(a.windows()) + " and " +
                                           std::to_string(b.windows()) + " windows");
  }
  for (std::size_t i = 0; i < a.windows(); ++i) {
    if (a.starts[i] != b.starts[i]) {
      fail(ErrorCode::WindowSetMismatch, "window " + std::to_string(i) + " starts at " + format_hour(a.starts[i]) +
                                             " vs " + format_hour(b.starts[i]));
    }
  }
  return welch_ttest(a.mape, b.mape);
}

}  // namespace gridcast
