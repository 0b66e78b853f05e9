#include "gridcast/cli/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Series sum_households(const std::string& id, std::span<const Series> households) {
  const auto aligned = align(households);
  std::vector<double> total(aligned.front().size(), 0.0);
  for (const auto& h : aligned) {
    for (std::size_t t = 0; t < total.size(); ++t) total[t] += h[t];
  }
  return Series(id, aligned.front().index(), std::move(total), aligned.front().unit());
}

Series clean_substation(const Series& raw, PreprocessingSummary& summary) {
  auto [interpolated, flag_report] = interpolate_flagged(raw);
  summary.flagged_interpolated += flag_report.interpolated_count;
  auto [cleaned, iqr_report] = iqr_clean(interpolated);
  summary.outliers_removed += iqr_report.removed_count;
  return cleaned;
}

}  // namespace

std::string_view to_string(DatasetFormat format) noexcept {
  return format == DatasetFormat::gefc ? "gefc" : "household-long";
}

DatasetFormat parse_dataset_format(std::string_view text) {
  if (text == "household-long") return DatasetFormat::household_long;
  if (text == "gefc") return DatasetFormat::gefc;
  fail(ErrorCode::ConfigError, "format: expected household-long or gefc, got '" + std::string(text) + "'");
}

DatasetSpec read_dataset_spec(const fs::path& root) {
  const fs::path path = root / "dataset.json";
  ordered_json j;
  try {
    j = ordered_json::parse(read_text(path));
  } catch (const ordered_json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::ConfigError, path.string() + ": expected a JSON object");
  static const std::vector<std::string> known{"schema_version", "id",        "format",     "timezone",
                                              "split",          "holidays",  "incidence",  "first_year",
                                              "last_year"};
  std::vector<std::string> problems;
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) problems.push_back("unknown key '" + key + "'");
  }
  if (!j.contains("schema_version") || j["schema_version"] != kDatasetSchemaVersion) {
    problems.push_back("schema_version must be " + std::to_string(kDatasetSchemaVersion));
  }
  if (!problems.empty()) {
    std::string msg = path.string() + ":";
    for (const auto& p : problems) msg += " " + p + ";";
    fail(ErrorCode::ConfigError, msg);
  }
  DatasetSpec spec;
  try {
    spec.id = j.value("id", spec.id);
    spec.format = parse_dataset_format(j.value("format", std::string(to_string(spec.format))));
    spec.timezone = j.value("timezone", spec.timezone);
    if (j.contains("split")) {
      const auto& split = j["split"];
      if (split.contains("fraction")) {
        spec.split = SplitSpec::at_fraction(split["fraction"].get<double>());
      } else if (split.contains("date")) {
        spec.split = SplitSpec::at_date(Hour{parse_day(split["date"].get<std::string>())});
      } else {
        fail(ErrorCode::ConfigError, path.string() + ": split needs 'fraction' or 'date'");
      }
    }
    if (j.contains("holidays")) spec.holidays = j["holidays"].get<std::string>();
    if (j.contains("incidence")) spec.incidence = j["incidence"].get<std::string>();
    if (j.contains("first_year")) spec.first_year = j["first_year"].get<int>();
    if (j.contains("last_year")) spec.last_year = j["last_year"].get<int>();
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  (void)TimeZone::from_name(spec.timezone);
  return spec;
}

void write_dataset_spec(const fs::path& root, const DatasetSpec& spec) {
  ordered_json j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["id"] = spec.id;
  j["format"] = std::string(to_string(spec.format));
  j["timezone"] = spec.timezone;
  if (spec.split.mode == SplitSpec::Mode::fraction) {
    j["split"] = {{"fraction", spec.split.fraction}};
  } else {
    j["split"] = {{"date", format_day(std::chrono::floor<std::chrono::days>(spec.split.boundary))}};
  }
  if (spec.holidays) j["holidays"] = *spec.holidays;
  if (spec.incidence) j["incidence"] = *spec.incidence;
  if (spec.first_year) j["first_year"] = *spec.first_year;
  if (spec.last_year) j["last_year"] = *spec.last_year;
  csv::write_file_atomic(root / "dataset.json", j.dump(2) + "\n");
}

LoadedDataset load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) fail(ErrorCode::IoError, "dataset directory '" + root.string() + "' not found");
  LoadedDataset data;
  data.root = root;
  data.spec = read_dataset_spec(root);
  data.inputs.push_back(root / "dataset.json");
  const TimeZone zone = TimeZone::from_name(data.spec.timezone);

  GefcReadOptions gefc_options;
  gefc_options.first_year = data.spec.first_year;
  gefc_options.last_year = data.spec.last_year;

  HierarchicalSet raw;
  raw.grid = Series("grid", HourlyIndex(), {});
  if (data.spec.format == DatasetFormat::household_long) {
    const fs::path dir = root / "substations";
    if (!fs::is_directory(dir)) fail(ErrorCode::IoError, "missing directory '" + dir.string() + "'");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      data.inputs.push_back(file);
      const auto households = read_household_long(file);
      auto [kept, report] = filter_low_consumption(households);
      for (auto& id : report.households_dropped) data.preprocessing.households_dropped.push_back(id);
      if (kept.empty()) {
        data.warnings.push_back(file.filename().string() + ": every household was dropped");
        continue;
      }
      std::vector<Series> local;
      local.reserve(kept.size());
      for (const auto& h : kept) {
        auto [filled, flag_report] = interpolate_flagged(h);
        data.preprocessing.flagged_interpolated += flag_report.interpolated_count;
        local.push_back(harmonize_dst(filled, zone));
      }
      raw.substations.push_back(sum_households(file.stem().string(), local));
    }
  } else {
    const fs::path load = root / "load.csv";
    data.inputs.push_back(load);
    raw = read_gefc_load(load, gefc_options, &data.warnings);
  }
  if (raw.substations.empty()) fail(ErrorCode::EmptyHierarchy, "dataset '" + root.string() + "' has no substations");

  HierarchicalSet cleaned;
  cleaned.grid = Series(raw.grid.id().empty() ? "grid" : raw.grid.id(), HourlyIndex(), {});
  const auto aligned = align(raw.substations);
  for (const auto& s : aligned) cleaned.substations.push_back(clean_substation(s, data.preprocessing));
  data.hierarchy = rebuild_grid(cleaned);

  const fs::path temperature = root / "temperature.csv";
  data.inputs.push_back(temperature);
  data.temperature = read_gefc_temperature(temperature, gefc_options, &data.warnings);

  if (data.spec.incidence) {
    const fs::path path = root / *data.spec.incidence;
    data.inputs.push_back(path);
    data.incidence = read_incidence(path, &data.warnings);
  }
  if (data.spec.holidays) {
    const fs::path path = root / *data.spec.holidays;
    data.inputs.push_back(path);
    data.calendar = HolidayCalendar::read(path);
  }
  std::sort(data.inputs.begin(), data.inputs.end());
  return data;
}

std::vector<CovariateFrame> dataset_frames(const LoadedDataset& data, Level level) {
  const Level frame_level = level == Level::grid ? Level::grid : Level::substation;
  // The hierarchy already sits on the local wall clock.
  return assemble_covariates(data.hierarchy, data.temperature, data.incidence, data.calendar, TimeZone::utc(),
                             frame_level);
}

std::vector<EvalWindow> dataset_windows(const LoadedDataset& data, std::size_t k, WindowKind kind) {
  const auto [train, test] = time_split(data.hierarchy.grid, data.spec.split);
  return enumerate_eval_windows(test, k, kind, train.size(), TimeZone::utc());
}

CovariateFrame head_rows(const CovariateFrame& frame, std::size_t rows) {
  if (rows > frame.index.size()) fail(ErrorCode::InvalidArgument, "head_rows beyond frame length");
  CovariateFrame out = frame;
  out.index = frame.index.slice(0, rows);
  out.past_known = frame.past_known.slice_rows(0, rows);
  out.future_known = frame.future_known.slice_rows(0, rows);
  return out;
}

std::vector<fs::path> write_synthetic_dataset(const fs::path& root, const SynthOptions& options) {
  options.generator.validate();
  const SyntheticDataset synthetic = generate_synthetic(options.generator);
  fs::create_directories(root);

  DatasetSpec spec;
  spec.id = options.id.empty() ? "synthetic-" + std::to_string(options.generator.seed) : options.id;
  spec.format = options.format;
  spec.timezone = "UTC";
  spec.split = SplitSpec::at_fraction(0.8);

  std::vector<fs::path> written;
  if (options.format == DatasetFormat::household_long) {
    fs::create_directories(root / "substations");
    for (const auto& s : synthetic.hierarchy.substations) {
      const fs::path path = root / "substations" / (s.id() + ".csv");
      write_household_long(path, std::span<const Series>(&s, 1));
      written.push_back(path);
    }
  } else {
    std::vector<Series> zones;
    for (std::size_t i = 0; i < synthetic.hierarchy.substations.size(); ++i) {
      // Zone numbers skip 9, which the GEFC reader excludes.
      const std::size_t zone = i + 1 < 9 ? i + 1 : i + 2;
      zones.push_back(synthetic.hierarchy.substations[i].renamed("zone_" + std::to_string(zone)));
    }
    const fs::path path = root / "load.csv";
    write_gefc_load(path, zones);
    written.push_back(path);
  }
  const fs::path temperature = root / "temperature.csv";
  write_gefc_temperature(temperature, synthetic.temperature);
  written.push_back(temperature);
  write_dataset_spec(root, spec);
  written.push_back(root / "dataset.json");
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace gridcast::cli
