#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/ingest.hpp"
#include "gridcast/preprocess.hpp"
#include "gridcast/series.hpp"

namespace gridcast::cli {

enum class DatasetFormat { household_long, gefc };

std::string_view to_string(DatasetFormat format) noexcept;
DatasetFormat parse_dataset_format(std::string_view text);

// Contents of <root>/dataset.json.
struct DatasetSpec {
  std::string id = "dataset";
  DatasetFormat format = DatasetFormat::household_long;
  std::string timezone = "UTC";
  SplitSpec split = SplitSpec::at_fraction(0.8);
  std::optional<std::string> holidays;   // file name relative to the root
  std::optional<std::string> incidence;  // file name relative to the root
  std::optional<int> first_year;         // gefc only
  std::optional<int> last_year;          // gefc only
};

inline constexpr int kDatasetSchemaVersion = 1;

DatasetSpec read_dataset_spec(const std::filesystem::path& root);
void write_dataset_spec(const std::filesystem::path& root, const DatasetSpec& spec);

struct PreprocessingSummary {
  std::vector<std::string> households_dropped;
  std::size_t flagged_interpolated = 0;
  std::size_t outliers_removed = 0;
};

// A cleaned hierarchy on the local wall clock of the declared zone, with its
// aligned covariates.
struct LoadedDataset {
  std::filesystem::path root;
  DatasetSpec spec;
  HierarchicalSet hierarchy;
  Series temperature;
  std::optional<Series> incidence;
  HolidayCalendar calendar = HolidayCalendar::none();
  PreprocessingSummary preprocessing;
  Warnings warnings;
  std::vector<std::filesystem::path> inputs;  // every file read, sorted
};

// household-long: substations/<id>.csv, each holding that substation's
// households; households are filtered, flag-interpolated, DST-harmonized and
// summed. gefc: load.csv with one column block per zone. Both: temperature.csv
// in the wide station format, IQR cleaning per substation, grid rebuilt as
// the substation sum.
LoadedDataset load_dataset(const std::filesystem::path& root);

// Level::hierarchical yields the substation frames.
std::vector<CovariateFrame> dataset_frames(const LoadedDataset& data, Level level);

// Test-side evaluation windows of the grid series for input window k.
std::vector<EvalWindow> dataset_windows(const LoadedDataset& data, std::size_t k, WindowKind kind);

// The first `rows` rows of a frame.
CovariateFrame head_rows(const CovariateFrame& frame, std::size_t rows);

struct SynthOptions {
  SyntheticConfig generator;
  DatasetFormat format = DatasetFormat::household_long;
  std::string id;  // empty: derived from the seed
};

// Writes a complete dataset directory; returns the files written, sorted.
std::vector<std::filesystem::path> write_synthetic_dataset(const std::filesystem::path& root,
                                                           const SynthOptions& options);

}  // namespace gridcast::cli
