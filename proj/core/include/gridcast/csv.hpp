#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gridcast::csv {

// Comma-separated reader. Double quotes group a field; inside quotes commas
// are kept verbatim (GEFC files quote thousands-separated numbers).
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const noexcept { return header_; }
  // Column position of `name` in the header; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
  bool next(std::vector<std::string>& fields);
  // 1-based line number of the row last returned by next().
  std::size_t line() const noexcept { return line_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<std::string> lines_;
  std::size_t cursor_ = 0;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
};

std::vector<std::string> split_line(std::string_view line);

// Strict decimal parse (dot decimal, optional thousands commas when
// `allow_grouping`); throws ParseError naming `where` on failure.
double parse_double(std::string_view text, const std::string& where, bool allow_grouping = false);
long long parse_integer(std::string_view text, const std::string& where);

// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

// Writes via a temporary file and rename, so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace gridcast::csv
