#include "gridcast/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "gridcast/error.hpp"

namespace gridcast::csv {

namespace fs = std::filesystem;

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

Reader::Reader(const fs::path& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::string line;
  while (std::getline(in, line)) lines_.push_back(std::move(line));
  // Skip blank lines and '#' comments before the header.
  while (cursor_ < lines_.size() && (lines_[cursor_].empty() || lines_[cursor_][0] == '#')) ++cursor_;
  if (cursor_ == lines_.size()) fail(ErrorCode::ParseError, path.string() + ": missing header");
  std::string_view head = lines_[cursor_];
  if (head.size() >= 3 && head.substr(0, 3) == "\xEF\xBB\xBF") head.remove_prefix(3);
  header_ = split_line(head);
  for (auto& h : header_) {
    while (!h.empty() && h.back() == ' ') h.pop_back();
    while (!h.empty() && h.front() == ' ') h.erase(h.begin());
  }
  ++cursor_;
  line_ = cursor_;
}

std::size_t Reader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  fail(ErrorCode::ParseError, path_.string() + ": header lacks column '" + std::string(name) + "'");
}

bool Reader::next(std::vector<std::string>& fields) {
  while (cursor_ < lines_.size()) {
    const std::string& l = lines_[cursor_++];
    line_ = cursor_;
    if (l.empty() || l == "\r") continue;
    fields = split_line(l);
    if (fields.size() != header_.size()) {
      fail(ErrorCode::ParseError, path_.string() + ":" + std::to_string(line_) + ": expected " +
                                      std::to_string(header_.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    return true;
  }
  return false;
}

double parse_double(std::string_view text, const std::string& where, bool allow_grouping) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    if (c == ',' && allow_grouping) continue;
    cleaned.push_back(c);
  }
  double value = 0.0;
  const char* first = cleaned.data();
  const char* last = cleaned.data() + cleaned.size();
  if (!cleaned.empty() && cleaned.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cleaned.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    fail(ErrorCode::ParseError, where + ": cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text, const std::string& where) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, where + ": cannot parse integer '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(contents.data(), std::streamsize(contents.size()));
    if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot rename into '" + path.string() + "': " + ec.message());
}

}  // namespace gridcast::csv
