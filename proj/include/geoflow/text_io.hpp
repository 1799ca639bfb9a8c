#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoflow {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

// ---- time ----------------------------------------------------------------

/// Days since 1970-01-01 for an ISO date "YYYY-MM-DD".
std::int64_t parse_date(std::string_view text);
std::string format_date(std::int64_t days_since_epoch);

/// Accepts integer epoch seconds or "YYYY-MM-DDTHH:MM:SSZ".
std::int64_t parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t seconds);

/// Floor division that rounds toward negative infinity.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0);
}

// ---- CSV -----------------------------------------------------------------

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  /// Column index by header name; throws config error when missing.
  std::size_t column(std::string_view name) const;
};

/// RFC 4180-style reader (quoted fields, doubled quotes). First row is the header.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// ---- key=value config ------------------------------------------------------

/// Flat `key=value` file. Blank lines and lines starting with '#' are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::filesystem::path& path);
  static KeyValueConfig parse(std::string_view text, std::string_view origin = "<string>");

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Path value resolved against the directory of the loaded file.
  std::optional<std::filesystem::path> get_path(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

/// Reads a whole file; throws io error naming the path on failure.
std::string read_file(const std::filesystem::path& path);

/// Writes atomically enough for our purposes (truncate + write); io error on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace geoflow
