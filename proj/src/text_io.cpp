#include "geoflow/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "geoflow/error.hpp"

namespace geoflow {

namespace chr = std::chrono;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view text) {
  const auto* ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace {

int parse_fixed_int(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorKind::invalid_argument, "malformed date/time '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::int64_t parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    fail(ErrorKind::invalid_argument, "malformed date '" + std::string(text) + "'");
  }
  const chr::year_month_day ymd{chr::year{parse_fixed_int(text.substr(0, 4), text)},
                                chr::month{static_cast<unsigned>(parse_fixed_int(text.substr(5, 2), text))},
                                chr::day{static_cast<unsigned>(parse_fixed_int(text.substr(8, 2), text))}};
  if (!ymd.ok()) fail(ErrorKind::invalid_argument, "invalid date '" + std::string(text) + "'");
  return chr::sys_days{ymd}.time_since_epoch().count();
}

std::string format_date(std::int64_t days_since_epoch) {
  const chr::year_month_day ymd{chr::sys_days{chr::days{days_since_epoch}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::int64_t parse_timestamp(std::string_view text) {
  text = trim(text);
  std::int64_t epoch = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), epoch);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size()) return epoch;
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' ||
      text[19] != 'Z') {
    fail(ErrorKind::invalid_argument, "malformed timestamp '" + std::string(text) + "'");
  }
  const auto days = parse_date(text.substr(0, 10));
  const int hh = parse_fixed_int(text.substr(11, 2), text);
  const int mm = parse_fixed_int(text.substr(14, 2), text);
  const int ss = parse_fixed_int(text.substr(17, 2), text);
  if (hh > 23 || mm > 59 || ss > 60) {
    fail(ErrorKind::invalid_argument, "invalid time of day '" + std::string(text) + "'");
  }
  return days * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(std::int64_t seconds) {
  const auto days = floor_div(seconds, 86400);
  const auto rem = seconds - days * 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(days).c_str(),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

// ---- CSV -----------------------------------------------------------------

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorKind::config, "CSV is missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field += c;
        any = true;
    }
  }
  if (quoted) fail(ErrorKind::config, "CSV ends inside a quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  CsvTable table;
  if (rows.empty()) return table;
  table.header = std::move(rows.front());
  for (auto& h : table.header) h = std::string(trim(h));
  table.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != table.header.size()) {
      fail(ErrorKind::config, "CSV row " + std::to_string(i + 2) + " has " +
                                  std::to_string(table.rows[i].size()) + " fields, expected " +
                                  std::to_string(table.header.size()));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

// ---- key=value -------------------------------------------------------------

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view origin) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const auto line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      fail(ErrorKind::config, std::string(origin) + ":" + std::to_string(line_no) +
                                  ": expected key=value, got '" + std::string(line) + "'");
    }
    cfg.values_[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  auto cfg = parse(read_file(path), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  double out = 0.0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
    fail(ErrorKind::config, "key '" + key + "' expects a number, got '" + *v + "'");
  }
  return out;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  std::int64_t out = 0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
    fail(ErrorKind::config, "key '" + key + "' expects an integer, got '" + *v + "'");
  }
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v || v->empty()) return fallback;
  const auto low = to_lower(*v);
  if (low == "true" || low == "1" || low == "yes") return true;
  if (low == "false" || low == "0" || low == "no") return false;
  fail(ErrorKind::config, "key '" + key + "' expects a boolean, got '" + *v + "'");
}

std::optional<std::filesystem::path> KeyValueConfig::get_path(const std::string& key) const {
  const auto v = get(key);
  if (!v || v->empty()) return std::nullopt;
  std::filesystem::path p(*v);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::io, "read failed on '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::io, "write failed on '" + path.string() + "'");
}

}  // namespace geoflow
