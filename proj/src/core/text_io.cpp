// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "asd/core/error.hpp"

namespace asd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kUnsupportedChannels: return "unsupported channel count";
    case ErrorCode::kEmptyAudio: return "empty audio";
    case ErrorCode::kTooShort: return "input too short";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kEmptyManifest: return "empty manifest";
    case ErrorCode::kDuplicate: return "duplicate entry";
    case ErrorCode::kNoData: return "no data";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kUndefinedMetric: return "undefined metric";
    case ErrorCode::kNumerical: return "numerical failure";
    case ErrorCode::kArtifactFormat: return "artifact format error";
    case ErrorCode::kVersionMismatch: return "artifact version mismatch";
    case ErrorCode::kCorruptArtifact: return "corrupt artifact";
    case ErrorCode::kMissingArtifact: return "missing artifact";
    case ErrorCode::kMismatch: return "mismatch";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      return parts;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorCode::kFormat, "cannot parse '" + t + "' as a number for " + what);
  }
  return value;
}

std::int64_t parse_int(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorCode::kFormat, "cannot parse '" + t + "' as an integer for " + what);
  }
  return value;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(text, ',')) {
    out.push_back(parse_int(part, "integer list"));
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

KeyValueFile KeyValueFile::parse(std::string_view text, const std::string& origin) {
  KeyValueFile file;
  file.origin_ = origin;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kFormat,
           origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      fail(ErrorCode::kFormat, origin + ":" + std::to_string(line_no) + ": empty key");
    }
    file.values_[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::kConfig, origin_ + ": missing key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void KeyValueFile::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(it->second, origin_ + ":" + key);
}

std::int64_t KeyValueFile::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int(it->second, origin_ + ":" + key);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorCode::kFormat, origin_ + ":" + key + ": expected a boolean, got '" + v + "'");
}

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

CsvRow parse_csv_line(std::string_view line) {
  CsvRow row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) fail(ErrorCode::kFormat, "unterminated quote in CSV line");
  row.push_back(std::move(field));
  return row;
}

std::string format_csv_line(const CsvRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    const auto& f = row[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  return out;
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
  CsvTable table;
  bool first = true;
  for (const auto& line : split(read_text_file(path), '\n')) {
    if (trim(line).empty()) continue;
    auto row = parse_csv_line(line);
    if (first && has_header) {
      for (auto& h : row) h = trim(h);
      table.header = std::move(row);
    } else {
      table.rows.push_back(std::move(row));
    }
    first = false;
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace asd
