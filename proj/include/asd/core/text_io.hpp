// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Small text-format helpers shared by the config, manifest and report code:
// a `key = value` file reader/writer and a minimal CSV codec (RFC 4180
// quoting, no embedded newlines).

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace asd {

/// Ordered `key = value` document. Lines starting with '#' are comments.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, const std::string& origin = "<memory>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  void set(const std::string& key, std::string value);

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string to_string() const;

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);
std::vector<std::int64_t> parse_int_list(std::string_view text);

double parse_double(std::string_view text, const std::string& what);
std::int64_t parse_int(std::string_view text, const std::string& what);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

using CsvRow = std::vector<std::string>;

CsvRow parse_csv_line(std::string_view line);
std::string format_csv_line(const CsvRow& row);

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  /// Column index by name, or -1.
  int column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path, bool has_header = true);

/// Writes via a temporary sibling and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace asd
