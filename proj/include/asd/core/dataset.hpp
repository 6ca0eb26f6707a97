// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// First-shot dataset model: one section per machine type, source/target
// domains, train/test/supplementary splits, optional per-clip attributes.
//
// File names follow
//   section_<NN>[_<domain>][_<split>][_<condition>|_<kind>]_<index>[_<key>_<value>]*.wav
// under <root>/<machine_type>/<split dir>/. Tokens are configurable through
// NamingConfig so variant trees can be ingested. When the split token is
// absent (evaluation test clips) it is taken from the parent directory.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asd/core/text_io.hpp"

namespace asd {

enum class Domain { kSource, kTarget, kUnknown };
enum class Split { kTrain, kTest, kSupplementary };
enum class Condition { kNormal, kAnomaly, kUnknown };
enum class DatasetRole { kDevelopment, kAdditionalTraining, kEvaluation };

const char* to_string(Domain d);
const char* to_string(Split s);
const char* to_string(Condition c);
const char* to_string(DatasetRole r);
Domain parse_domain(const std::string& text);
Split parse_split(const std::string& text);
Condition parse_condition(const std::string& text);
DatasetRole parse_role(const std::string& text);

using AttributeMap = std::map<std::string, std::string>;

/// Attribute key that marks a supplementary clip as "clean" or "noise".
inline constexpr const char* kSupplementaryKindKey = "supplementary";

struct ClipRecord {
  std::string path;  // relative to the dataset root, '/' separated
  std::string machine_type;
  std::string section = "00";
  Domain domain = Domain::kUnknown;
  Split split = Split::kTrain;
  Condition condition = Condition::kUnknown;
  AttributeMap attributes;

  bool operator==(const ClipRecord&) const = default;
};

struct DatasetManifest {
  DatasetRole role = DatasetRole::kDevelopment;
  std::vector<ClipRecord> records;  // sorted by path

  std::set<std::string> machine_types() const;
  std::vector<const ClipRecord*> select(const std::string& machine, Split split) const;
  void sort_records();

  bool operator==(const DatasetManifest&) const = default;
};

struct NamingConfig {
  std::string section_prefix = "section";
  char separator = '_';
  std::string extension = ".wav";
  std::map<std::string, Domain> domain_tokens{{"source", Domain::kSource},
                                              {"target", Domain::kTarget}};
  std::map<std::string, Split> split_tokens{{"train", Split::kTrain},
                                            {"test", Split::kTest},
                                            {"supplementary", Split::kSupplementary},
                                            {"supplemental", Split::kSupplementary}};
  std::map<std::string, Condition> condition_tokens{{"normal", Condition::kNormal},
                                                    {"anomaly", Condition::kAnomaly}};
  std::set<std::string> supplementary_kinds{"clean", "noise"};
  /// Attribute keys that mean "attributes concealed" and are dropped.
  std::set<std::string> concealed_markers{"noAttribute", "noAttributes"};

  /// Overrides from keys: section_prefix, extension, separator,
  /// source_tokens, target_tokens, train_tokens, test_tokens,
  /// supplementary_tokens, normal_tokens, anomaly_tokens,
  /// supplementary_kinds (comma-separated lists).
  static NamingConfig from_keyvalue(const KeyValueFile& file);
};

/// Parses a path relative to the dataset root. Returns nullopt and fills
/// `reason` when the name does not follow the convention.
std::optional<ClipRecord> parse_clip_path(const std::string& relative_path,
                                          const NamingConfig& naming, std::string* reason);

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct ScanResult {
  DatasetManifest manifest;
  std::vector<SkippedFile> skipped;
};

/// Maps every WAV under `root` to a record. Unparseable names land in
/// `skipped`. kEmptyManifest when no WAV is found; kDuplicate when two
/// entries resolve to the same file.
ScanResult scan_dataset(const std::filesystem::path& root, const NamingConfig& naming = {},
                        DatasetRole role = DatasetRole::kDevelopment);

/// file name -> attributes. First CSV column is the clip file name (or a path
/// ending in it); remaining columns are key,value pairs.
struct AttributeTable {
  std::map<std::string, AttributeMap> by_file;
};

AttributeTable load_attributes_csv(const std::filesystem::path& path,
                                   const NamingConfig& naming = {});

struct MergeResult {
  std::size_t merged = 0;
  std::vector<std::string> warnings;
};

/// Merges by base file name within `machine` (all machines when empty).
MergeResult merge_attributes(DatasetManifest& manifest, const AttributeTable& table,
                             const std::string& machine = {});

/// Loads <root>/<machine>/attributes_*.csv for every machine in the manifest.
MergeResult merge_attribute_files(DatasetManifest& manifest, const std::filesystem::path& root,
                                  const NamingConfig& naming = {});

// Manifest CSV: header
//   path,machine_type,section,domain,split,condition,attributes
// attributes are "key=value" pairs joined by ';'. An optional first line
// "# role=<role>" records the dataset role.
std::string manifest_to_csv(const DatasetManifest& manifest);
DatasetManifest manifest_from_csv(const std::string& text, const std::string& origin);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Throws kConfig when the two manifests share a machine type.
void validate_first_shot(const DatasetManifest& development, const DatasetManifest& evaluation);
/// Throws kConfig when a machine type has more than one section.
void validate_single_section(const DatasetManifest& manifest);
/// Throws kFormat when a train record is not labelled normal or a
/// supplementary record lacks a clean/noise flag.
void validate_records(const DatasetManifest& manifest);

/// Official layout per section: 990 source + 10 target training clips and,
/// for the development role, 100 normal + 100 anomalous test clips.
std::vector<std::string> official_layout_problems(const DatasetManifest& manifest);

struct SectionCounts {
  std::size_t normals_source = 0;
  std::size_t normals_target = 0;
  std::size_t anomalies = 0;

  std::size_t normals() const { return normals_source + normals_target; }
};

/// Test-split ground truth per (machine, section). kUndefinedMetric when a
/// section lacks normals in a domain, anomalies, or carries unknown labels.
std::map<std::pair<std::string, std::string>, SectionCounts> eval_set_counts(
    const DatasetManifest& manifest);

}  // namespace asd
