// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/dataset.hpp"

#include <algorithm>
#include <cctype>

#include "asd/core/error.hpp"

namespace fs = std::filesystem;

namespace asd {

const char* to_string(Domain d) {
  switch (d) {
    case Domain::kSource: return "source";
    case Domain::kTarget: return "target";
    case Domain::kUnknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kSupplementary: return "supplementary";
  }
  return "train";
}

const char* to_string(Condition c) {
  switch (c) {
    case Condition::kNormal: return "normal";
    case Condition::kAnomaly: return "anomaly";
    case Condition::kUnknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(DatasetRole r) {
  switch (r) {
    case DatasetRole::kDevelopment: return "development";
    case DatasetRole::kAdditionalTraining: return "additional_training";
    case DatasetRole::kEvaluation: return "evaluation";
  }
  return "development";
}

Domain parse_domain(const std::string& text) {
  if (text == "source") return Domain::kSource;
  if (text == "target") return Domain::kTarget;
  if (text == "unknown" || text.empty()) return Domain::kUnknown;
  fail(ErrorCode::kFormat, "unknown domain '" + text + "'");
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  if (text == "supplementary") return Split::kSupplementary;
  fail(ErrorCode::kFormat, "unknown split '" + text + "'");
}

Condition parse_condition(const std::string& text) {
  if (text == "normal") return Condition::kNormal;
  if (text == "anomaly") return Condition::kAnomaly;
  if (text == "unknown" || text.empty()) return Condition::kUnknown;
  fail(ErrorCode::kFormat, "unknown condition '" + text + "'");
}

DatasetRole parse_role(const std::string& text) {
  if (text == "development") return DatasetRole::kDevelopment;
  if (text == "additional_training") return DatasetRole::kAdditionalTraining;
  if (text == "evaluation") return DatasetRole::kEvaluation;
  fail(ErrorCode::kConfig, "unknown dataset role '" + text + "'");
}

std::set<std::string> DatasetManifest::machine_types() const {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.machine_type);
  return out;
}

std::vector<const ClipRecord*> DatasetManifest::select(const std::string& machine,
                                                       Split split) const {
  std::vector<const ClipRecord*> out;
  for (const auto& r : records) {
    if (r.machine_type == machine && r.split == split) out.push_back(&r);
  }
  return out;
}

void DatasetManifest::sort_records() {
  std::sort(records.begin(), records.end(),
            [](const ClipRecord& a, const ClipRecord& b) { return a.path < b.path; });
}

NamingConfig NamingConfig::from_keyvalue(const KeyValueFile& file) {
  NamingConfig n;
  n.section_prefix = file.get_or("section_prefix", n.section_prefix);
  n.extension = file.get_or("extension", n.extension);
  if (file.has("separator")) {
    const auto& sep = file.get("separator");
    if (sep.size() != 1) fail(ErrorCode::kConfig, "separator must be a single character");
    n.separator = sep[0];
  }
  auto tokens = [&](const char* key) {
    std::vector<std::string> out;
    for (const auto& t : split(file.get(key), ',')) {
      if (!trim(t).empty()) out.push_back(trim(t));
    }
    return out;
  };
  auto rebuild = [&](auto& map, const char* key, auto value) {
    if (!file.has(key)) return;
    std::erase_if(map, [&](const auto& kv) { return kv.second == value; });
    for (const auto& t : tokens(key)) map[t] = value;
  };
  rebuild(n.domain_tokens, "source_tokens", Domain::kSource);
  rebuild(n.domain_tokens, "target_tokens", Domain::kTarget);
  rebuild(n.split_tokens, "train_tokens", Split::kTrain);
  rebuild(n.split_tokens, "test_tokens", Split::kTest);
  rebuild(n.split_tokens, "supplementary_tokens", Split::kSupplementary);
  rebuild(n.condition_tokens, "normal_tokens", Condition::kNormal);
  rebuild(n.condition_tokens, "anomaly_tokens", Condition::kAnomaly);
  if (file.has("supplementary_kinds")) {
    const auto kinds = tokens("supplementary_kinds");
    n.supplementary_kinds = {kinds.begin(), kinds.end()};
  }
  return n;
}

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

template <typename Map>
auto lookup(const Map& map, const std::string& key) -> std::optional<typename Map::mapped_type> {
  const auto it = map.find(key);
  if (it == map.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::optional<ClipRecord> parse_clip_path(const std::string& relative_path,
                                          const NamingConfig& naming, std::string* reason) {
  auto reject = [&](std::string why) -> std::optional<ClipRecord> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };

  const auto parts = split(relative_path, '/');
  if (parts.size() < 2) return reject("file is not inside a machine-type directory");
  const std::string& file = parts.back();
  if (file.size() <= naming.extension.size() ||
      file.compare(file.size() - naming.extension.size(), naming.extension.size(),
                   naming.extension) != 0) {
    return reject("extension is not " + naming.extension);
  }
  const auto tokens =
      split(std::string_view(file).substr(0, file.size() - naming.extension.size()),
            naming.separator);

  ClipRecord rec;
  rec.path = relative_path;
  rec.machine_type = parts.front();

  std::size_t i = 0;
  if (tokens.size() < 3 || tokens[0] != naming.section_prefix || !all_digits(tokens[1])) {
    return reject("name does not start with " + naming.section_prefix + "_<NN>");
  }
  rec.section = tokens[1];
  i = 2;

  if (i < tokens.size()) {
    if (auto d = lookup(naming.domain_tokens, tokens[i])) {
      rec.domain = *d;
      ++i;
    }
  }

  bool split_known = false;
  if (i < tokens.size()) {
    if (auto s = lookup(naming.split_tokens, tokens[i])) {
      rec.split = *s;
      split_known = true;
      ++i;
    }
  }
  if (!split_known && parts.size() >= 3) {
    if (auto s = lookup(naming.split_tokens, parts[parts.size() - 2])) {
      rec.split = *s;
      split_known = true;
    }
  }
  if (!split_known) return reject("no split token in the name or parent directory");

  if (i < tokens.size()) {
    if (rec.split == Split::kSupplementary) {
      if (naming.supplementary_kinds.count(tokens[i])) {
        rec.attributes[kSupplementaryKindKey] = tokens[i];
        ++i;
      }
    } else if (auto c = lookup(naming.condition_tokens, tokens[i])) {
      rec.condition = *c;
      ++i;
    }
  }

  if (i >= tokens.size() || !all_digits(tokens[i])) return reject("missing clip index");
  ++i;

  for (; i < tokens.size(); i += 2) {
    const std::string& key = tokens[i];
    if (naming.concealed_markers.count(key)) {
      --i;  // markers stand alone
      continue;
    }
    rec.attributes[key] = i + 1 < tokens.size() ? tokens[i + 1] : std::string{};
  }

  if (rec.split == Split::kTrain) {
    if (rec.condition == Condition::kAnomaly) return reject("training clip labelled anomaly");
    rec.condition = Condition::kNormal;
  }
  return rec;
}

ScanResult scan_dataset(const fs::path& root, const NamingConfig& naming, DatasetRole role) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::kIo, root.string() + " is not a directory");

  ScanResult result;
  result.manifest.role = role;
  std::set<fs::path> seen;
  const auto options = fs::directory_options::follow_directory_symlink;
  for (auto it = fs::recursive_directory_iterator(root, options);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    const fs::path& p = it->path();
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext != ".wav") continue;

    const fs::path canonical = fs::weakly_canonical(p);
    const std::string rel = p.lexically_relative(root).generic_string();
    if (!seen.insert(canonical).second) {
      fail(ErrorCode::kDuplicate, "duplicate clip " + rel + " (same file as an earlier entry)");
    }
    std::string reason;
    if (auto rec = parse_clip_path(rel, naming, &reason)) {
      result.manifest.records.push_back(std::move(*rec));
    } else {
      result.skipped.push_back({rel, reason});
    }
  }
  if (seen.empty()) fail(ErrorCode::kEmptyManifest, "no WAV files under " + root.string());
  result.manifest.sort_records();
  std::sort(result.skipped.begin(), result.skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) { return a.path < b.path; });
  return result;
}

AttributeTable load_attributes_csv(const fs::path& path, const NamingConfig& naming) {
  AttributeTable table;
  const CsvTable csv = read_csv(path, true);
  for (const auto& row : csv.rows) {
    if (row.empty() || trim(row[0]).empty()) continue;
    const std::string name = fs::path(trim(row[0])).filename().string();
    AttributeMap attrs;
    for (std::size_t c = 1; c < row.size(); c += 2) {
      const std::string key = trim(row[c]);
      if (key.empty() || naming.concealed_markers.count(key)) continue;
      attrs[key] = c + 1 < row.size() ? trim(row[c + 1]) : std::string{};
    }
    table.by_file[name] = std::move(attrs);
  }
  return table;
}

MergeResult merge_attributes(DatasetManifest& manifest, const AttributeTable& table,
                             const std::string& machine) {
  MergeResult result;
  std::map<std::string, std::vector<ClipRecord*>> by_name;
  for (auto& rec : manifest.records) {
    if (!machine.empty() && rec.machine_type != machine) continue;
    by_name[fs::path(rec.path).filename().string()].push_back(&rec);
  }
  for (const auto& [name, attrs] : table.by_file) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      result.warnings.push_back("attribute row for missing clip " + name);
      continue;
    }
    for (ClipRecord* rec : it->second) {
      for (const auto& [k, v] : attrs) rec->attributes[k] = v;
      ++result.merged;
    }
  }
  return result;
}

MergeResult merge_attribute_files(DatasetManifest& manifest, const fs::path& root,
                                  const NamingConfig& naming) {
  MergeResult total;
  for (const auto& machine : manifest.machine_types()) {
    const fs::path dir = root / machine;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("attributes_", 0) == 0 &&
          entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto r = merge_attributes(manifest, load_attributes_csv(f, naming), machine);
      total.merged += r.merged;
      total.warnings.insert(total.warnings.end(), r.warnings.begin(), r.warnings.end());
    }
  }
  return total;
}

namespace {

std::string encode_attributes(const AttributeMap& attrs) {
  std::string out;
  for (const auto& [k, v] : attrs) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

AttributeMap decode_attributes(const std::string& text, const std::string& origin) {
  AttributeMap attrs;
  if (trim(text).empty()) return attrs;
  for (const auto& pair : split(text, ';')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kFormat, origin + ": bad attribute '" + pair + "'");
    attrs[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return attrs;
}

constexpr const char* kManifestHeader = "path,machine_type,section,domain,split,condition,attributes";

}  // namespace

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::string out = std::string("# role=") + to_string(manifest.role) + "\n";
  out += kManifestHeader;
  out += '\n';
  for (const auto& r : manifest.records) {
    out += format_csv_line({r.path, r.machine_type, r.section, to_string(r.domain),
                            to_string(r.split), to_string(r.condition),
                            encode_attributes(r.attributes)});
    out += '\n';
  }
  return out;
}

DatasetManifest manifest_from_csv(const std::string& text, const std::string& origin) {
  DatasetManifest manifest;
  bool header_seen = false;
  std::set<std::string> paths;
  for (const auto& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("role=", 0) == 0) manifest.role = parse_role(body.substr(5));
      continue;
    }
    const auto row = parse_csv_line(line);
    if (!header_seen) {
      if (row.size() < 7 || row[0] != "path") {
        fail(ErrorCode::kFormat, origin + ": expected manifest header '" +
                                     std::string(kManifestHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (row.size() < 7) fail(ErrorCode::kFormat, origin + ": short manifest row");
    ClipRecord rec;
    rec.path = row[0];
    rec.machine_type = row[1];
    rec.section = row[2];
    rec.domain = parse_domain(row[3]);
    rec.split = parse_split(row[4]);
    rec.condition = parse_condition(row[5]);
    rec.attributes = decode_attributes(row[6], origin);
    if (!paths.insert(rec.path).second) {
      fail(ErrorCode::kDuplicate, origin + ": duplicate manifest path " + rec.path);
    }
    manifest.records.push_back(std::move(rec));
  }
  if (!header_seen) fail(ErrorCode::kFormat, origin + ": missing manifest header");
  manifest.sort_records();
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  write_file_atomic(path, manifest_to_csv(manifest));
}

DatasetManifest read_manifest(const fs::path& path) {
  return manifest_from_csv(read_text_file(path), path.string());
}

void validate_first_shot(const DatasetManifest& development, const DatasetManifest& evaluation) {
  const auto dev = development.machine_types();
  std::vector<std::string> shared;
  for (const auto& m : evaluation.machine_types()) {
    if (dev.count(m)) shared.push_back(m);
  }
  if (!shared.empty()) {
    std::string list;
    for (const auto& m : shared) list += (list.empty() ? "" : ", ") + m;
    fail(ErrorCode::kConfig,
         "development and evaluation sets share machine types: " + list);
  }
}

void validate_single_section(const DatasetManifest& manifest) {
  std::map<std::string, std::set<std::string>> sections;
  for (const auto& r : manifest.records) sections[r.machine_type].insert(r.section);
  for (const auto& [machine, ids] : sections) {
    if (ids.size() != 1) {
      fail(ErrorCode::kConfig, machine + " has " + std::to_string(ids.size()) +
                                   " sections; exactly one is allowed");
    }
  }
}

void validate_records(const DatasetManifest& manifest) {
  for (const auto& r : manifest.records) {
    if (r.split == Split::kTrain && r.condition != Condition::kNormal) {
      fail(ErrorCode::kFormat, r.path + ": training clips must be normal");
    }
    if (r.split == Split::kSupplementary) {
      const auto it = r.attributes.find(kSupplementaryKindKey);
      if (it == r.attributes.end() || (it->second != "clean" && it->second != "noise")) {
        fail(ErrorCode::kFormat, r.path + ": supplementary clip is neither clean nor noise");
      }
    }
  }
}

std::vector<std::string> official_layout_problems(const DatasetManifest& manifest) {
  struct Tally {
    std::size_t source_train = 0, target_train = 0, test_normal = 0, test_anomaly = 0;
  };
  std::map<std::pair<std::string, std::string>, Tally> tallies;
  for (const auto& r : manifest.records) {
    auto& t = tallies[{r.machine_type, r.section}];
    if (r.split == Split::kTrain) {
      if (r.domain == Domain::kSource) ++t.source_train;
      if (r.domain == Domain::kTarget) ++t.target_train;
    } else if (r.split == Split::kTest) {
      if (r.condition == Condition::kNormal) ++t.test_normal;
      if (r.condition == Condition::kAnomaly) ++t.test_anomaly;
    }
  }
  std::vector<std::string> problems;
  for (const auto& [key, t] : tallies) {
    const std::string id = key.first + "/section_" + key.second;
    if (t.source_train != 990) {
      problems.push_back(id + ": " + std::to_string(t.source_train) + " source training clips, expected 990");
    }
    if (t.target_train != 10) {
      problems.push_back(id + ": " + std::to_string(t.target_train) + " target training clips, expected 10");
    }
    if (manifest.role == DatasetRole::kDevelopment &&
        (t.test_normal != 100 || t.test_anomaly != 100)) {
      problems.push_back(id + ": " + std::to_string(t.test_normal) + " normal / " +
                         std::to_string(t.test_anomaly) + " anomalous test clips, expected 100 / 100");
    }
  }
  return problems;
}

std::map<std::pair<std::string, std::string>, SectionCounts> eval_set_counts(
    const DatasetManifest& manifest) {
  std::map<std::pair<std::string, std::string>, SectionCounts> counts;
  for (const auto& r : manifest.records) {
    if (r.split != Split::kTest) continue;
    auto& c = counts[{r.machine_type, r.section}];
    if (r.condition == Condition::kUnknown) {
      fail(ErrorCode::kUndefinedMetric, r.path + ": test clip without ground truth");
    }
    if (r.condition == Condition::kAnomaly) {
      ++c.anomalies;
    } else if (r.domain == Domain::kSource) {
      ++c.normals_source;
    } else if (r.domain == Domain::kTarget) {
      ++c.normals_target;
    } else {
      fail(ErrorCode::kUndefinedMetric, r.path + ": normal test clip without a domain");
    }
  }
  for (const auto& [key, c] : counts) {
    if (c.normals_source == 0 || c.normals_target == 0 || c.anomalies == 0) {
      fail(ErrorCode::kUndefinedMetric,
           key.first + "/section_" + key.second + " lacks normals in a domain or anomalies");
    }
  }
  return counts;
}

}  // namespace asd
