// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "asd/core/error.hpp"

namespace asd {
namespace {

void check_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::kUndefinedMetric, "non-finite anomaly score");
  }
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

std::string section_id(const std::string& machine, const std::string& section) {
  return machine + "/section_" + section;
}

}  // namespace

PairCount count_wins(std::span<const double> normals, std::span<const double> anomalies) {
  check_finite(normals);
  check_finite(anomalies);
  std::vector<double> sorted(normals.begin(), normals.end());
  std::sort(sorted.begin(), sorted.end());
  PairCount count;
  count.pairs = static_cast<std::uint64_t>(normals.size()) * anomalies.size();
  for (double a : anomalies) {
    // Normals strictly below a; equal scores contribute H(0) = 0.
    count.wins += static_cast<std::uint64_t>(
        std::lower_bound(sorted.begin(), sorted.end(), a) - sorted.begin());
  }
  return count;
}

std::size_t top_normal_count(double max_fpr, std::size_t num_normals) {
  if (!(max_fpr > 0.0 && max_fpr <= 1.0)) {
    fail(ErrorCode::kConfig, "max false-positive rate p must be in (0, 1]");
  }
  return static_cast<std::size_t>(std::floor(max_fpr * static_cast<double>(num_normals) + 1e-9));
}

double auc(std::span<const double> normals, std::span<const double> anomalies) {
  if (normals.empty() || anomalies.empty()) {
    fail(ErrorCode::kUndefinedMetric, "AUC needs at least one normal and one anomalous score");
  }
  return count_wins(normals, anomalies).ratio();
}

double pauc(std::span<const double> normals, std::span<const double> anomalies, double max_fpr) {
  const std::size_t keep = top_normal_count(max_fpr, normals.size());
  if (keep == 0 || anomalies.empty()) {
    fail(ErrorCode::kUndefinedMetric, "floor(p * N-) = " + std::to_string(keep) + " normals and " +
                                          std::to_string(anomalies.size()) +
                                          " anomalies; pAUC undefined");
  }
  std::vector<double> top(normals.begin(), normals.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(keep), top.end(),
                    std::greater<>());
  top.resize(keep);
  return count_wins(top, anomalies).ratio();
}

double auc_domain(const ScoredTestSet& scored, const std::string& machine,
                  const std::string& section, Domain domain) {
  std::vector<double> normals, anomalies;
  for (const auto& c : scored) {
    if (c.machine_type != machine || c.section != section) continue;
    if (c.condition == Condition::kAnomaly) {
      anomalies.push_back(c.score);
    } else if (c.condition == Condition::kNormal && c.domain == domain) {
      normals.push_back(c.score);
    }
  }
  if (normals.empty() || anomalies.empty()) {
    fail(ErrorCode::kUndefinedMetric, section_id(machine, section) + ": no " +
                                          (normals.empty() ? std::string("normal ") + to_string(domain)
                                                           : std::string("anomalous")) +
                                          " test clips");
  }
  return count_wins(normals, anomalies).ratio();
}

double pauc_section(const ScoredTestSet& scored, const std::string& machine,
                    const std::string& section, double max_fpr) {
  std::vector<const ScoredClip*> normals;
  std::vector<double> anomalies;
  for (const auto& c : scored) {
    if (c.machine_type != machine || c.section != section) continue;
    if (c.condition == Condition::kAnomaly) anomalies.push_back(c.score);
    if (c.condition == Condition::kNormal) normals.push_back(&c);
  }
  const std::size_t keep = top_normal_count(max_fpr, normals.size());
  if (keep == 0 || anomalies.empty()) {
    fail(ErrorCode::kUndefinedMetric,
         section_id(machine, section) + ": floor(p * N-) = " + std::to_string(keep) +
             " normals and " + std::to_string(anomalies.size()) + " anomalies; pAUC undefined");
  }
  std::sort(normals.begin(), normals.end(), [](const ScoredClip* a, const ScoredClip* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->path < b->path;
  });
  std::vector<double> top;
  top.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) top.push_back(normals[i]->score);
  return count_wins(top, anomalies).ratio();
}

OfficialScore official_score(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kUndefinedMetric, "official score over an empty set");
  OfficialScore out;
  out.count = values.size();
  double inv_sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorCode::kUndefinedMetric, "metric value outside [0, 1] in official score");
    }
    if (v == 0.0) {
      out.zero_flag = true;
      out.value = 0.0;
      return out;
    }
    inv_sum += 1.0 / v;
  }
  out.value = static_cast<double>(values.size()) / inv_sum;
  return out;
}

ReferenceTable load_reference_table(const std::filesystem::path& path, const std::string& mode) {
  const CsvTable csv = read_csv(path, true);
  const int c_machine = csv.column("machine_type");
  const int c_mode = csv.column("mode");
  const int c_src = csv.column("auc_source");
  const int c_tgt = csv.column("auc_target");
  const int c_pauc = csv.column("pauc");
  if (c_machine < 0 || c_mode < 0 || c_src < 0 || c_tgt < 0 || c_pauc < 0) {
    fail(ErrorCode::kFormat,
         path.string() + ": reference table needs machine_type,mode,auc_source,auc_target,pauc");
  }
  ReferenceTable table;
  for (const auto& row : csv.rows) {
    const auto width = static_cast<int>(row.size());
    if (width <= std::max({c_machine, c_mode, c_src, c_tgt, c_pauc})) {
      fail(ErrorCode::kFormat, path.string() + ": short reference row");
    }
    if (trim(row[static_cast<std::size_t>(c_mode)]) != mode) continue;
    ReferenceRow ref;
    ref.auc_source = parse_double(row[static_cast<std::size_t>(c_src)], "auc_source") / 100.0;
    ref.auc_target = parse_double(row[static_cast<std::size_t>(c_tgt)], "auc_target") / 100.0;
    ref.pauc = parse_double(row[static_cast<std::size_t>(c_pauc)], "pauc") / 100.0;
    table[trim(row[static_cast<std::size_t>(c_machine)])] = ref;
  }
  return table;
}

MetricsReport build_report(const ScoredTestSet& scored, std::optional<std::uint64_t> macs,
                           const ReferenceTable* reference, double max_fpr) {
  MetricsReport report;
  report.macs_per_vector = macs;

  std::set<std::pair<std::string, std::string>> sections;
  for (const auto& c : scored) sections.insert({c.machine_type, c.section});

  std::vector<double> values;
  bool all_ok = true;
  for (const auto& [machine, section] : sections) {
    ReportRow row;
    row.machine_type = machine;
    row.section = section;
    try {
      row.auc_source = auc_domain(scored, machine, section, Domain::kSource);
      row.auc_target = auc_domain(scored, machine, section, Domain::kTarget);
      row.pauc = pauc_section(scored, machine, section, max_fpr);
    } catch (const Error& e) {
      report.problems.push_back(e.what());
      all_ok = false;
      continue;
    }
    if (reference) {
      if (const auto it = reference->find(machine); it != reference->end()) {
        row.reference = it->second;
      }
    }
    values.insert(values.end(), {row.auc_source, row.auc_target, row.pauc});
    report.rows.push_back(std::move(row));
  }
  if (!values.empty()) report.official = official_score(values);
  report.complete = all_ok && !report.rows.empty();
  return report;
}

std::string MetricsReport::to_csv() const {
  const bool with_ref = std::any_of(rows.begin(), rows.end(),
                                    [](const ReportRow& r) { return r.reference.has_value(); });
  CsvRow header{"machine_type", "section", "auc_source", "auc_target", "pauc"};
  if (with_ref) {
    for (const char* h : {"ref_auc_source", "ref_auc_target", "ref_pauc", "diff_auc_source",
                          "diff_auc_target", "diff_pauc"}) {
      header.emplace_back(h);
    }
  }
  std::string out = format_csv_line(header) + "\n";
  for (const auto& r : rows) {
    CsvRow line{r.machine_type, r.section, percent(r.auc_source), percent(r.auc_target),
                percent(r.pauc)};
    if (with_ref) {
      if (r.reference) {
        const auto& ref = *r.reference;
        for (double v : {ref.auc_source, ref.auc_target, ref.pauc, r.auc_source - ref.auc_source,
                         r.auc_target - ref.auc_target, r.pauc - ref.pauc}) {
          line.push_back(percent(v));
        }
      } else {
        line.resize(line.size() + 6);
      }
    }
    out += format_csv_line(line) + "\n";
  }
  return out;
}

std::string MetricsReport::to_table() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-16s %-7s %10s %10s %10s\n", "machine_type", "section",
                "AUC src %", "AUC tgt %", "pAUC %");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-16s %-7s %10s %10s %10s", r.machine_type.c_str(),
                  r.section.c_str(), percent(r.auc_source).c_str(),
                  percent(r.auc_target).c_str(), percent(r.pauc).c_str());
    out += buf;
    if (r.reference) {
      std::snprintf(buf, sizeof(buf), "   (ref %s / %s / %s)",
                    percent(r.reference->auc_source).c_str(),
                    percent(r.reference->auc_target).c_str(), percent(r.reference->pauc).c_str());
      out += buf;
    }
    out += '\n';
  }
  std::snprintf(buf, sizeof(buf), "official score (harmonic mean of %zu values): %s %%%s\n",
                official.count, percent(official.value).c_str(),
                official.zero_flag ? "  [a constituent is 0]" : "");
  out += buf;
  if (macs_per_vector) {
    out += "MACs per input vector: " + std::to_string(*macs_per_vector) + "\n";
  }
  if (!complete) out += "report incomplete\n";
  for (const auto& p : problems) out += "  problem: " + p + "\n";
  return out;
}

std::string MetricsReport::summary_text() const {
  KeyValueFile kv;
  kv.set("official_score", format_double(official.value));
  kv.set("official_score_zero_flag", official.zero_flag ? "true" : "false");
  kv.set("official_score_count", std::to_string(official.count));
  kv.set("rows", std::to_string(rows.size()));
  kv.set("complete", complete ? "true" : "false");
  if (macs_per_vector) kv.set("macs_per_vector", std::to_string(*macs_per_vector));
  return kv.to_string();
}

}  // namespace asd
