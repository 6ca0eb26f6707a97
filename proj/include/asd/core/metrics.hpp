// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Evaluation protocol: per-domain AUC, per-section pAUC and the official
// harmonic-mean score.
//
// Pair counting uses H(y) = 1 iff y > 0, so ties between a normal and an
// anomalous score count as misses. AUC for domain d compares normals of d
// against every anomaly of the section (both domains). pAUC pools the
// section's normals, keeps the floor(p * N) highest-scoring ones (ties broken
// by clip path ascending) and normalises by floor(p * N) * N+.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asd/core/dataset.hpp"

namespace asd {

inline constexpr double kDefaultMaxFpr = 0.1;

struct ScoredClip {
  std::string path;
  std::string machine_type;
  std::string section = "00";
  Domain domain = Domain::kUnknown;
  Condition condition = Condition::kUnknown;
  double score = 0.0;
};

using ScoredTestSet = std::vector<ScoredClip>;

/// Exact count of (normal, anomaly) pairs with anomaly > normal.
struct PairCount {
  std::uint64_t wins = 0;
  std::uint64_t pairs = 0;

  double ratio() const { return static_cast<double>(wins) / static_cast<double>(pairs); }
  bool operator==(const PairCount&) const = default;
};

/// Sort + binary-search counter, O((N- + N+) log N-).
PairCount count_wins(std::span<const double> normals, std::span<const double> anomalies);

/// floor(p * n) with a small guard against representation error (0.3 * 10).
std::size_t top_normal_count(double max_fpr, std::size_t num_normals);

double auc(std::span<const double> normals, std::span<const double> anomalies);

/// Partial AUC over the floor(p * N-) highest-scoring normals.
double pauc(std::span<const double> normals, std::span<const double> anomalies,
            double max_fpr = kDefaultMaxFpr);

double auc_domain(const ScoredTestSet& scored, const std::string& machine,
                  const std::string& section, Domain domain);
double pauc_section(const ScoredTestSet& scored, const std::string& machine,
                    const std::string& section, double max_fpr = kDefaultMaxFpr);

struct OfficialScore {
  double value = 0.0;
  bool zero_flag = false;  // some constituent was 0, so the harmonic mean is 0
  std::size_t count = 0;
};

/// Harmonic mean n / sum(1/v). kUndefinedMetric for an empty set or values
/// outside [0, 1].
OfficialScore official_score(std::span<const double> values);

struct ReferenceRow {
  double auc_source = 0.0;  // fractions in [0, 1]
  double auc_target = 0.0;
  double pauc = 0.0;
};

/// Keyed by machine type; loaded for one scoring mode.
using ReferenceTable = std::map<std::string, ReferenceRow>;

/// CSV columns: machine_type,mode,auc_source,auc_target,pauc[,...] with
/// percentages; rows whose mode differs from `mode` are skipped.
ReferenceTable load_reference_table(const std::filesystem::path& path, const std::string& mode);

struct ReportRow {
  std::string machine_type;
  std::string section;
  double auc_source = 0.0;
  double auc_target = 0.0;
  double pauc = 0.0;
  std::optional<ReferenceRow> reference;
};

struct MetricsReport {
  std::vector<ReportRow> rows;  // sorted by machine type, then section
  OfficialScore official;
  std::optional<std::uint64_t> macs_per_vector;
  bool complete = false;
  std::vector<std::string> problems;  // per-section metric failures

  /// Percentages with two decimals.
  std::string to_csv() const;
  std::string to_table() const;
  std::string summary_text() const;
};

MetricsReport build_report(const ScoredTestSet& scored,
                           std::optional<std::uint64_t> macs_per_vector = std::nullopt,
                           const ReferenceTable* reference = nullptr,
                           double max_fpr = kDefaultMaxFpr);

}  // namespace asd
