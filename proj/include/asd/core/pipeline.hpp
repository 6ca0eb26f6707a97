// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end steps behind the command-line tool: train a machine's model and
// scoring artifacts, score its test clips, and evaluate a score file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asd/core/dataset.hpp"
#include "asd/core/dsp.hpp"
#include "asd/core/metrics.hpp"
#include "asd/core/model.hpp"
#include "asd/core/scoring.hpp"

namespace asd {

struct RunConfig {
  FeatureConfig features;
  std::vector<int> layer_dims = default_layer_dims();
  TrainConfig train;
  ScoreMode mode = ScoreMode::kMse;
  double ridge = kDefaultRidge;
  double threshold_percentile = kDefaultThresholdPercentile;

  /// kConfig unless D = frames_per_vector * mel_bands equals the model's
  /// input dim and every part validates.
  void validate() const;

  static RunConfig from_keyvalue(const KeyValueFile& file);
  static RunConfig load(const std::filesystem::path& path);
  KeyValueFile to_keyvalue() const;
};

/// File names inside a training output directory.
struct ArtifactNames {
  static constexpr const char* kModel = "model.bin";
  static constexpr const char* kCovariances = "covariances.bin";
  static constexpr const char* kThresholds = "thresholds.txt";
  static constexpr const char* kLoss = "loss.csv";
  static constexpr const char* kConfig = "config.txt";
};

/// Feature matrices of a set of clips, concatenated column-wise, with the
/// column range of every clip.
struct ClipFeatures {
  FeatureMatrix matrix;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;  // (first column, count)
};

ClipFeatures extract_clips(FeatureExtractor& extractor, const std::filesystem::path& root,
                           const std::vector<const ClipRecord*>& clips);

/// K = T - P + 1 for a clip of `num_samples`.
int vectors_per_clip(std::size_t num_samples, const FeatureConfig& features);

struct TrainSummary {
  std::size_t source_clips = 0;
  std::size_t target_clips = 0;
  std::size_t vectors = 0;
  std::vector<double> loss_history;
  Threshold mse_threshold;
  std::optional<Threshold> mahalanobis_threshold;
  bool covariances_written = false;
  std::vector<std::string> warnings;
};

/// Trains on the machine's train split and writes model, covariances,
/// thresholds, loss history and the resolved config into `out_dir`.
/// kNoData when the machine has no training clips.
TrainSummary train_machine(const RunConfig& config, const std::filesystem::path& data_root,
                           const std::string& machine, const std::filesystem::path& out_dir,
                           const NamingConfig& naming = {});

struct ScoreRequest {
  std::filesystem::path model_path;
  std::optional<std::filesystem::path> covariance_path;  // default: beside the model
  std::optional<RunConfig> config;                       // default: config.txt beside the model
  std::filesystem::path data_root;
  std::string machine;
  ScoreMode mode = ScoreMode::kMse;
  std::optional<double> threshold;  // default: thresholds.txt beside the model
  std::filesystem::path out_csv;
  Split split = Split::kTest;
};

struct ScoreRow {
  std::string path;
  std::optional<double> score;  // empty for clips that failed to load
  std::string decision;         // "normal", "anomaly", "n/a" or "error"
};

struct ScoreSummary {
  std::vector<ScoreRow> rows;
  std::vector<std::string> warnings;
  std::size_t errors = 0;
};

/// Score CSV: header "path,score,decision"; failed clips have an empty score
/// and decision "error".
ScoreSummary score_machine(const ScoreRequest& request, const NamingConfig& naming = {});

std::string scores_to_csv(const std::vector<ScoreRow>& rows);
std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path);

struct EvaluateRequest {
  std::filesystem::path scores_csv;
  std::filesystem::path truth_manifest;
  std::optional<std::filesystem::path> reference_table;
  std::string reference_mode = "mse";
  std::optional<std::uint64_t> macs_per_vector;
  double max_fpr = kDefaultMaxFpr;
};

struct EvaluateResult {
  MetricsReport report;
  std::size_t skipped_error_rows = 0;
};

/// Joins scores with ground truth and builds the report. kMismatch, listing
/// the paths, when any scored clip is missing from the truth manifest.
EvaluateResult evaluate_scores(const EvaluateRequest& request);

/// Writes <out>.csv rows, <out minus extension>.txt table and
/// <out minus extension>.summary.txt.
void write_report(const MetricsReport& report, const std::filesystem::path& out_csv);

}  // namespace asd
