// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/pipeline.hpp"

#include <map>

#include "asd/core/error.hpp"

namespace fs = std::filesystem;

namespace asd {

void RunConfig::validate() const {
  features.validate();
  validate_layer_dims(layer_dims);
  train.validate();
  if (layer_dims.front() != features.vector_dim()) {
    fail(ErrorCode::kConfig, "model input dim " + std::to_string(layer_dims.front()) +
                                 " != frames_per_vector * mel_bands = " +
                                 std::to_string(features.vector_dim()));
  }
  if (!(ridge > 0.0)) fail(ErrorCode::kConfig, "ridge must be > 0");
  if (!(threshold_percentile > 0.0 && threshold_percentile <= 100.0)) {
    fail(ErrorCode::kConfig, "threshold_percentile must be in (0, 100]");
  }
}

RunConfig RunConfig::from_keyvalue(const KeyValueFile& f) {
  RunConfig c;
  auto get_int = [&](const char* key, int fallback) {
    return static_cast<int>(f.get_int(key, fallback));
  };
  c.features.mel_bands = get_int("mel_bands", c.features.mel_bands);
  c.features.fft_size = get_int("fft_size", c.features.fft_size);
  c.features.hop_size = get_int("hop_size", c.features.hop_size);
  c.features.frames_per_vector = get_int("frames_per_vector", c.features.frames_per_vector);
  c.features.log_floor = f.get_double("log_floor", c.features.log_floor);
  c.features.fmin_hz = f.get_double("fmin_hz", c.features.fmin_hz);
  c.features.fmax_hz = f.get_double("fmax_hz", c.features.fmax_hz);
  if (f.has("layer_dims")) {
    c.layer_dims.clear();
    for (auto d : parse_int_list(f.get("layer_dims"))) c.layer_dims.push_back(static_cast<int>(d));
  } else {
    c.layer_dims = default_layer_dims(c.features.vector_dim());
  }
  c.train.epochs = get_int("epochs", c.train.epochs);
  c.train.batch_size = get_int("batch_size", c.train.batch_size);
  c.train.learning_rate = f.get_double("learning_rate", c.train.learning_rate);
  c.train.beta1 = f.get_double("beta1", c.train.beta1);
  c.train.beta2 = f.get_double("beta2", c.train.beta2);
  c.train.adam_epsilon = f.get_double("adam_epsilon", c.train.adam_epsilon);
  c.train.seed = static_cast<std::uint64_t>(f.get_int("seed", 0));
  c.mode = parse_score_mode(f.get_or("mode", to_string(c.mode)));
  c.ridge = f.get_double("ridge", c.ridge);
  c.threshold_percentile = f.get_double("threshold_percentile", c.threshold_percentile);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) fail(ErrorCode::kConfig, "config not found: " + path.string());
  return as_config_error([&] { return from_keyvalue(KeyValueFile::load(path)); });
}

KeyValueFile RunConfig::to_keyvalue() const {
  KeyValueFile f;
  f.set("mel_bands", std::to_string(features.mel_bands));
  f.set("fft_size", std::to_string(features.fft_size));
  f.set("hop_size", std::to_string(features.hop_size));
  f.set("frames_per_vector", std::to_string(features.frames_per_vector));
  f.set("log_floor", format_double(features.log_floor));
  f.set("fmin_hz", format_double(features.fmin_hz));
  f.set("fmax_hz", format_double(features.fmax_hz));
  std::string dims;
  for (int d : layer_dims) dims += (dims.empty() ? "" : ",") + std::to_string(d);
  f.set("layer_dims", dims);
  f.set("epochs", std::to_string(train.epochs));
  f.set("batch_size", std::to_string(train.batch_size));
  f.set("learning_rate", format_double(train.learning_rate));
  f.set("beta1", format_double(train.beta1));
  f.set("beta2", format_double(train.beta2));
  f.set("adam_epsilon", format_double(train.adam_epsilon));
  f.set("seed", std::to_string(train.seed));
  f.set("mode", to_string(mode));
  f.set("ridge", format_double(ridge));
  f.set("threshold_percentile", format_double(threshold_percentile));
  return f;
}

int vectors_per_clip(std::size_t num_samples, const FeatureConfig& features) {
  const int frames = frame_count(num_samples, features.fft_size, features.hop_size);
  if (frames < features.frames_per_vector) {
    fail(ErrorCode::kTooShort, "clip yields fewer frames than frames_per_vector");
  }
  return frames - features.frames_per_vector + 1;
}

ClipFeatures extract_clips(FeatureExtractor& extractor, const fs::path& root,
                           const std::vector<const ClipRecord*>& clips) {
  std::vector<FeatureMatrix> parts;
  parts.reserve(clips.size());
  Eigen::Index total = 0;
  for (const ClipRecord* rec : clips) {
    parts.push_back(extractor.features(read_wav(root / rec->path)));
    total += parts.back().cols();
  }
  ClipFeatures out;
  out.matrix.resize(extractor.config().vector_dim(), total);
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    out.matrix.middleCols(col, p.cols()) = p;
    out.spans.emplace_back(col, p.cols());
    col += p.cols();
  }
  return out;
}

namespace {

FeatureExtractor extractor_for(const RunConfig& config, const fs::path& root,
                               const ClipRecord& first) {
  const AudioClip probe = read_wav(root / first.path);
  return FeatureExtractor(config.features, probe.sample_rate_hz);
}

DatasetManifest scan_for_machine(const fs::path& root, const std::string& machine,
                                 const NamingConfig& naming) {
  DatasetManifest manifest = scan_dataset(root, naming).manifest;
  if (!manifest.machine_types().count(machine)) {
    fail(ErrorCode::kNoData, "machine type '" + machine + "' not found under " + root.string());
  }
  return manifest;
}

std::vector<double> clip_scores(const AeModel& model, const ClipFeatures& clips,
                                const DomainCovariances* cov) {
  std::vector<double> scores;
  for (const auto& [start, count] : clips.spans) {
    const auto block = clips.matrix.middleCols(start, count);
    scores.push_back(cov ? score_mahalanobis(model, block, *cov).value
                         : score_mse(model, block).value);
  }
  return scores;
}

}  // namespace

TrainSummary train_machine(const RunConfig& config, const fs::path& data_root,
                           const std::string& machine, const fs::path& out_dir,
                           const NamingConfig& naming) {
  config.validate();
  const DatasetManifest manifest = scan_for_machine(data_root, machine, naming);
  const auto train_records = manifest.select(machine, Split::kTrain);
  if (train_records.empty()) {
    fail(ErrorCode::kNoData, "machine type '" + machine + "' has no training clips");
  }

  TrainSummary summary;
  std::vector<const ClipRecord*> source, target;
  for (const ClipRecord* r : train_records) {
    if (r->domain == Domain::kTarget) {
      target.push_back(r);
    } else {
      if (r->domain == Domain::kUnknown) {
        summary.warnings.push_back(r->path + ": training clip without domain, treated as source");
      }
      source.push_back(r);
    }
  }
  summary.source_clips = source.size();
  summary.target_clips = target.size();

  FeatureExtractor extractor = extractor_for(config, data_root, *train_records.front());
  const ClipFeatures source_feats = extract_clips(extractor, data_root, source);
  const ClipFeatures target_feats = extract_clips(extractor, data_root, target);
  FeatureMatrix all(source_feats.matrix.rows(),
                    source_feats.matrix.cols() + target_feats.matrix.cols());
  all << source_feats.matrix, target_feats.matrix;
  summary.vectors = static_cast<std::size_t>(all.cols());

  AeModel model = AeModel::initialized(config.layer_dims, config.train.seed);
  summary.loss_history = train(model, all, config.train).loss_history;

  fs::create_directories(out_dir);
  save_model(model, out_dir / ArtifactNames::kModel);

  std::string loss_csv = "epoch,loss\n";
  for (std::size_t e = 0; e < summary.loss_history.size(); ++e) {
    loss_csv += std::to_string(e + 1) + "," + format_double(summary.loss_history[e]) + "\n";
  }
  write_file_atomic(out_dir / ArtifactNames::kLoss, loss_csv);

  std::optional<DomainCovariances> cov;
  try {
    cov = fit_covariances(model, source_feats.matrix, target_feats.matrix, config.ridge);
    save_covariances(*cov, out_dir / ArtifactNames::kCovariances);
    summary.covariances_written = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
    summary.warnings.push_back(std::string("covariances not fitted: ") + e.what());
  }

  std::vector<double> mse = clip_scores(model, source_feats, nullptr);
  const auto mse_target = clip_scores(model, target_feats, nullptr);
  mse.insert(mse.end(), mse_target.begin(), mse_target.end());
  summary.mse_threshold = fit_threshold(mse, config.threshold_percentile);

  KeyValueFile thresholds;
  thresholds.set("percentile", format_double(config.threshold_percentile));
  thresholds.set("fitted_on", "train");
  thresholds.set("mse", format_double(summary.mse_threshold.value));
  if (cov) {
    std::vector<double> maha = clip_scores(model, source_feats, &*cov);
    const auto maha_target = clip_scores(model, target_feats, &*cov);
    maha.insert(maha.end(), maha_target.begin(), maha_target.end());
    summary.mahalanobis_threshold = fit_threshold(maha, config.threshold_percentile);
    thresholds.set("mahala", format_double(summary.mahalanobis_threshold->value));
  }
  write_file_atomic(out_dir / ArtifactNames::kThresholds, thresholds.to_string());

  KeyValueFile echo = config.to_keyvalue();
  echo.set("machine", machine);
  echo.set("data_root", data_root.string());
  write_file_atomic(out_dir / ArtifactNames::kConfig, echo.to_string());
  return summary;
}

std::string scores_to_csv(const std::vector<ScoreRow>& rows) {
  std::string out = "path,score,decision\n";
  for (const auto& r : rows) {
    out += format_csv_line({r.path, r.score ? format_double(*r.score) : "", r.decision}) + "\n";
  }
  return out;
}

std::vector<ScoreRow> read_scores_csv(const fs::path& path) {
  const CsvTable csv = read_csv(path, true);
  const int c_path = csv.column("path");
  const int c_score = csv.column("score");
  const int c_decision = csv.column("decision");
  if (c_path < 0 || c_score < 0) fail(ErrorCode::kFormat, path.string() + ": needs path,score");
  std::vector<ScoreRow> rows;
  for (const auto& row : csv.rows) {
    if (static_cast<int>(row.size()) <= std::max(c_path, c_score)) {
      fail(ErrorCode::kFormat, path.string() + ": short score row");
    }
    ScoreRow r;
    r.path = row[static_cast<std::size_t>(c_path)];
    if (c_decision >= 0 && static_cast<int>(row.size()) > c_decision) {
      r.decision = row[static_cast<std::size_t>(c_decision)];
    }
    const std::string score = trim(row[static_cast<std::size_t>(c_score)]);
    if (!score.empty()) r.score = parse_double(score, "score of " + r.path);
    rows.push_back(std::move(r));
  }
  return rows;
}

ScoreSummary score_machine(const ScoreRequest& req, const NamingConfig& naming) {
  const fs::path model_dir = req.model_path.parent_path();
  RunConfig config;
  if (req.config) {
    config = *req.config;
  } else if (fs::exists(model_dir / ArtifactNames::kConfig)) {
    config = RunConfig::load(model_dir / ArtifactNames::kConfig);
  }
  const AeModel model = load_model(req.model_path);
  if (model.input_dim() != config.features.vector_dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "model input dim " + std::to_string(model.input_dim()) +
             " does not match the feature config (" + std::to_string(config.features.vector_dim()) +
             ")");
  }

  std::optional<DomainCovariances> cov;
  if (req.mode == ScoreMode::kMahalanobis) {
    const fs::path cov_path = req.covariance_path.value_or(model_dir / ArtifactNames::kCovariances);
    if (!fs::exists(cov_path)) {
      fail(ErrorCode::kMissingArtifact, "covariance file not found: " + cov_path.string());
    }
    cov = load_covariances(cov_path);
    if (cov->dim() != model.input_dim()) {
      fail(ErrorCode::kDimensionMismatch, "covariance dim does not match the model");
    }
  }

  ScoreSummary summary;
  std::optional<double> cutoff = req.threshold;
  if (!cutoff && fs::exists(model_dir / ArtifactNames::kThresholds)) {
    const auto thresholds = KeyValueFile::load(model_dir / ArtifactNames::kThresholds);
    if (thresholds.has(to_string(req.mode))) {
      cutoff = parse_double(thresholds.get(to_string(req.mode)), "threshold");
    }
  }
  if (!cutoff) summary.warnings.push_back("no threshold available; decisions reported as n/a");

  const DatasetManifest manifest = scan_for_machine(req.data_root, req.machine, naming);
  const auto clips = manifest.select(req.machine, req.split);
  if (clips.empty()) {
    fail(ErrorCode::kNoData, "machine type '" + req.machine + "' has no " +
                                 to_string(req.split) + " clips");
  }

  std::optional<FeatureExtractor> extractor;
  for (const ClipRecord* rec : clips) {
    ScoreRow row;
    row.path = rec->path;
    try {
      const AudioClip clip = read_wav(req.data_root / rec->path);
      if (!extractor || extractor->sample_rate_hz() != clip.sample_rate_hz) {
        extractor.emplace(config.features, clip.sample_rate_hz);
      }
      const FeatureMatrix feats = extractor->features(clip);
      const double value = cov ? score_mahalanobis(model, feats, *cov).value
                                : score_mse(model, feats).value;
      row.score = value;
      row.decision = cutoff ? to_string(decide(value, *cutoff)) : "n/a";
    } catch (const Error& e) {
      row.decision = "error";
      summary.warnings.push_back(rec->path + ": " + e.what());
      ++summary.errors;
    }
    summary.rows.push_back(std::move(row));
  }

  write_file_atomic(req.out_csv, scores_to_csv(summary.rows));
  KeyValueFile echo = config.to_keyvalue();
  echo.set("mode", to_string(req.mode));
  echo.set("model", req.model_path.string());
  echo.set("machine", req.machine);
  echo.set("data_root", req.data_root.string());
  if (cutoff) echo.set("threshold", format_double(*cutoff));
  fs::path echo_path = req.out_csv;
  echo_path.replace_extension(".config.txt");
  write_file_atomic(echo_path, echo.to_string());
  return summary;
}

EvaluateResult evaluate_scores(const EvaluateRequest& req) {
  const auto rows = read_scores_csv(req.scores_csv);
  const DatasetManifest truth = read_manifest(req.truth_manifest);
  std::map<std::string, const ClipRecord*> by_path;
  for (const auto& r : truth.records) by_path[r.path] = &r;

  EvaluateResult result;
  ScoredTestSet scored;
  std::vector<std::string> unmatched;
  for (const auto& row : rows) {
    if (!row.score || row.decision == "error") {
      ++result.skipped_error_rows;
      continue;
    }
    const auto it = by_path.find(row.path);
    if (it == by_path.end()) {
      unmatched.push_back(row.path);
      continue;
    }
    const ClipRecord& rec = *it->second;
    scored.push_back({rec.path, rec.machine_type, rec.section, rec.domain, rec.condition,
                      *row.score});
  }
  if (!unmatched.empty()) {
    std::string msg = std::to_string(unmatched.size()) + " scored clip(s) missing from " +
                      req.truth_manifest.string() + ":";
    for (const auto& p : unmatched) msg += "\n  " + p;
    fail(ErrorCode::kMismatch, msg);
  }

  std::optional<ReferenceTable> reference;
  if (req.reference_table) reference = load_reference_table(*req.reference_table, req.reference_mode);
  result.report = build_report(scored, req.macs_per_vector, reference ? &*reference : nullptr,
                               req.max_fpr);
  return result;
}

void write_report(const MetricsReport& report, const fs::path& out_csv) {
  write_file_atomic(out_csv, report.to_csv());
  fs::path table = out_csv;
  table.replace_extension(".txt");
  write_file_atomic(table, report.to_table());
  fs::path summary = out_csv;
  summary.replace_extension(".summary.txt");
  write_file_atomic(summary, report.summary_text());
}

}  // namespace asd
