// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/pipeline.hpp"

#include "asd/core/synth.hpp"
#include "support.hpp"

using namespace asd;
using asd::test::error_code_of;

namespace {

// Small and fast: 32 mel bands, P = 2, 1 s clips.
RunConfig tiny_config() {
  RunConfig c;
  c.features.mel_bands = 32;
  c.features.frames_per_vector = 2;
  c.layer_dims = {64, 16, 4, 16, 64};
  c.train.epochs = 3;
  c.train.batch_size = 64;
  c.train.seed = 5;
  return c;
}

SynthSpec tiny_spec() {
  SynthSpec s;
  s.duration_s = 1.0;
  s.source_train = 10;
  s.target_train = 2;
  s.test_normal = 6;
  s.test_anomaly = 6;
  return s;
}

}  // namespace

TEST_CASE("run config validation and round trip") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.layer_dims.front() == 640);
  c.layer_dims = {320, 8, 320};
  CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::kConfig);

  const RunConfig t = tiny_config();
  const RunConfig back = RunConfig::from_keyvalue(t.to_keyvalue());
  CHECK(back.to_keyvalue().values() == t.to_keyvalue().values());

  // Changing the feature size without dims derives the default shape.
  const auto kv = KeyValueFile::parse("mel_bands = 64\n");
  CHECK(RunConfig::from_keyvalue(kv).layer_dims.front() == 320);
  CHECK(error_code_of([] { RunConfig::load("/nonexistent.cfg"); }) == ErrorCode::kConfig);
}

TEST_CASE("vectors per clip") {
  FeatureConfig f;
  CHECK(vectors_per_clip(160000, f) == 307);
  CHECK(vectors_per_clip(32000, f) == 57);
  CHECK(error_code_of([&] { vectors_per_clip(2048, f); }) == ErrorCode::kTooShort);
}

TEST_CASE("train, score and evaluate a synthetic machine") {
  asd::test::TempDir dir;
  synth_generate(tiny_spec(), 2, dir / "data");
  const auto summary = train_machine(tiny_config(), dir / "data", "synth_machine", dir / "model");
  CHECK(summary.source_clips == 10);
  CHECK(summary.target_clips == 2);
  CHECK(summary.loss_history.size() == 3);
  CHECK(summary.covariances_written);
  for (const char* f : {ArtifactNames::kModel, ArtifactNames::kCovariances, ArtifactNames::kThresholds,
                        ArtifactNames::kLoss, ArtifactNames::kConfig}) {
    CHECK(std::filesystem::exists(dir / "model" / f));
  }

  ScoreRequest req;
  req.model_path = dir / "model" / ArtifactNames::kModel;
  req.data_root = dir / "data";
  req.machine = "synth_machine";
  req.out_csv = dir / "mse.csv";
  const auto mse = score_machine(req);
  CHECK(mse.rows.size() == 12);
  CHECK(mse.errors == 0);
  CHECK(std::filesystem::exists(dir / "mse.config.txt"));
  for (const auto& r : mse.rows) CHECK((r.decision == "normal" || r.decision == "anomaly"));

  // Identity covariances reproduce the mse column.
  save_covariances(DomainCovariances::identity(64), dir / "identity.bin");
  req.mode = ScoreMode::kMahalanobis;
  req.covariance_path = dir / "identity.bin";
  req.out_csv = dir / "id.csv";
  const auto id = score_machine(req);
  for (std::size_t i = 0; i < id.rows.size(); ++i) {
    CHECK(std::abs(*id.rows[i].score - *mse.rows[i].score) <= 1e-6 * *mse.rows[i].score);
  }

  EvaluateRequest ev;
  ev.scores_csv = dir / "mse.csv";
  ev.truth_manifest = dir / "data" / "manifest.csv";
  ev.max_fpr = 0.5;
  const auto result = evaluate_scores(ev);
  CHECK(result.report.rows.size() == 1);
  CHECK(result.report.complete);
  write_report(result.report, dir / "report.csv");
  CHECK(std::filesystem::exists(dir / "report.txt"));
  CHECK(std::filesystem::exists(dir / "report.summary.txt"));
}

TEST_CASE("pipeline error paths") {
  asd::test::TempDir dir;
  synth_generate(tiny_spec(), 4, dir / "data");
  CHECK(error_code_of([&] { train_machine(tiny_config(), dir / "data", "nope", dir / "m"); }) ==
        ErrorCode::kNoData);

  train_machine(tiny_config(), dir / "data", "synth_machine", dir / "m");
  ScoreRequest req;
  req.model_path = dir / "m" / ArtifactNames::kModel;
  req.data_root = dir / "data";
  req.machine = "synth_machine";
  req.mode = ScoreMode::kMahalanobis;
  req.covariance_path = dir / "missing.bin";
  req.out_csv = dir / "s.csv";
  CHECK(error_code_of([&] { score_machine(req); }) == ErrorCode::kMissingArtifact);

  // An unreadable clip becomes an error row, not a failure.
  req.mode = ScoreMode::kMse;
  req.covariance_path.reset();
  const auto manifest = read_manifest(dir / "data" / "manifest.csv");
  const auto test_clips = manifest.select("synth_machine", Split::kTest);
  asd::test::spit(dir / "data" / test_clips.front()->path, std::string("garbage"));
  const auto s = score_machine(req);
  CHECK(s.errors == 1);
  CHECK(s.rows.front().decision == "error");
  CHECK_FALSE(s.rows.front().score.has_value());

  // Scores for a clip that is not in the truth manifest.
  asd::test::spit(dir / "extra.csv", std::string("path,score,decision\nghost.wav,0.5,normal\n"));
  EvaluateRequest ev;
  ev.scores_csv = dir / "extra.csv";
  ev.truth_manifest = dir / "data" / "manifest.csv";
  CHECK(error_code_of([&] { evaluate_scores(ev); }) == ErrorCode::kMismatch);
}
