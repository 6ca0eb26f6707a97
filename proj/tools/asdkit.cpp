// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// asdkit: generate or scan data, train, score, evaluate and count MACs.
//
// Exit codes: 0 ok, 1 internal, 2 config/usage, 3 data, 4 artifact,
// 5 scored clips missing from the truth manifest.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asd/asd.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitData = 3, kExitArtifact = 4,
            kExitMismatch = 5 };

int exit_code(asd_status s) {
  switch (s) {
    case ASD_OK:
      return kExitOk;
    case ASD_ERR_CONFIG:
    case ASD_ERR_INVALID_ARGUMENT:
      return kExitConfig;
    case ASD_ERR_FORMAT:
    case ASD_ERR_UNSUPPORTED_CHANNELS:
    case ASD_ERR_EMPTY_AUDIO:
    case ASD_ERR_TOO_SHORT:
    case ASD_ERR_EMPTY_MANIFEST:
    case ASD_ERR_DUPLICATE:
    case ASD_ERR_NO_DATA:
    case ASD_ERR_INSUFFICIENT_DATA:
    case ASD_ERR_UNDEFINED_METRIC:
    case ASD_ERR_IO:
      return kExitData;
    case ASD_ERR_DIMENSION_MISMATCH:
    case ASD_ERR_ARTIFACT_FORMAT:
    case ASD_ERR_VERSION_MISMATCH:
    case ASD_ERR_CORRUPT_ARTIFACT:
    case ASD_ERR_MISSING_ARTIFACT:
      return kExitArtifact;
    case ASD_ERR_MISMATCH:
      return kExitMismatch;
    default:
      return kExitInternal;
  }
}

int report(asd_status s) {
  if (s == ASD_OK) return kExitOk;
  std::fprintf(stderr, "asdkit: %s: %s\n", asd_status_string(s), asd_last_error());
  return exit_code(s);
}

// Owns a config handle: --config file (or defaults) plus --set overrides.
struct ConfigHandle {
  asd_config* ptr = nullptr;
  ~ConfigHandle() { asd_config_free(ptr); }
};

asd_status resolve_config(const std::string& path, const std::vector<std::string>& sets,
                          std::optional<std::uint64_t> seed, ConfigHandle& out) {
  asd_status s = path.empty() ? asd_config_default(&out.ptr) : asd_config_load(path.c_str(), &out.ptr);
  if (s != ASD_OK) return s;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "asdkit: --set expects key=value, got '%s'\n", kv.c_str());
      return ASD_ERR_CONFIG;
    }
    s = asd_config_set(out.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != ASD_OK) return s;
  }
  if (seed) {
    s = asd_config_set(out.ptr, "seed", std::to_string(*seed).c_str());
    if (s != ASD_OK) return s;
  }
  return ASD_OK;
}

struct SynthArgs {
  std::string spec;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
  size_t clips = 0;
  const asd_status s = asd_synth_generate(a.spec.empty() ? nullptr : a.spec.c_str(), a.seed,
                                          a.out.c_str(), &clips);
  if (s == ASD_OK) std::printf("wrote %zu clips to %s\n", clips, a.out.c_str());
  return report(s);
}

struct ScanArgs {
  std::string data_root;
  std::string out;
};

int cmd_scan(const ScanArgs& a) {
  size_t clips = 0, skipped = 0;
  const asd_status s = asd_scan_dataset(a.data_root.c_str(), a.out.empty() ? nullptr : a.out.c_str(),
                                        &clips, &skipped);
  if (s == ASD_OK) std::printf("clips: %zu\nskipped: %zu\n", clips, skipped);
  return report(s);
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string data_root;
  std::string machine;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  ConfigHandle cfg;
  asd_status s = resolve_config(a.config, a.sets, a.seed, cfg);
  if (s != ASD_OK) return report(s);
  asd_train_info info{};
  s = asd_train_machine(cfg.ptr, a.data_root.c_str(), a.machine.c_str(), a.out.c_str(), &info);
  if (s != ASD_OK) return report(s);
  std::printf("machine: %s\n", a.machine.c_str());
  std::printf("train clips: %zu source, %zu target (%zu vectors)\n", info.source_clips,
              info.target_clips, info.vectors);
  std::printf("epochs: %zu, final loss %.6g\n", info.epochs, info.final_loss);
  std::printf("threshold mse: %.6g\n", info.mse_threshold);
  if (info.covariances_written) std::printf("threshold mahala: %.6g\n", info.mahala_threshold);
  std::printf("artifacts: %s\n", a.out.c_str());
  return kExitOk;
}

struct ScoreArgs {
  std::string model;
  std::string cov;
  std::string data_root;
  std::string machine;
  std::string mode = "mse";
  std::optional<double> threshold;
  std::string out;
};

int cmd_score(const ScoreArgs& a) {
  asd_score_request req{};
  req.model_path = a.model.c_str();
  req.covariance_path = a.cov.empty() ? nullptr : a.cov.c_str();
  req.data_root = a.data_root.c_str();
  req.machine = a.machine.c_str();
  req.mode = a.mode.c_str();
  req.has_threshold = a.threshold ? 1 : 0;
  req.threshold = a.threshold.value_or(0.0);
  req.out_csv = a.out.c_str();
  size_t scored = 0, errors = 0;
  const asd_status s = asd_score_machine(&req, &scored, &errors);
  if (s != ASD_OK) return report(s);
  std::printf("scored: %zu\nerrors: %zu\nout: %s\n", scored, errors, a.out.c_str());
  if (errors) std::fprintf(stderr, "asdkit: warning: %zu clip(s) could not be scored\n", errors);
  return kExitOk;
}

struct EvaluateArgs {
  std::string scores;
  std::string truth;
  std::string reference;
  std::string mode = "mse";
  std::string model;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  std::uint64_t macs = 0;
  if (!a.model.empty()) {
    asd_model* model = nullptr;
    asd_status s = asd_model_load(a.model.c_str(), &model);
    if (s == ASD_OK) s = asd_model_macs(model, &macs);
    asd_model_free(model);
    if (s != ASD_OK) return report(s);
  }
  asd_report* rep = nullptr;
  asd_status s = asd_evaluate(a.scores.c_str(), a.truth.c_str(),
                              a.reference.empty() ? nullptr : a.reference.c_str(), a.mode.c_str(),
                              macs, &rep);
  if (s != ASD_OK) return report(s);
  if (!a.out.empty()) s = asd_report_write(rep, a.out.c_str());
  if (s == ASD_OK) {
    std::fputs(asd_report_table(rep), stdout);
    if (asd_report_skipped_rows(rep)) {
      std::fprintf(stderr, "asdkit: warning: %zu score row(s) without a score were skipped\n",
                   asd_report_skipped_rows(rep));
    }
    std::printf("official_score=%.17g\n", asd_report_official(rep));
  }
  asd_report_free(rep);
  return report(s);
}

struct MacsArgs {
  std::string model;
  std::string config;
  double clip_seconds = 10.0;
  int sample_rate = 16000;
};

int cmd_macs(const MacsArgs& a) {
  asd_model* model = nullptr;
  asd_status s = asd_model_load(a.model.c_str(), &model);
  std::uint64_t per_vector = 0;
  std::vector<int> dims;
  if (s == ASD_OK) s = asd_model_macs(model, &per_vector);
  if (s == ASD_OK) {
    size_t n = 0;
    asd_model_dims(model, nullptr, 0, &n);
    dims.resize(n);
    asd_model_dims(model, dims.data(), n, &n);
  }
  asd_model_free(model);
  if (s != ASD_OK) return report(s);

  std::string config = a.config;
  const fs::path beside = fs::path(a.model).parent_path() / "config.txt";
  if (config.empty() && fs::exists(beside)) config = beside.string();
  ConfigHandle cfg;
  s = resolve_config(config, {}, std::nullopt, cfg);
  if (s != ASD_OK) return report(s);
  const auto samples = static_cast<size_t>(std::llround(a.clip_seconds * a.sample_rate));
  size_t vectors = 0;
  s = asd_config_vectors_per_clip(cfg.ptr, samples, &vectors);
  if (s != ASD_OK) return report(s);

  std::string layers;
  for (int d : dims) layers += (layers.empty() ? "" : ",") + std::to_string(d);
  std::printf("layers: %s\n", layers.c_str());
  std::printf("macs_per_vector: %llu\n", static_cast<unsigned long long>(per_vector));
  std::printf("clip: %g s at %d Hz, %zu vectors\n", a.clip_seconds, a.sample_rate, vectors);
  std::printf("macs_per_clip: %llu\n",
              static_cast<unsigned long long>(per_vector) * static_cast<unsigned long long>(vectors));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asdkit: autoencoder anomalous sound detection baseline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", asd_version());

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  c_synth->add_option("--spec", synth.spec, "Synthetic dataset spec file (defaults if omitted)");
  c_synth->add_option("--seed", synth.seed, "Generator seed");
  c_synth->add_option("--out", synth.out, "Output directory")->required();

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("scan", "Scan a dataset tree into a manifest CSV");
  c_scan->add_option("--data-root", scan.data_root, "Dataset root")->required();
  c_scan->add_option("--out", scan.out, "Manifest CSV to write");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a machine's model and scoring artifacts");
  c_train->add_option("--config", train.config, "Run config file");
  c_train->add_option("--set", train.sets, "Override a config key (key=value)");
  c_train->add_option("--seed", train.seed, "Training seed");
  c_train->add_option("--data-root", train.data_root, "Dataset root")->required();
  c_train->add_option("--machine", train.machine, "Machine type")->required();
  c_train->add_option("--out", train.out, "Output directory")->required();

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score a machine's test clips");
  c_score->add_option("--model", score.model, "model.bin from train")->required();
  c_score->add_option("--cov", score.cov, "Covariance file (default: beside the model)");
  c_score->add_option("--data-root", score.data_root, "Dataset root")->required();
  c_score->add_option("--machine", score.machine, "Machine type")->required();
  c_score->add_option("--mode", score.mode, "Scoring mode")
      ->check(CLI::IsMember({"mse", "mahala", "mahalanobis"}));
  c_score->add_option("--threshold", score.threshold, "Decision threshold (default: from train)");
  c_score->add_option("--out", score.out, "Score CSV to write")->required();

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "Compute AUC, pAUC and the official score");
  c_eval->add_option("--scores", eval.scores, "Score CSV")->required();
  c_eval->add_option("--truth", eval.truth, "Ground-truth manifest CSV")->required();
  c_eval->add_option("--reference", eval.reference, "Reference table CSV");
  c_eval->add_option("--mode", eval.mode, "Reference rows to compare against")
      ->check(CLI::IsMember({"mse", "mahala"}));
  c_eval->add_option("--model", eval.model, "Model file, to report MACs");
  c_eval->add_option("--out", eval.out, "Report CSV to write");

  MacsArgs macs;
  auto* c_macs = app.add_subcommand("macs", "Count multiply-accumulates of a model");
  c_macs->add_option("--model", macs.model, "model.bin")->required();
  c_macs->add_option("--config", macs.config, "Run config (default: beside the model)");
  c_macs->add_option("--clip-seconds", macs.clip_seconds, "Clip length for per-clip MACs")
      ->check(CLI::PositiveNumber);
  c_macs->add_option("--sample-rate", macs.sample_rate, "Sample rate for per-clip MACs")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*c_synth) return cmd_synth(synth);
  if (*c_scan) return cmd_scan(scan);
  if (*c_train) return cmd_train(train);
  if (*c_score) return cmd_score(score);
  if (*c_eval) return cmd_evaluate(eval);
  if (*c_macs) return cmd_macs(macs);
  return kExitConfig;
}
