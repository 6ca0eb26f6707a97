// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/asd.h"

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <new>
#include <string>

#include "asd/core/dataset.hpp"
#include "asd/core/error.hpp"
#include "asd/core/metrics.hpp"
#include "asd/core/model.hpp"
#include "asd/core/pipeline.hpp"
#include "asd/core/synth.hpp"

struct asd_config {
  asd::KeyValueFile overrides;
  asd::RunConfig resolved;
};

struct asd_model {
  asd::AeModel model;
};

struct asd_report {
  asd::EvaluateResult result;
  std::string csv;
  std::string table;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(asd::ErrorCode::kIo) == ASD_ERR_IO);
static_assert(static_cast<int>(asd::ErrorCode::kMismatch) == ASD_ERR_MISMATCH);
static_assert(static_cast<int>(asd::ErrorCode::kConfig) == ASD_ERR_CONFIG);

asd_status to_status(asd::ErrorCode code) {
  return static_cast<asd_status>(static_cast<int>(code));
}

asd_status set_error(asd_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
asd_status guarded(F&& body) {
  try {
    body();
    return ASD_OK;
  } catch (const asd::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ASD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ASD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(ASD_ERR_INTERNAL, "unknown error");
  }
}

#define ASD_REQUIRE(cond, what)                                          \
  do {                                                                   \
    if (!(cond)) return set_error(ASD_ERR_INVALID_ARGUMENT, what);       \
  } while (0)

std::vector<int> copy_dims(const int* dims, std::size_t n) { return {dims, dims + n}; }

}  // namespace

extern "C" {

const char* asd_version(void) { return "1.0.0"; }

const char* asd_status_string(asd_status status) {
  switch (status) {
    case ASD_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case ASD_ERR_INTERNAL:
      return "internal error";
    default:
      break;
  }
  if (status < ASD_OK || status > ASD_ERR_IO) return "unknown status";
  return asd::to_string(static_cast<asd::ErrorCode>(status));
}

const char* asd_last_error(void) { return g_last_error.c_str(); }

asd_status asd_config_default(asd_config** out) {
  ASD_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new asd_config{}; });
}

asd_status asd_config_load(const char* path, asd_config** out) {
  ASD_REQUIRE(path && out, "path and out are required");
  return guarded([&] {
    auto cfg = std::make_unique<asd_config>();
    cfg->resolved = asd::RunConfig::load(path);
    cfg->overrides = asd::KeyValueFile::load(path);
    *out = cfg.release();
  });
}

asd_status asd_config_set(asd_config* config, const char* key, const char* value) {
  ASD_REQUIRE(config && key && value, "config, key and value are required");
  return guarded([&] {
    const auto known = asd::RunConfig{}.to_keyvalue();
    if (!known.has(key)) asd::fail(asd::ErrorCode::kConfig, std::string("unknown config key '") + key + "'");
    asd::KeyValueFile next = config->overrides;
    next.set(key, value);
    config->resolved = asd::as_config_error([&] { return asd::RunConfig::from_keyvalue(next); });
    config->overrides = std::move(next);
  });
}

asd_status asd_config_write(const asd_config* config, const char* path) {
  ASD_REQUIRE(config && path, "config and path are required");
  return guarded([&] { asd::write_file_atomic(path, config->resolved.to_keyvalue().to_string()); });
}

void asd_config_free(asd_config* config) { delete config; }

asd_status asd_config_vectors_per_clip(const asd_config* config, size_t num_samples,
                                       size_t* vectors) {
  ASD_REQUIRE(config && vectors, "config and vectors are required");
  return guarded([&] {
    *vectors = static_cast<size_t>(asd::vectors_per_clip(num_samples, config->resolved.features));
  });
}

asd_status asd_model_create(const int* dims, size_t num_dims, uint64_t seed, asd_model** out) {
  ASD_REQUIRE(dims && out, "dims and out are required");
  return guarded([&] {
    *out = new asd_model{asd::AeModel::initialized(copy_dims(dims, num_dims), seed)};
  });
}

asd_status asd_model_load(const char* path, asd_model** out) {
  ASD_REQUIRE(path && out, "path and out are required");
  return guarded([&] { *out = new asd_model{asd::load_model(path)}; });
}

asd_status asd_model_save(const asd_model* model, const char* path) {
  ASD_REQUIRE(model && path, "model and path are required");
  return guarded([&] { asd::save_model(model->model, path); });
}

void asd_model_free(asd_model* model) { delete model; }

asd_status asd_model_dims(const asd_model* model, int* dims, size_t capacity, size_t* count) {
  ASD_REQUIRE(model && count, "model and count are required");
  ASD_REQUIRE(dims || capacity == 0, "dims is NULL with nonzero capacity");
  const std::vector<int> widths = model->model.dims();
  *count = widths.size();
  for (std::size_t i = 0; i < widths.size() && i < capacity; ++i) dims[i] = widths[i];
  return ASD_OK;
}

asd_status asd_model_macs(const asd_model* model, uint64_t* macs) {
  ASD_REQUIRE(model && macs, "model and macs are required");
  *macs = asd::count_macs(model->model);
  return ASD_OK;
}

asd_status asd_model_forward(const asd_model* model, const float* in, size_t batch, float* out) {
  ASD_REQUIRE(model && in && out, "model, in and out are required");
  return guarded([&] {
    const Eigen::Index dim = model->model.input_dim();
    const Eigen::Index cols = static_cast<Eigen::Index>(batch);
    const Eigen::Map<const Eigen::MatrixXf> x(in, dim, cols);
    Eigen::Map<Eigen::MatrixXf> y(out, dim, cols);
    y = model->model.forward(x);
  });
}

asd_status asd_macs_for_dims(const int* dims, size_t num_dims, uint64_t* macs) {
  ASD_REQUIRE(dims && macs, "dims and macs are required");
  return guarded([&] {
    const auto d = copy_dims(dims, num_dims);
    asd::validate_layer_dims(d);
    *macs = asd::count_macs(d);
  });
}

asd_status asd_write_identity_covariances(int dim, const char* path) {
  ASD_REQUIRE(dim > 0 && path, "positive dim and a path are required");
  return guarded([&] { asd::save_covariances(asd::DomainCovariances::identity(dim), path); });
}

asd_status asd_synth_generate(const char* spec_path, uint64_t seed, const char* out_dir,
                              size_t* num_clips) {
  ASD_REQUIRE(out_dir, "out_dir is required");
  return guarded([&] {
    const asd::SynthSpec spec = spec_path ? asd::SynthSpec::load(spec_path) : asd::SynthSpec{};
    const auto manifest = asd::synth_generate(spec, seed, out_dir);
    if (num_clips) *num_clips = manifest.records.size();
  });
}

asd_status asd_scan_dataset(const char* root, const char* manifest_out, size_t* num_clips,
                            size_t* num_skipped) {
  ASD_REQUIRE(root, "root is required");
  return guarded([&] {
    auto scan = asd::scan_dataset(root);
    const auto merged = asd::merge_attribute_files(scan.manifest, root);
    for (const auto& w : merged.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& s : scan.skipped) std::cerr << "skipped: " << s.path << ": " << s.reason << "\n";
    if (manifest_out) asd::write_manifest(scan.manifest, manifest_out);
    if (num_clips) *num_clips = scan.manifest.records.size();
    if (num_skipped) *num_skipped = scan.skipped.size();
  });
}

asd_status asd_train_machine(const asd_config* config, const char* data_root, const char* machine,
                             const char* out_dir, asd_train_info* info) {
  ASD_REQUIRE(config && data_root && machine && out_dir,
              "config, data_root, machine and out_dir are required");
  return guarded([&] {
    const auto summary = asd::train_machine(config->resolved, data_root, machine, out_dir);
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
    if (!info) return;
    info->source_clips = summary.source_clips;
    info->target_clips = summary.target_clips;
    info->vectors = summary.vectors;
    info->epochs = summary.loss_history.size();
    info->final_loss = summary.loss_history.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                    : summary.loss_history.back();
    info->mse_threshold = summary.mse_threshold.value;
    info->mahala_threshold = summary.mahalanobis_threshold
                                 ? summary.mahalanobis_threshold->value
                                 : std::numeric_limits<double>::quiet_NaN();
    info->covariances_written = summary.covariances_written ? 1 : 0;
  });
}

asd_status asd_score_machine(const asd_score_request* request, size_t* num_scored,
                             size_t* num_errors) {
  ASD_REQUIRE(request, "request is NULL");
  ASD_REQUIRE(request->model_path && request->data_root && request->machine && request->out_csv,
              "model_path, data_root, machine and out_csv are required");
  return guarded([&] {
    asd::ScoreRequest req;
    req.model_path = request->model_path;
    if (request->covariance_path) req.covariance_path = request->covariance_path;
    req.data_root = request->data_root;
    req.machine = request->machine;
    req.mode = asd::parse_score_mode(request->mode ? request->mode : "mse");
    if (request->has_threshold) req.threshold = request->threshold;
    req.out_csv = request->out_csv;
    const auto summary = asd::score_machine(req);
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
    if (num_scored) *num_scored = summary.rows.size() - summary.errors;
    if (num_errors) *num_errors = summary.errors;
  });
}

asd_status asd_evaluate(const char* scores_csv, const char* truth_manifest,
                        const char* reference_csv, const char* reference_mode,
                        uint64_t macs_per_vector, asd_report** out) {
  ASD_REQUIRE(scores_csv && truth_manifest && out, "scores_csv, truth_manifest and out are required");
  return guarded([&] {
    asd::EvaluateRequest req;
    req.scores_csv = scores_csv;
    req.truth_manifest = truth_manifest;
    if (reference_csv) req.reference_table = reference_csv;
    if (reference_mode) req.reference_mode = reference_mode;
    if (macs_per_vector) req.macs_per_vector = macs_per_vector;
    auto report = std::make_unique<asd_report>();
    report->result = asd::evaluate_scores(req);
    report->csv = report->result.report.to_csv();
    report->table = report->result.report.to_table();
    report->summary = report->result.report.summary_text();
    *out = report.release();
  });
}

double asd_report_official(const asd_report* report) {
  return report ? report->result.report.official.value : std::numeric_limits<double>::quiet_NaN();
}

int asd_report_zero_flag(const asd_report* report) {
  return report && report->result.report.official.zero_flag ? 1 : 0;
}

int asd_report_complete(const asd_report* report) {
  return report && report->result.report.complete ? 1 : 0;
}

size_t asd_report_skipped_rows(const asd_report* report) {
  return report ? report->result.skipped_error_rows : 0;
}

const char* asd_report_csv(const asd_report* report) { return report ? report->csv.c_str() : ""; }
const char* asd_report_table(const asd_report* report) {
  return report ? report->table.c_str() : "";
}
const char* asd_report_summary(const asd_report* report) {
  return report ? report->summary.c_str() : "";
}

asd_status asd_report_write(const asd_report* report, const char* out_csv) {
  ASD_REQUIRE(report && out_csv, "report and out_csv are required");
  return guarded([&] { asd::write_report(report->result.report, out_csv); });
}

void asd_report_free(asd_report* report) { delete report; }

asd_status asd_auc(const double* normals, size_t num_normals, const double* anomalies,
                   size_t num_anomalies, double* out) {
  ASD_REQUIRE(out && (normals || !num_normals) && (anomalies || !num_anomalies),
              "null score array");
  return guarded([&] {
    *out = asd::auc({normals, num_normals}, {anomalies, num_anomalies});
  });
}

asd_status asd_pauc(const double* normals, size_t num_normals, const double* anomalies,
                    size_t num_anomalies, double max_fpr, double* out) {
  ASD_REQUIRE(out && (normals || !num_normals) && (anomalies || !num_anomalies),
              "null score array");
  return guarded([&] {
    *out = asd::pauc({normals, num_normals}, {anomalies, num_anomalies}, max_fpr);
  });
}

asd_status asd_harmonic_mean(const double* values, size_t count, double* out, int* zero_flag) {
  ASD_REQUIRE(out && (values || !count), "null value array");
  return guarded([&] {
    const auto score = asd::official_score({values, count});
    *out = score.value;
    if (zero_flag) *zero_flag = score.zero_flag ? 1 : 0;
  });
}

}  // extern "C"
