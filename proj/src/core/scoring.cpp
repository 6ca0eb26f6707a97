// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/scoring.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <tuple>

#include "asd/core/binary_io.hpp"
#include "asd/core/error.hpp"

namespace asd {

const char* to_string(ScoreMode mode) {
  return mode == ScoreMode::kMse ? "mse" : "mahala";
}

ScoreMode parse_score_mode(const std::string& text) {
  if (text == "mse") return ScoreMode::kMse;
  if (text == "mahala" || text == "mahalanobis") return ScoreMode::kMahalanobis;
  fail(ErrorCode::kConfig, "unknown scoring mode '" + text + "' (expected mse or mahala)");
}

const char* to_string(Decision decision) {
  return decision == Decision::kAnomaly ? "anomaly" : "normal";
}

DomainCovariances DomainCovariances::identity(int dim) {
  DomainCovariances cov;
  cov.inv_source = Eigen::MatrixXd::Identity(dim, dim);
  cov.inv_target = cov.inv_source;
  return cov;
}

Eigen::MatrixXd residuals(const AeModel& model, const Eigen::Ref<const Eigen::MatrixXf>& features) {
  if (features.cols() == 0) fail(ErrorCode::kInsufficientData, "clip has no feature vectors");
  return (features - model.forward(features)).cast<double>();
}

double mse_score_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& residuals) {
  if (residuals.size() == 0) fail(ErrorCode::kInsufficientData, "empty residual set");
  return residuals.squaredNorm() / static_cast<double>(residuals.size());
}

namespace {

void check_inverse(const Eigen::Ref<const Eigen::MatrixXd>& inv, Eigen::Index dim) {
  if (inv.rows() != dim || inv.cols() != dim) {
    fail(ErrorCode::kDimensionMismatch,
         "inverse covariance is " + std::to_string(inv.rows()) + "x" + std::to_string(inv.cols()) +
             ", residual dim is " + std::to_string(dim));
  }
}

/// Per-column e' A e, floored at zero.
Eigen::VectorXd quadratic_forms(const Eigen::Ref<const Eigen::MatrixXd>& residuals,
                                const Eigen::Ref<const Eigen::MatrixXd>& inv_cov) {
  const Eigen::MatrixXd projected = inv_cov * residuals;
  return projected.cwiseProduct(residuals).colwise().sum().transpose().cwiseMax(0.0);
}

}  // namespace

double single_domain_score_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& residuals,
                                          const Eigen::Ref<const Eigen::MatrixXd>& inv_cov) {
  if (residuals.size() == 0) fail(ErrorCode::kInsufficientData, "empty residual set");
  check_inverse(inv_cov, residuals.rows());
  return quadratic_forms(residuals, inv_cov).sum() / static_cast<double>(residuals.size());
}

double mahalanobis_score_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& residuals,
                                        const DomainCovariances& cov) {
  if (residuals.size() == 0) fail(ErrorCode::kInsufficientData, "empty residual set");
  check_inverse(cov.inv_source, residuals.rows());
  check_inverse(cov.inv_target, residuals.rows());
  const Eigen::VectorXd source = quadratic_forms(residuals, cov.inv_source);
  const Eigen::VectorXd target = quadratic_forms(residuals, cov.inv_target);
  return source.cwiseMin(target).sum() / static_cast<double>(residuals.size());
}

AnomalyScore score_mse(const AeModel& model, const Eigen::Ref<const Eigen::MatrixXf>& features,
                       std::string clip_id) {
  return {mse_score_from_residuals(residuals(model, features)), std::move(clip_id),
          ScoreMode::kMse};
}

AnomalyScore score_mahalanobis(const AeModel& model,
                               const Eigen::Ref<const Eigen::MatrixXf>& features,
                               const DomainCovariances& cov, std::string clip_id) {
  if (cov.dim() != model.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "covariances fitted for D=" + std::to_string(cov.dim()) +
                                            ", model has D=" +
                                            std::to_string(model.input_dim()));
  }
  return {mahalanobis_score_from_residuals(residuals(model, features), cov), std::move(clip_id),
          ScoreMode::kMahalanobis};
}

CovarianceAccumulator::CovarianceAccumulator(Eigen::Index dim)
    : mean_(Eigen::VectorXd::Zero(dim)), scatter_(Eigen::MatrixXd::Zero(dim, dim)) {}

void CovarianceAccumulator::add(const Eigen::Ref<const Eigen::MatrixXd>& samples) {
  if (samples.rows() != mean_.size()) {
    fail(ErrorCode::kDimensionMismatch, "covariance chunk has the wrong dimension");
  }
  const Eigen::Index n_b = samples.cols();
  if (n_b == 0) return;
  const Eigen::VectorXd mean_b = samples.rowwise().mean();
  const Eigen::MatrixXd centred = samples.colwise() - mean_b;
  scatter_.selfadjointView<Eigen::Lower>().rankUpdate(centred);
  if (count_ > 0) {
    const Eigen::VectorXd delta = mean_b - mean_;
    const double n_a = static_cast<double>(count_);
    const double n = n_a + static_cast<double>(n_b);
    scatter_.selfadjointView<Eigen::Lower>().rankUpdate(delta, n_a * static_cast<double>(n_b) / n);
    mean_ += delta * (static_cast<double>(n_b) / n);
  } else {
    mean_ = mean_b;
  }
  count_ += n_b;
}

Eigen::MatrixXd CovarianceAccumulator::covariance() const {
  if (count_ < 2) {
    fail(ErrorCode::kInsufficientData, "covariance needs at least 2 vectors, got " +
                                           std::to_string(count_));
  }
  Eigen::MatrixXd cov = scatter_.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(count_ - 1);
}

Eigen::MatrixXd sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& samples) {
  CovarianceAccumulator acc(samples.rows());
  acc.add(samples);
  return acc.covariance();
}

Eigen::MatrixXd regularized_inverse(Eigen::MatrixXd cov, double ridge) {
  if (!(ridge > 0.0)) fail(ErrorCode::kConfig, "ridge must be > 0");
  const double mean_var = cov.trace() / static_cast<double>(cov.rows());
  const double scale = mean_var > 0.0 ? mean_var : 1.0;
  cov.diagonal().array() += ridge * scale;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) {
    fail(ErrorCode::kNumerical, "covariance factorisation failed");
  }
  Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  inv = 0.5 * (inv + inv.transpose()).eval();
  if (!inv.allFinite()) fail(ErrorCode::kNumerical, "inverse covariance is not finite");
  return inv;
}

Eigen::MatrixXd regularized_inverse_covariance(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                               double ridge) {
  return regularized_inverse(sample_covariance(samples), ridge);
}

DomainCovariances fit_covariances_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& source,
                                                 const Eigen::Ref<const Eigen::MatrixXd>& target,
                                                 double ridge) {
  if (source.rows() != target.rows()) {
    fail(ErrorCode::kDimensionMismatch, "source and target residual dims differ");
  }
  if (source.cols() < 2 || target.cols() < 2) {
    fail(ErrorCode::kInsufficientData,
         "each domain needs at least 2 residual vectors (source " +
             std::to_string(source.cols()) + ", target " + std::to_string(target.cols()) + ")");
  }
  DomainCovariances cov;
  cov.inv_source = regularized_inverse_covariance(source, ridge);
  cov.inv_target = regularized_inverse_covariance(target, ridge);
  cov.ridge = ridge;
  cov.source_count = static_cast<std::uint64_t>(source.cols());
  cov.target_count = static_cast<std::uint64_t>(target.cols());
  return cov;
}

DomainCovariances fit_covariances(const AeModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXf>& source_features,
                                  const Eigen::Ref<const Eigen::MatrixXf>& target_features,
                                  double ridge) {
  if (source_features.cols() < 2 || target_features.cols() < 2) {
    fail(ErrorCode::kInsufficientData,
         "each domain needs at least 2 feature vectors (source " +
             std::to_string(source_features.cols()) + ", target " +
             std::to_string(target_features.cols()) + ")");
  }
  constexpr Eigen::Index kChunk = 4096;
  auto fit = [&](const Eigen::Ref<const Eigen::MatrixXf>& feats) {
    CovarianceAccumulator acc(feats.rows());
    for (Eigen::Index start = 0; start < feats.cols(); start += kChunk) {
      const Eigen::Index len = std::min(kChunk, feats.cols() - start);
      acc.add(residuals(model, feats.middleCols(start, len)));
    }
    return std::pair{regularized_inverse(acc.covariance(), ridge), acc.count()};
  };
  DomainCovariances cov;
  std::tie(cov.inv_source, cov.source_count) = fit(source_features);
  std::tie(cov.inv_target, cov.target_count) = fit(target_features);
  cov.ridge = ridge;
  return cov;
}

namespace {

constexpr std::string_view kCovMagic{"ASDCOV\0\1", 8};

void put_matrix(BinaryWriter& w, const Eigen::MatrixXd& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  w.bytes(rm.data(), sizeof(double) * static_cast<std::size_t>(rm.size()));
}

Eigen::MatrixXd get_matrix(BinaryReader& r, Eigen::Index dim) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(dim, dim);
  r.bytes(rm.data(), sizeof(double) * static_cast<std::size_t>(rm.size()));
  return rm;
}

}  // namespace

std::vector<std::uint8_t> serialize_covariances(const DomainCovariances& cov) {
  BinaryWriter w;
  w.bytes(kCovMagic.data(), kCovMagic.size());
  w.put<std::uint32_t>(kCovarianceFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cov.dim()));
  w.put<double>(cov.ridge);
  w.put<std::uint64_t>(cov.source_count);
  w.put<std::uint64_t>(cov.target_count);
  put_matrix(w, cov.inv_source);
  put_matrix(w, cov.inv_target);
  w.append_checksum();
  return w.buffer();
}

DomainCovariances deserialize_covariances(const std::vector<std::uint8_t>& bytes,
                                          const std::string& origin) {
  BinaryReader r(bytes, origin);
  r.expect_magic(kCovMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kCovarianceFormatVersion) {
    fail(ErrorCode::kVersionMismatch, origin + ": covariance format version " +
                                          std::to_string(version));
  }
  const auto dim = r.get<std::uint32_t>();
  if (dim == 0 || dim > (1u << 14)) fail(ErrorCode::kCorruptArtifact, origin + ": bad dimension");
  DomainCovariances cov;
  cov.ridge = r.get<double>();
  cov.source_count = r.get<std::uint64_t>();
  cov.target_count = r.get<std::uint64_t>();
  cov.inv_source = get_matrix(r, dim);
  cov.inv_target = get_matrix(r, dim);
  r.verify_checksum();
  return cov;
}

void save_covariances(const DomainCovariances& cov, const std::filesystem::path& path) {
  write_binary_file_atomic(path, serialize_covariances(cov));
}

DomainCovariances load_covariances(const std::filesystem::path& path) {
  return deserialize_covariances(read_binary_file(path), path.string());
}

Threshold fit_threshold(std::span<const double> scores, double percentile) {
  if (scores.empty()) fail(ErrorCode::kInsufficientData, "threshold needs at least one score");
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    fail(ErrorCode::kConfig, "percentile must be in (0, 100]");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  for (double s : sorted) {
    if (!std::isfinite(s)) fail(ErrorCode::kNumerical, "non-finite score in threshold fit");
  }
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * percentile / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  Threshold t;
  t.percentile = percentile;
  t.value = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  return t;
}

}  // namespace asd
