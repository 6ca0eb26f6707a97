// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Clip-level anomaly scores in the two baseline modes.
//
// Both modes average a per-frame quadratic form over the K stacked vectors of
// a clip and divide by D:
//   mse:          (1/(D*K)) sum_k ||e_k||^2
//   mahalanobis:  (1/(D*K)) sum_k min(e_k' S_s^-1 e_k, e_k' S_t^-1 e_k)
// with residual e_k = x_k - r(x_k). The Mahalanobis form is the squared
// one (no square root), so identity inverse covariances reproduce mse.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asd/core/model.hpp"

namespace asd {

enum class ScoreMode { kMse, kMahalanobis };

const char* to_string(ScoreMode mode);
/// Accepts "mse", "mahala" and "mahalanobis".
ScoreMode parse_score_mode(const std::string& text);

struct AnomalyScore {
  double value = 0.0;
  std::string clip_id;
  ScoreMode mode = ScoreMode::kMse;
};

struct DomainCovariances {
  Eigen::MatrixXd inv_source;
  Eigen::MatrixXd inv_target;
  double ridge = 0.0;
  std::uint64_t source_count = 0;
  std::uint64_t target_count = 0;

  int dim() const { return static_cast<int>(inv_source.rows()); }

  static DomainCovariances identity(int dim);
};

inline constexpr double kDefaultRidge = 1e-3;
inline constexpr double kDefaultThresholdPercentile = 90.0;

/// x - r(x), promoted to double. (D x K)
Eigen::MatrixXd residuals(const AeModel& model, const Eigen::Ref<const Eigen::MatrixXf>& features);

double mse_score_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& residuals);
double mahalanobis_score_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& residuals,
                                        const DomainCovariances& cov);
/// Score against a single inverse covariance (no min-selection).
double single_domain_score_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& residuals,
                                          const Eigen::Ref<const Eigen::MatrixXd>& inv_cov);

AnomalyScore score_mse(const AeModel& model, const Eigen::Ref<const Eigen::MatrixXf>& features,
                       std::string clip_id = {});
AnomalyScore score_mahalanobis(const AeModel& model,
                               const Eigen::Ref<const Eigen::MatrixXf>& features,
                               const DomainCovariances& cov, std::string clip_id = {});

/// Mean-centred covariance with divisor N-1 over the columns of `samples`.
Eigen::MatrixXd sample_covariance(const Eigen::Ref<const Eigen::MatrixXd>& samples);

/// Streaming covariance: chunks are merged with the pairwise update
/// M2 = M2_a + M2_b + (n_a n_b / n) d d', d = mean_b - mean_a. Chunks are
/// combined in the order they are added.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(Eigen::Index dim);

  void add(const Eigen::Ref<const Eigen::MatrixXd>& samples);
  Eigen::Index count() const { return count_; }
  /// Divisor N-1; kInsufficientData below two samples.
  Eigen::MatrixXd covariance() const;

 private:
  Eigen::Index count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scatter_;  // lower triangle maintained
};

/// (cov + ridge * s * I)^-1, s = tr(cov)/D or 1 when the trace is zero.
Eigen::MatrixXd regularized_inverse(Eigen::MatrixXd cov, double ridge);

/// (S + ridge * s * I)^-1 where s = tr(S)/D, or 1 when tr(S) == 0. The result
/// is symmetrised. kInsufficientData for fewer than two columns.
Eigen::MatrixXd regularized_inverse_covariance(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                               double ridge);

/// Fits both domains from training residuals (columns of all clips of a
/// domain concatenated).
DomainCovariances fit_covariances_from_residuals(const Eigen::Ref<const Eigen::MatrixXd>& source,
                                                 const Eigen::Ref<const Eigen::MatrixXd>& target,
                                                 double ridge = kDefaultRidge);
DomainCovariances fit_covariances(const AeModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXf>& source_features,
                                  const Eigen::Ref<const Eigen::MatrixXf>& target_features,
                                  double ridge = kDefaultRidge);

// Covariance file, little-endian:
//   char[8] magic "ASDCOV\0\1", u32 version (1), u32 D, f64 ridge,
//   u64 source_count, u64 target_count,
//   f64[D*D] inv_source (row-major), f64[D*D] inv_target (row-major),
//   u64 FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kCovarianceFormatVersion = 1;

std::vector<std::uint8_t> serialize_covariances(const DomainCovariances& cov);
DomainCovariances deserialize_covariances(const std::vector<std::uint8_t>& bytes,
                                          const std::string& origin);
void save_covariances(const DomainCovariances& cov, const std::filesystem::path& path);
DomainCovariances load_covariances(const std::filesystem::path& path);

struct Threshold {
  double value = 0.0;
  double percentile = kDefaultThresholdPercentile;
  std::string fitted_on = "train";
};

/// Empirical percentile with linear interpolation between order statistics:
/// h = (n-1) * q/100, value = x[floor h] + frac(h) * (x[floor h + 1] - x[floor h]).
Threshold fit_threshold(std::span<const double> scores,
                        double percentile = kDefaultThresholdPercentile);

enum class Decision { kNormal, kAnomaly };

const char* to_string(Decision decision);

/// Anomaly iff score > cutoff.
inline Decision decide(double score, double cutoff) {
  return score > cutoff ? Decision::kAnomaly : Decision::kNormal;
}
inline Decision decide(const AnomalyScore& score, const Threshold& threshold) {
  return decide(score.value, threshold.value);
}

}  // namespace asd
