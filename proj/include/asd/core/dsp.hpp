// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Log-mel front end: Hann-windowed STFT power, HTK-scale triangular mel
// filterbank, natural log with a floor, and P-frame stacking.
//
// Matrix layout: spectrograms are (bins x frames), column-major, so one frame
// is contiguous in memory. A stacked feature matrix is (D x K) with column k
// holding x_k = [X_k; X_{k+1}; ...; X_{k+P-1}], i.e. element d of column k
// is X(d mod F, k + d / F).

#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "asd/core/audio.hpp"

namespace asd {

enum class WindowKind { kHann };

struct FeatureConfig {
  int mel_bands = 128;
  int fft_size = 1024;
  int hop_size = 512;
  int frames_per_vector = 5;
  double log_floor = 1e-12;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;  // 0 selects Nyquist

  int vector_dim() const { return frames_per_vector * mel_bands; }
  void validate() const;
};

struct FrameParams {
  int fft_size = 1024;
  int hop_size = 512;
  WindowKind window = WindowKind::kHann;
};

struct LogMelSpectrogram {
  Eigen::MatrixXf values;  // F x T
  FrameParams frame;

  int mel_bands() const { return static_cast<int>(values.rows()); }
  int num_frames() const { return static_cast<int>(values.cols()); }
};

/// Columns are stacked feature vectors x_k, k = 0..K-1.
using FeatureMatrix = Eigen::MatrixXf;

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// T = 1 + floor((L - fft_size) / hop_size); kTooShort when L < fft_size.
int frame_count(std::size_t num_samples, int fft_size, int hop_size);

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

/// |DFT|^2 of each Hann-windowed frame, (fft_size/2 + 1) x T.
Eigen::MatrixXd stft_power(const AudioClip& clip, int fft_size, int hop_size);

/// Centre frequencies (Hz) of `num_bands` filters equally spaced in mel
/// between fmin and fmax (exclusive of the two edge points).
std::vector<double> mel_center_frequencies(int num_bands, double fmin_hz, double fmax_hz);

/// F x (fft_size/2 + 1) triangular filterbank; kConfig if any row is empty.
Eigen::MatrixXd mel_filterbank(int num_bands, int fft_size, int sample_rate_hz,
                               double fmin_hz = 0.0, double fmax_hz = 0.0);

LogMelSpectrogram log_mel(const AudioClip& clip, const FeatureConfig& config);

/// K = T - P + 1 stacked vectors; kTooShort when T < P.
FeatureMatrix stack_frames(const LogMelSpectrogram& spec, int frames_per_vector);

/// Reusable extractor that caches the window, filterbank and FFT plan for one
/// sample rate. Not safe for concurrent use; give each thread its own.
class FeatureExtractor {
 public:
  FeatureExtractor(const FeatureConfig& config, int sample_rate_hz);
  ~FeatureExtractor();
  FeatureExtractor(FeatureExtractor&&) noexcept;
  FeatureExtractor& operator=(FeatureExtractor&&) noexcept;

  const FeatureConfig& config() const { return config_; }
  int sample_rate_hz() const { return sample_rate_hz_; }

  Eigen::MatrixXd power(const AudioClip& clip);
  LogMelSpectrogram log_mel(const AudioClip& clip);
  FeatureMatrix features(const AudioClip& clip);

 private:
  struct Fft;

  FeatureConfig config_;
  int sample_rate_hz_;
  std::vector<double> window_;
  Eigen::MatrixXd filterbank_;
  std::unique_ptr<Fft> fft_;
};

}  // namespace asd
