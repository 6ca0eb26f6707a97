// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "asd/core/error.hpp"

namespace asd {
namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_frame_params(int fft_size, int hop_size) {
  if (!is_power_of_two(fft_size)) {
    fail(ErrorCode::kConfig, "fft_size must be a power of two, got " + std::to_string(fft_size));
  }
  if (hop_size < 1 || hop_size > fft_size) {
    fail(ErrorCode::kConfig, "hop_size must be in [1, fft_size], got " + std::to_string(hop_size));
  }
}

}  // namespace

struct FeatureExtractor::Fft {
  explicit Fft(int n) : size(n) {
    in = fftw_alloc_real(static_cast<std::size_t>(n));
    out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  ~Fft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size;
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
};

void FeatureConfig::validate() const {
  if (mel_bands < 1) fail(ErrorCode::kConfig, "mel_bands must be >= 1");
  if (frames_per_vector < 1) fail(ErrorCode::kConfig, "frames_per_vector must be >= 1");
  if (!(log_floor > 0.0)) fail(ErrorCode::kConfig, "log_floor must be > 0");
  check_frame_params(fft_size, hop_size);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

int frame_count(std::size_t num_samples, int fft_size, int hop_size) {
  if (num_samples < static_cast<std::size_t>(fft_size)) {
    fail(ErrorCode::kTooShort, "clip of " + std::to_string(num_samples) +
                                   " samples is shorter than one frame of " +
                                   std::to_string(fft_size));
  }
  return 1 + static_cast<int>((num_samples - static_cast<std::size_t>(fft_size)) /
                              static_cast<std::size_t>(hop_size));
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

std::vector<double> mel_center_frequencies(int num_bands, double fmin_hz, double fmax_hz) {
  const double lo = hz_to_mel(fmin_hz);
  const double step = (hz_to_mel(fmax_hz) - lo) / (num_bands + 1);
  std::vector<double> centers(static_cast<std::size_t>(num_bands));
  for (int m = 0; m < num_bands; ++m) {
    centers[static_cast<std::size_t>(m)] = mel_to_hz(lo + (m + 1) * step);
  }
  return centers;
}

Eigen::MatrixXd mel_filterbank(int num_bands, int fft_size, int sample_rate_hz,
                               double fmin_hz, double fmax_hz) {
  if (num_bands < 1) fail(ErrorCode::kConfig, "mel filterbank needs at least one band");
  if (sample_rate_hz <= 0) fail(ErrorCode::kConfig, "sample rate must be positive");
  check_frame_params(fft_size, 1);
  const double nyquist = sample_rate_hz / 2.0;
  if (fmax_hz <= 0.0) fmax_hz = nyquist;
  if (fmin_hz < 0.0 || fmin_hz >= fmax_hz || fmax_hz > nyquist) {
    fail(ErrorCode::kConfig, "mel band edges must satisfy 0 <= fmin < fmax <= Nyquist");
  }

  const int bins = fft_size / 2 + 1;
  const double lo = hz_to_mel(fmin_hz);
  const double step = (hz_to_mel(fmax_hz) - lo) / (num_bands + 1);
  std::vector<double> edges(static_cast<std::size_t>(num_bands + 2));
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = mel_to_hz(lo + i * step);

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(num_bands, bins);
  for (int m = 0; m < num_bands; ++m) {
    const double left = edges[static_cast<std::size_t>(m)];
    const double center = edges[static_cast<std::size_t>(m) + 1];
    const double right = edges[static_cast<std::size_t>(m) + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
      const double rising = (f - left) / (center - left);
      const double falling = (right - f) / (right - center);
      fb(m, k) = std::max(0.0, std::min(rising, falling));
    }
    if (!(fb.row(m).sum() > 0.0)) {
      fail(ErrorCode::kConfig, "mel band " + std::to_string(m) + " of " +
                                   std::to_string(num_bands) +
                                   " covers no FFT bin; reduce mel_bands or raise fft_size");
    }
  }
  return fb;
}

FeatureExtractor::FeatureExtractor(const FeatureConfig& config, int sample_rate_hz)
    : config_(config), sample_rate_hz_(sample_rate_hz) {
  config_.validate();
  window_ = hann_window(config_.fft_size);
  filterbank_ = mel_filterbank(config_.mel_bands, config_.fft_size, sample_rate_hz,
                               config_.fmin_hz, config_.fmax_hz);
  fft_ = std::make_unique<Fft>(config_.fft_size);
}

FeatureExtractor::~FeatureExtractor() = default;
FeatureExtractor::FeatureExtractor(FeatureExtractor&&) noexcept = default;
FeatureExtractor& FeatureExtractor::operator=(FeatureExtractor&&) noexcept = default;

Eigen::MatrixXd FeatureExtractor::power(const AudioClip& clip) {
  clip.validate();
  if (clip.sample_rate_hz != sample_rate_hz_) {
    fail(ErrorCode::kConfig, clip.source_path + ": sample rate " +
                                 std::to_string(clip.sample_rate_hz) + " Hz, extractor expects " +
                                 std::to_string(sample_rate_hz_) + " Hz");
  }
  const int n = config_.fft_size;
  const int hop = config_.hop_size;
  const int frames = frame_count(clip.size(), n, hop);
  const int bins = n / 2 + 1;

  Eigen::MatrixXd power(bins, frames);
  for (int t = 0; t < frames; ++t) {
    const float* frame = clip.samples.data() + static_cast<std::size_t>(t) * hop;
    for (int i = 0; i < n; ++i) fft_->in[i] = frame[i] * window_[static_cast<std::size_t>(i)];
    fftw_execute(fft_->plan);
    for (int k = 0; k < bins; ++k) {
      power(k, t) = fft_->out[k][0] * fft_->out[k][0] + fft_->out[k][1] * fft_->out[k][1];
    }
  }
  return power;
}

LogMelSpectrogram FeatureExtractor::log_mel(const AudioClip& clip) {
  const Eigen::MatrixXd mel = filterbank_ * power(clip);
  LogMelSpectrogram spec;
  spec.frame = FrameParams{config_.fft_size, config_.hop_size, WindowKind::kHann};
  spec.values = mel.unaryExpr([floor = config_.log_floor](double v) {
                       return std::log(std::max(v, floor));
                     })
                    .cast<float>();
  return spec;
}

FeatureMatrix FeatureExtractor::features(const AudioClip& clip) {
  return stack_frames(log_mel(clip), config_.frames_per_vector);
}

Eigen::MatrixXd stft_power(const AudioClip& clip, int fft_size, int hop_size) {
  FeatureConfig config;
  config.fft_size = fft_size;
  config.hop_size = hop_size;
  config.mel_bands = 1;
  check_frame_params(fft_size, hop_size);
  frame_count(clip.size(), fft_size, hop_size);
  return FeatureExtractor(config, clip.sample_rate_hz).power(clip);
}

LogMelSpectrogram log_mel(const AudioClip& clip, const FeatureConfig& config) {
  return FeatureExtractor(config, clip.sample_rate_hz).log_mel(clip);
}

FeatureMatrix stack_frames(const LogMelSpectrogram& spec, int frames_per_vector) {
  const int bands = spec.mel_bands();
  const int frames = spec.num_frames();
  if (frames_per_vector < 1) fail(ErrorCode::kConfig, "frames_per_vector must be >= 1");
  if (frames < frames_per_vector) {
    fail(ErrorCode::kTooShort, "spectrogram has " + std::to_string(frames) +
                                   " frames, fewer than the " +
                                   std::to_string(frames_per_vector) + " needed per vector");
  }
  const int count = frames - frames_per_vector + 1;
  const Eigen::Index dim = static_cast<Eigen::Index>(bands) * frames_per_vector;
  FeatureMatrix out(dim, count);
  // Column-major storage makes P consecutive frames one contiguous block.
  for (int k = 0; k < count; ++k) {
    out.col(k) = Eigen::Map<const Eigen::VectorXf>(
        spec.values.data() + static_cast<Eigen::Index>(k) * bands, dim);
  }
  return out;
}

}  // namespace asd
