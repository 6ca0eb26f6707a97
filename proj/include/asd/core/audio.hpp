// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace asd {

inline constexpr int kTaskSampleRateHz = 16000;

/// Mono PCM clip with amplitudes in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate_hz = kTaskSampleRateHz;
  std::string source_path;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  /// Throws kEmptyAudio / kConfig / kFormat if an invariant is broken.
  void validate() const;
};

enum class WavEncoding { kPcm16, kFloat32 };

/// Reads a mono RIFF/WAVE file (PCM16 or IEEE float32, plain or
/// WAVE_FORMAT_EXTENSIBLE). PCM16 is scaled by 1/32768; float samples are
/// clamped to [-1, 1]. Multi-channel input is rejected, never downmixed.
AudioClip read_wav(const std::filesystem::path& path);
AudioClip decode_wav(const std::vector<std::uint8_t>& bytes, const std::string& origin);

/// PCM16 output rounds x * 32767 after clamping to [-1, 1].
std::vector<std::uint8_t> encode_wav(const AudioClip& clip, WavEncoding encoding);
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace asd
