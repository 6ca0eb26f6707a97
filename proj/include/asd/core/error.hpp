// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace asd {

enum class ErrorCode {
  kOk = 0,
  kFormat,               // malformed WAV / CSV / config text
  kUnsupportedChannels,  // multi-channel audio
  kEmptyAudio,
  kTooShort,             // clip shorter than one frame, or T < P
  kConfig,               // invalid configuration or argument
  kEmptyManifest,
  kDuplicate,
  kNoData,               // requested machine / split has no clips
  kInsufficientData,     // e.g. < 2 residual vectors for a covariance
  kDimensionMismatch,
  kUndefinedMetric,
  kNumerical,            // NaN / Inf during training
  kArtifactFormat,       // wrong magic in a model / covariance file
  kVersionMismatch,
  kCorruptArtifact,      // truncated or inconsistent artifact
  kMissingArtifact,
  kMismatch,             // scored clips not present in the truth manifest
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Runs `body`, reporting malformed text as a configuration error.
template <class F>
auto as_config_error(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw Error(ErrorCode::kConfig, e.what());
    throw;
  }
}

}  // namespace asd
