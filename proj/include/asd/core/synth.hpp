// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Deterministic synthetic machine-sound datasets laid out like the official
// first-shot trees.
//
// Each machine is a harmonic stack (3-5 partials over a random f0) with slow
// amplitude modulation on a pink-ish noise bed. The target domain adds noise
// (lower SNR) and shifts f0 by a few percent. Anomalous test clips carry
// transient clicks and/or a detuned partial.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asd/core/audio.hpp"
#include "asd/core/dataset.hpp"
#include "asd/core/text_io.hpp"

namespace asd {

enum class AnomalyKind { kClick, kDetune, kBoth };

const char* to_string(AnomalyKind kind);

struct SynthSpec {
  std::vector<std::string> machines{"synth_machine"};
  DatasetRole role = DatasetRole::kDevelopment;
  int sample_rate_hz = kTaskSampleRateHz;
  double duration_s = 2.0;

  int source_train = 100;
  int target_train = 10;
  int test_normal = 20;   // split between domains, source gets the odd one
  int test_anomaly = 20;
  int supplementary = 0;  // alternating clean / noise clips

  int harmonics_min = 3;
  int harmonics_max = 5;
  double f0_min_hz = 80.0;
  double f0_max_hz = 400.0;
  double am_min_hz = 2.0;
  double am_max_hz = 8.0;
  double signal_rms = 0.1;

  double source_snr_db = 10.0;
  double target_noise_boost_db = 6.0;
  double target_f0_shift = 0.03;

  AnomalyKind anomaly = AnomalyKind::kClick;
  double clicks_per_second = 4.0;
  double click_amplitude = 0.5;
  double detune_fraction = 0.05;

  void validate() const;
  static SynthSpec from_keyvalue(const KeyValueFile& file);
  static SynthSpec load(const std::filesystem::path& path);
  KeyValueFile to_keyvalue() const;
};

/// Per-machine parameters drawn from (seed, machine index).
struct MachineVoice {
  double f0_hz = 0.0;
  std::vector<double> harmonic_gains;
  double am_rate_hz = 0.0;
  double am_depth = 0.0;
  double target_shift_sign = 1.0;
};

MachineVoice machine_voice(const SynthSpec& spec, std::uint64_t seed, std::size_t machine_index);

struct ClipPlan {
  Domain domain = Domain::kSource;
  Split split = Split::kTrain;
  Condition condition = Condition::kNormal;
  std::string supplementary_kind;  // "clean" or "noise" for supplementary clips
  std::uint64_t serial = 0;        // unique per machine; seeds the clip stream
};

AudioClip synth_clip(const SynthSpec& spec, const MachineVoice& voice, std::uint64_t seed,
                     std::size_t machine_index, const ClipPlan& plan);

/// Writes <out_dir>/<machine>/{train,test,supplementary}/*.wav plus
/// <out_dir>/manifest.csv (with ground truth) and per-machine attribute CSVs.
/// Output depends only on (spec, seed).
DatasetManifest synth_generate(const SynthSpec& spec, std::uint64_t seed,
                               const std::filesystem::path& out_dir);

}  // namespace asd
