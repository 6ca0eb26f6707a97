// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "asd/core/error.hpp"

namespace fs = std::filesystem;

namespace asd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint32_t kVoiceStream = 0x766f6963;  // "voic"

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

AnomalyKind parse_anomaly_kind(const std::string& text) {
  if (text == "click") return AnomalyKind::kClick;
  if (text == "detune") return AnomalyKind::kDetune;
  if (text == "both") return AnomalyKind::kBoth;
  fail(ErrorCode::kConfig, "unknown anomaly kind '" + text + "' (click, detune or both)");
}

std::string number_token(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

const char* to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::kClick: return "click";
    case AnomalyKind::kDetune: return "detune";
    case AnomalyKind::kBoth: return "both";
  }
  return "click";
}

void SynthSpec::validate() const {
  if (machines.empty()) fail(ErrorCode::kConfig, "synth spec lists no machines");
  for (const auto& m : machines) {
    if (m.empty() || m.find_first_of("/\\ ,") != std::string::npos) {
      fail(ErrorCode::kConfig, "invalid machine name '" + m + "'");
    }
  }
  if (std::set<std::string>(machines.begin(), machines.end()).size() != machines.size()) {
    fail(ErrorCode::kConfig, "duplicate machine names in synth spec");
  }
  if (sample_rate_hz <= 0) fail(ErrorCode::kConfig, "sample_rate must be positive");
  if (!(duration_s > 0.0)) fail(ErrorCode::kConfig, "duration_s must be positive");
  if (source_train < 1 || target_train < 1) {
    fail(ErrorCode::kConfig, "source_train and target_train must be >= 1");
  }
  if (test_normal < 0 || test_anomaly < 0 || supplementary < 0) {
    fail(ErrorCode::kConfig, "clip counts must be non-negative");
  }
  if (harmonics_min < 1 || harmonics_max < harmonics_min) {
    fail(ErrorCode::kConfig, "need 1 <= harmonics_min <= harmonics_max");
  }
  if (!(f0_min_hz > 0.0) || f0_max_hz < f0_min_hz ||
      f0_max_hz * harmonics_max * (1.0 + target_f0_shift + detune_fraction) >=
          sample_rate_hz / 2.0) {
    fail(ErrorCode::kConfig, "f0 range must be positive and keep all partials below Nyquist");
  }
  if (!(am_min_hz >= 0.0) || am_max_hz < am_min_hz) fail(ErrorCode::kConfig, "bad AM rate range");
  if (!(signal_rms > 0.0)) fail(ErrorCode::kConfig, "signal_rms must be positive");
  if (!(clicks_per_second >= 0.0) || !(click_amplitude >= 0.0) || !(detune_fraction >= 0.0)) {
    fail(ErrorCode::kConfig, "anomaly parameters must be non-negative");
  }
}

SynthSpec SynthSpec::from_keyvalue(const KeyValueFile& f) {
  SynthSpec s;
  if (f.has("machines")) {
    s.machines.clear();
    for (const auto& m : split(f.get("machines"), ',')) {
      if (!trim(m).empty()) s.machines.push_back(trim(m));
    }
  }
  s.role = parse_role(f.get_or("role", to_string(s.role)));
  auto get_int = [&](const char* key, int fallback) {
    return static_cast<int>(f.get_int(key, fallback));
  };
  s.sample_rate_hz = get_int("sample_rate", s.sample_rate_hz);
  s.duration_s = f.get_double("duration_s", s.duration_s);
  s.source_train = get_int("source_train", s.source_train);
  s.target_train = get_int("target_train", s.target_train);
  s.test_normal = get_int("test_normal", s.test_normal);
  s.test_anomaly = get_int("test_anomaly", s.test_anomaly);
  s.supplementary = get_int("supplementary", s.supplementary);
  s.harmonics_min = get_int("harmonics_min", s.harmonics_min);
  s.harmonics_max = get_int("harmonics_max", s.harmonics_max);
  s.f0_min_hz = f.get_double("f0_min_hz", s.f0_min_hz);
  s.f0_max_hz = f.get_double("f0_max_hz", s.f0_max_hz);
  s.am_min_hz = f.get_double("am_min_hz", s.am_min_hz);
  s.am_max_hz = f.get_double("am_max_hz", s.am_max_hz);
  s.signal_rms = f.get_double("signal_rms", s.signal_rms);
  s.source_snr_db = f.get_double("source_snr_db", s.source_snr_db);
  s.target_noise_boost_db = f.get_double("target_noise_boost_db", s.target_noise_boost_db);
  s.target_f0_shift = f.get_double("target_f0_shift", s.target_f0_shift);
  s.anomaly = parse_anomaly_kind(f.get_or("anomaly", to_string(s.anomaly)));
  s.clicks_per_second = f.get_double("clicks_per_second", s.clicks_per_second);
  s.click_amplitude = f.get_double("click_amplitude", s.click_amplitude);
  s.detune_fraction = f.get_double("detune_fraction", s.detune_fraction);
  s.validate();
  return s;
}

SynthSpec SynthSpec::load(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    fail(ErrorCode::kConfig, "spec not found: " + path.string());
  }
  return as_config_error([&] { return from_keyvalue(KeyValueFile::load(path)); });
}

KeyValueFile SynthSpec::to_keyvalue() const {
  KeyValueFile f;
  std::string list;
  for (const auto& m : machines) list += (list.empty() ? "" : ",") + m;
  f.set("machines", list);
  f.set("role", to_string(role));
  f.set("sample_rate", std::to_string(sample_rate_hz));
  f.set("duration_s", format_double(duration_s));
  f.set("source_train", std::to_string(source_train));
  f.set("target_train", std::to_string(target_train));
  f.set("test_normal", std::to_string(test_normal));
  f.set("test_anomaly", std::to_string(test_anomaly));
  f.set("supplementary", std::to_string(supplementary));
  f.set("harmonics_min", std::to_string(harmonics_min));
  f.set("harmonics_max", std::to_string(harmonics_max));
  f.set("f0_min_hz", format_double(f0_min_hz));
  f.set("f0_max_hz", format_double(f0_max_hz));
  f.set("am_min_hz", format_double(am_min_hz));
  f.set("am_max_hz", format_double(am_max_hz));
  f.set("signal_rms", format_double(signal_rms));
  f.set("source_snr_db", format_double(source_snr_db));
  f.set("target_noise_boost_db", format_double(target_noise_boost_db));
  f.set("target_f0_shift", format_double(target_f0_shift));
  f.set("anomaly", to_string(anomaly));
  f.set("clicks_per_second", format_double(clicks_per_second));
  f.set("click_amplitude", format_double(click_amplitude));
  f.set("detune_fraction", format_double(detune_fraction));
  return f;
}

MachineVoice machine_voice(const SynthSpec& spec, std::uint64_t seed, std::size_t machine_index) {
  auto rng = make_rng(seed, kVoiceStream, machine_index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MachineVoice v;
  std::uniform_int_distribution<int> harmonics(spec.harmonics_min, spec.harmonics_max);
  const int count = harmonics(rng);
  v.f0_hz = spec.f0_min_hz + (spec.f0_max_hz - spec.f0_min_hz) * unit(rng);
  for (int h = 1; h <= count; ++h) v.harmonic_gains.push_back((0.5 + 0.5 * unit(rng)) / h);
  v.am_rate_hz = spec.am_min_hz + (spec.am_max_hz - spec.am_min_hz) * unit(rng);
  v.am_depth = 0.3 + 0.3 * unit(rng);
  v.target_shift_sign = unit(rng) < 0.5 ? -1.0 : 1.0;
  return v;
}

AudioClip synth_clip(const SynthSpec& spec, const MachineVoice& voice, std::uint64_t seed,
                     std::size_t machine_index, const ClipPlan& plan) {
  auto rng = make_rng(seed, machine_index, plan.serial + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  const double sr = spec.sample_rate_hz;
  const bool target = plan.domain == Domain::kTarget;
  const bool anomalous = plan.condition == Condition::kAnomaly;
  const bool clicks = anomalous && spec.anomaly != AnomalyKind::kDetune;
  const bool detune = anomalous && spec.anomaly != AnomalyKind::kClick;

  double f0 = voice.f0_hz * (1.0 + 0.005 * (2.0 * unit(rng) - 1.0));
  if (target) f0 *= 1.0 + voice.target_shift_sign * spec.target_f0_shift;
  const std::size_t partials = voice.harmonic_gains.size();
  std::vector<double> freqs(partials), phases(partials);
  for (std::size_t h = 0; h < partials; ++h) {
    freqs[h] = f0 * static_cast<double>(h + 1);
    phases[h] = kTwoPi * unit(rng);
  }
  const double am_phase = kTwoPi * unit(rng);
  const std::size_t detuned = partials > 1 ? 1 + static_cast<std::size_t>(unit(rng) * (partials - 1))
                                           : 0;
  if (detune) freqs[detuned] *= 1.0 + spec.detune_fraction;

  std::vector<double> signal(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    double s = 0.0;
    for (std::size_t h = 0; h < partials; ++h) {
      s += voice.harmonic_gains[h] * std::sin(kTwoPi * freqs[h] * t + phases[h]);
    }
    signal[i] = s * (1.0 + voice.am_depth * std::sin(kTwoPi * voice.am_rate_hz * t + am_phase));
  }
  const double signal_gain = spec.signal_rms / std::max(rms(signal), 1e-12);
  for (double& s : signal) s *= signal_gain;

  // Paul Kellet's economy pink filter over white Gaussian noise.
  std::vector<double> noise(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = gauss(rng);
    b0 = 0.99765 * b0 + w * 0.0990460;
    b1 = 0.96300 * b1 + w * 0.2965164;
    b2 = 0.57000 * b2 + w * 1.0526913;
    noise[i] = b0 + b1 + b2 + w * 0.1848;
  }
  const double snr_db = spec.source_snr_db - (target ? spec.target_noise_boost_db : 0.0);
  const double noise_gain =
      spec.signal_rms / std::pow(10.0, snr_db / 20.0) / std::max(rms(noise), 1e-12);

  const bool clean_only = plan.supplementary_kind == "clean";
  const bool noise_only = plan.supplementary_kind == "noise";
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) {
    mix[i] = (noise_only ? 0.0 : signal[i]) + (clean_only ? 0.0 : noise_gain * noise[i]);
  }

  if (clicks) {
    const auto count = std::max<long>(1, std::lround(spec.clicks_per_second * spec.duration_s));
    const std::size_t burst = std::min<std::size_t>(n, static_cast<std::size_t>(sr * 0.002));
    for (long c = 0; c < count; ++c) {
      const auto start = static_cast<std::size_t>(unit(rng) * static_cast<double>(n - burst));
      for (std::size_t j = 0; j < burst; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        mix[start + j] += sign * spec.click_amplitude * std::exp(-static_cast<double>(j) / 6.0);
      }
    }
  }

  AudioClip clip;
  clip.sample_rate_hz = spec.sample_rate_hz;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = static_cast<float>(std::clamp(mix[i], -1.0, 1.0));
  }
  return clip;
}

DatasetManifest synth_generate(const SynthSpec& spec, std::uint64_t seed, const fs::path& out_dir) {
  spec.validate();
  fs::create_directories(out_dir);

  DatasetManifest manifest;
  manifest.role = spec.role;
  const bool conceal = spec.role == DatasetRole::kEvaluation;

  for (std::size_t mi = 0; mi < spec.machines.size(); ++mi) {
    const std::string& machine = spec.machines[mi];
    const MachineVoice voice = machine_voice(spec, seed, mi);

    std::vector<ClipPlan> plans;
    auto add = [&](int count, Domain d, Split s, Condition c) {
      for (int i = 0; i < count; ++i) plans.push_back({d, s, c, {}, 0});
    };
    add(spec.source_train, Domain::kSource, Split::kTrain, Condition::kNormal);
    add(spec.target_train, Domain::kTarget, Split::kTrain, Condition::kNormal);
    add((spec.test_normal + 1) / 2, Domain::kSource, Split::kTest, Condition::kNormal);
    add(spec.test_normal / 2, Domain::kTarget, Split::kTest, Condition::kNormal);
    add((spec.test_anomaly + 1) / 2, Domain::kSource, Split::kTest, Condition::kAnomaly);
    add(spec.test_anomaly / 2, Domain::kTarget, Split::kTest, Condition::kAnomaly);
    for (int i = 0; i < spec.supplementary; ++i) {
      const bool clean = i % 2 == 0;
      plans.push_back({clean ? Domain::kSource : Domain::kUnknown, Split::kSupplementary,
                       Condition::kUnknown, clean ? "clean" : "noise", 0});
    }

    std::map<std::string, int> counters;
    std::string attribute_csv = "file_name,d1p,d1v\n";
    int eval_index = 0;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      ClipPlan& plan = plans[k];
      plan.serial = k;
      const double snr =
          spec.source_snr_db - (plan.domain == Domain::kTarget ? spec.target_noise_boost_db : 0.0);

      ClipRecord rec;
      rec.machine_type = machine;
      rec.section = "00";
      rec.domain = plan.domain;
      rec.split = plan.split;
      rec.condition = plan.condition;

      std::string name = "section_00";
      if (conceal && plan.split == Split::kTest) {
        char idx[16];
        std::snprintf(idx, sizeof(idx), "%04d", eval_index++);
        name += std::string("_") + idx;
      } else {
        if (plan.split != Split::kSupplementary || plan.domain != Domain::kUnknown) {
          name += std::string("_") + to_string(plan.domain);
        }
        name += std::string("_") + to_string(plan.split);
        const std::string tag = plan.split == Split::kSupplementary ? plan.supplementary_kind
                                                                    : to_string(plan.condition);
        name += "_" + tag;
        char idx[16];
        std::snprintf(idx, sizeof(idx), "%04d", counters[name]++);
        name += std::string("_") + idx;
        if (plan.split == Split::kSupplementary) {
          rec.attributes[kSupplementaryKindKey] = plan.supplementary_kind;
        } else {
          const std::string value = number_token(snr) + "dB";
          name += "_snr_" + value;
          rec.attributes["snr"] = value;
          attribute_csv += machine + "/" + to_string(plan.split) + "/" + name + ".wav,snr," +
                           value + "\n";
        }
      }
      rec.path = machine + "/" + to_string(plan.split) + "/" + name + ".wav";

      AudioClip clip = synth_clip(spec, voice, seed, mi, plan);
      clip.source_path = rec.path;
      write_wav(out_dir / rec.path, clip);
      manifest.records.push_back(std::move(rec));
    }
    write_file_atomic(out_dir / machine / "attributes_00.csv", attribute_csv);
  }

  manifest.sort_records();
  write_manifest(manifest, out_dir / "manifest.csv");
  KeyValueFile echo = spec.to_keyvalue();
  echo.set("seed", std::to_string(seed));
  write_file_atomic(out_dir / "synth_spec.txt", echo.to_string());
  return manifest;
}

}  // namespace asd
