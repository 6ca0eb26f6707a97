// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/synth.hpp"

#include "support.hpp"

using namespace asd;
using asd::test::error_code_of;

namespace {

SynthSpec small_spec() {
  SynthSpec s;
  s.duration_s = 0.5;
  s.source_train = 20;
  s.target_train = 2;
  s.test_normal = 10;
  s.test_anomaly = 10;
  return s;
}

double peak_derivative(const AudioClip& c) {
  double peak = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    peak = std::max(peak, std::abs(static_cast<double>(c.samples[i]) - c.samples[i - 1]));
  }
  return peak;
}

std::map<std::string, std::vector<std::uint8_t>> tree_bytes(const std::filesystem::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(root).string()] = asd::test::slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("generated counts match the spec") {
  asd::test::TempDir dir;
  const auto m = synth_generate(small_spec(), 7, dir.path());
  std::map<std::tuple<Split, Domain, Condition>, int> counts;
  for (const auto& r : m.records) ++counts[{r.split, r.domain, r.condition}];
  CHECK(counts[{Split::kTrain, Domain::kSource, Condition::kNormal}] == 20);
  CHECK(counts[{Split::kTrain, Domain::kTarget, Condition::kNormal}] == 2);
  CHECK(counts[{Split::kTest, Domain::kSource, Condition::kNormal}] +
            counts[{Split::kTest, Domain::kTarget, Condition::kNormal}] == 10);
  CHECK(counts[{Split::kTest, Domain::kSource, Condition::kAnomaly}] +
            counts[{Split::kTest, Domain::kTarget, Condition::kAnomaly}] == 10);
  CHECK(m.records.size() == 42);
  CHECK(read_manifest(dir / "manifest.csv") == m);

  const AudioClip c = read_wav(dir / m.records.front().path);
  CHECK(c.sample_rate_hz == 16000);
  CHECK(c.size() == 8000);
}

TEST_CASE("same seed gives a byte-identical tree; another seed does not") {
  asd::test::TempDir a, b, c;
  synth_generate(small_spec(), 7, a.path());
  synth_generate(small_spec(), 7, b.path());
  synth_generate(small_spec(), 8, c.path());
  const auto ta = tree_bytes(a.path());
  CHECK(ta == tree_bytes(b.path()));
  CHECK(ta != tree_bytes(c.path()));
}

TEST_CASE("scanning a generated tree reproduces its manifest") {
  SynthSpec spec = small_spec();
  spec.machines = {"alpha", "beta"};
  spec.supplementary = 3;
  asd::test::TempDir dir;
  const auto generated = synth_generate(spec, 3, dir.path());
  auto scan = scan_dataset(dir.path());
  CHECK(scan.skipped.empty());
  merge_attribute_files(scan.manifest, dir.path());
  CHECK(scan.manifest == generated);
  CHECK_NOTHROW(validate_records(generated));
  CHECK_NOTHROW(validate_single_section(generated));
}

TEST_CASE("evaluation role conceals test labels in names only") {
  SynthSpec spec = small_spec();
  spec.role = DatasetRole::kEvaluation;
  asd::test::TempDir dir;
  const auto truth = synth_generate(spec, 5, dir.path());
  const auto scan = scan_dataset(dir.path(), {}, DatasetRole::kEvaluation);
  std::size_t unknown = 0;
  for (const auto& r : scan.manifest.records) {
    if (r.split == Split::kTest) {
      CHECK(r.condition == Condition::kUnknown);
      ++unknown;
    }
  }
  CHECK(unknown == 20);
  for (const auto& r : truth.records) CHECK(r.condition != Condition::kUnknown);
}

TEST_CASE("click anomalies raise the peak sample-to-sample change") {
  const SynthSpec spec = small_spec();
  const MachineVoice voice = machine_voice(spec, 11, 0);
  double normal_max = 0.0, anomaly_min = 1e9;
  for (std::uint64_t serial = 0; serial < 30; ++serial) {
    for (Domain d : {Domain::kSource, Domain::kTarget}) {
      ClipPlan normal{d, Split::kTest, Condition::kNormal, {}, serial};
      ClipPlan anomaly{d, Split::kTest, Condition::kAnomaly, {}, 1000 + serial};
      normal_max = std::max(normal_max, peak_derivative(synth_clip(spec, voice, 11, 0, normal)));
      anomaly_min = std::min(anomaly_min, peak_derivative(synth_clip(spec, voice, 11, 0, anomaly)));
    }
  }
  CHECK(anomaly_min > normal_max);
}

TEST_CASE("machine voices follow the declared ranges") {
  const SynthSpec spec;
  for (std::size_t m = 0; m < 20; ++m) {
    const auto v = machine_voice(spec, 99, m);
    CHECK(v.f0_hz >= spec.f0_min_hz);
    CHECK(v.f0_hz <= spec.f0_max_hz);
    CHECK(v.harmonic_gains.size() >= 3);
    CHECK(v.harmonic_gains.size() <= 5);
    CHECK(v.am_rate_hz >= 2.0);
    CHECK(v.am_rate_hz <= 8.0);
    CHECK(std::abs(v.target_shift_sign) == 1.0);
  }
}

TEST_CASE("invalid specs are config errors") {
  SynthSpec s = small_spec();
  s.source_train = 0;
  CHECK(error_code_of([&] { s.validate(); }) == ErrorCode::kConfig);
  s = small_spec();
  s.machines = {"a/b"};
  CHECK(error_code_of([&] { s.validate(); }) == ErrorCode::kConfig);
  CHECK(error_code_of([] { SynthSpec::load("/nonexistent/spec.cfg"); }) == ErrorCode::kConfig);

  asd::test::TempDir dir;
  asd::test::spit(dir / "bad.cfg", std::string("source_train = lots\n"));
  CHECK(error_code_of([&] { SynthSpec::load(dir / "bad.cfg"); }) == ErrorCode::kConfig);

  const auto round = SynthSpec::from_keyvalue(small_spec().to_keyvalue());
  CHECK(round.to_keyvalue().values() == small_spec().to_keyvalue().values());
}
