// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/audio.hpp"

#include <cstring>

#include "support.hpp"

using namespace asd;
using asd::test::error_code_of;

namespace {

// Hand-assembled RIFF/WAVE, independent of the encoder under test.
struct WavBuilder {
  std::uint16_t format = 1;
  std::uint16_t channels = 1;
  std::uint32_t rate = 16000;
  std::uint16_t bits = 16;
  std::vector<std::uint8_t> data;
  bool extensible = false;
  bool extra_chunk = false;

  template <class T>
  static void put(std::vector<std::uint8_t>& b, T v) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    b.insert(b.end(), raw, raw + sizeof(T));
  }
  static void tag(std::vector<std::uint8_t>& b, const char* t) { b.insert(b.end(), t, t + 4); }

  std::vector<std::uint8_t> build() const {
    std::vector<std::uint8_t> fmt;
    put<std::uint16_t>(fmt, extensible ? 0xFFFE : format);
    put<std::uint16_t>(fmt, channels);
    put<std::uint32_t>(fmt, rate);
    put<std::uint32_t>(fmt, rate * channels * bits / 8);
    put<std::uint16_t>(fmt, static_cast<std::uint16_t>(channels * bits / 8));
    put<std::uint16_t>(fmt, bits);
    if (extensible) {
      put<std::uint16_t>(fmt, 22);
      put<std::uint16_t>(fmt, bits);
      put<std::uint32_t>(fmt, 4);
      put<std::uint16_t>(fmt, format);
      const std::uint8_t guid_tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                          0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
      fmt.insert(fmt.end(), guid_tail, guid_tail + 14);
    }
    std::vector<std::uint8_t> body;
    tag(body, "WAVE");
    tag(body, "fmt ");
    put<std::uint32_t>(body, static_cast<std::uint32_t>(fmt.size()));
    body.insert(body.end(), fmt.begin(), fmt.end());
    if (extra_chunk) {
      tag(body, "LIST");
      put<std::uint32_t>(body, 3);
      body.insert(body.end(), {'a', 'b', 'c', 0});  // odd size plus pad byte
    }
    tag(body, "data");
    put<std::uint32_t>(body, static_cast<std::uint32_t>(data.size()));
    body.insert(body.end(), data.begin(), data.end());
    std::vector<std::uint8_t> out;
    tag(out, "RIFF");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
  }
};

std::vector<std::uint8_t> pcm16(std::initializer_list<std::int16_t> values) {
  std::vector<std::uint8_t> b;
  for (auto v : values) WavBuilder::put(b, v);
  return b;
}

}  // namespace

TEST_CASE("pcm16 full scale maps to [-1, 1)") {
  WavBuilder w;
  w.data = pcm16({-32768, 0, 16384, 32767});
  const AudioClip clip = decode_wav(w.build(), "mem");
  REQUIRE(clip.size() == 4);
  CHECK(clip.samples[0] == -1.0f);
  CHECK(clip.samples[1] == 0.0f);
  CHECK(clip.samples[2] == 0.5f);
  CHECK(clip.samples[3] == doctest::Approx(32767.0 / 32768.0));
  CHECK(clip.sample_rate_hz == 16000);
}

TEST_CASE("ten seconds of pcm16 at 16 kHz") {
  asd::test::TempDir dir;
  AudioClip clip;
  clip.samples.assign(160000, 0.25f);
  write_wav(dir / "ten.wav", clip);
  const AudioClip back = read_wav(dir / "ten.wav");
  CHECK(back.size() == 160000);
  CHECK(back.duration_seconds() == 10.0);
  CHECK(back.source_path == (dir / "ten.wav").string());
}

TEST_CASE("float32, extensible headers and foreign chunks decode") {
  WavBuilder w;
  w.format = 3;
  w.bits = 32;
  for (float f : {0.5f, -0.25f, 2.0f}) WavBuilder::put(w.data, f);
  w.extra_chunk = true;
  AudioClip clip = decode_wav(w.build(), "mem");
  REQUIRE(clip.size() == 3);
  CHECK(clip.samples[0] == 0.5f);
  CHECK(clip.samples[1] == -0.25f);
  CHECK(clip.samples[2] == 1.0f);

  WavBuilder e;
  e.extensible = true;
  e.rate = 22050;
  e.data = pcm16({100, -100});
  clip = decode_wav(e.build(), "mem");
  CHECK(clip.size() == 2);
  CHECK(clip.sample_rate_hz == 22050);
}

TEST_CASE("channel, length and header errors") {
  WavBuilder stereo;
  stereo.channels = 2;
  stereo.data = pcm16({1, 2, 3, 4});
  CHECK(error_code_of([&] { decode_wav(stereo.build(), "s"); }) == ErrorCode::kUnsupportedChannels);

  WavBuilder empty;
  CHECK(error_code_of([&] { decode_wav(empty.build(), "e"); }) == ErrorCode::kEmptyAudio);

  WavBuilder eight;
  eight.bits = 8;
  eight.data = {1, 2};
  CHECK(error_code_of([&] { decode_wav(eight.build(), "b"); }) == ErrorCode::kFormat);

  std::vector<std::uint8_t> junk{'R', 'I', 'F', 'X', 0, 0, 0, 0};
  CHECK(error_code_of([&] { decode_wav(junk, "j"); }) == ErrorCode::kFormat);

  WavBuilder ok;
  ok.data = pcm16({1, 2, 3});
  auto truncated = ok.build();
  truncated.resize(30);
  CHECK(error_code_of([&] { decode_wav(truncated, "t"); }) == ErrorCode::kFormat);

  CHECK(error_code_of([] { read_wav("/nonexistent/clip.wav"); }) != ErrorCode::kOk);
}

TEST_CASE("encoder round trip") {
  AudioClip clip;
  clip.sample_rate_hz = 8000;
  for (int i = 0; i < 100; ++i) clip.samples.push_back(static_cast<float>(i - 50) / 64.0f);
  const AudioClip f = decode_wav(encode_wav(clip, WavEncoding::kFloat32), "f");
  CHECK(f.samples == clip.samples);
  CHECK(f.sample_rate_hz == 8000);
  const AudioClip p = decode_wav(encode_wav(clip, WavEncoding::kPcm16), "p");
  for (std::size_t i = 0; i < clip.size(); ++i) {
    CHECK(std::abs(p.samples[i] - clip.samples[i]) <= 1.0f / 32768.0f);
  }
}
