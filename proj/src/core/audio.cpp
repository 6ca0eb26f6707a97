// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "asd/core/error.hpp"
#include "asd/core/text_io.hpp"

namespace asd {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }

  std::string tag() {
    need(4);
    std::string t(reinterpret_cast<const char*>(&bytes_[pos_]), 4);
    pos_ += 4;
    return t;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8) | (bytes_[pos_ + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) fail(ErrorCode::kFormat, origin_ + ": truncated WAV header");
  }

  const std::vector<std::uint8_t>& bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, std::string_view tag) {
  out.insert(out.end(), tag.begin(), tag.end());
}

}  // namespace

void AudioClip::validate() const {
  if (samples.empty()) fail(ErrorCode::kEmptyAudio, source_path + ": clip has no samples");
  if (sample_rate_hz <= 0) fail(ErrorCode::kConfig, source_path + ": non-positive sample rate");
  for (float s : samples) {
    if (!std::isfinite(s)) fail(ErrorCode::kFormat, source_path + ": non-finite sample");
  }
}

AudioClip decode_wav(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  ByteReader r(bytes, origin);
  if (r.tag() != "RIFF") fail(ErrorCode::kFormat, origin + ": missing RIFF tag");
  r.u32();  // riff size; often wrong in the wild, so chunk bounds are checked instead
  if (r.tag() != "WAVE") fail(ErrorCode::kFormat, origin + ": missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  bool have_data = false;

  while (r.remaining() >= 8 && !have_data) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    const std::size_t body = r.pos();
    if (id == "fmt ") {
      if (size < 16) fail(ErrorCode::kFormat, origin + ": fmt chunk too small");
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      bits = r.u16();
      if (format == kFormatExtensible) {
        if (size < 40) fail(ErrorCode::kFormat, origin + ": extensible fmt chunk too small");
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        format = r.u16();  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorCode::kFormat, origin + ": data chunk before fmt chunk");
      data_size = std::min<std::size_t>(size, r.remaining());
      data = bytes.data() + body;
      have_data = true;
    }
    r.seek(std::min(bytes.size(), body + size + (size & 1u)));
  }
  if (!have_fmt) fail(ErrorCode::kFormat, origin + ": no fmt chunk");
  if (!have_data) fail(ErrorCode::kFormat, origin + ": no data chunk");
  if (channels != 1) {
    fail(ErrorCode::kUnsupportedChannels,
         origin + ": expected 1 channel, found " + std::to_string(channels));
  }
  if (rate == 0) fail(ErrorCode::kFormat, origin + ": zero sample rate");

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.source_path = origin;
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = data_size / 2;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
      clip.samples[i] = static_cast<float>(v) / 32768.0f;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = data_size / 4;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data + 4 * i, 4);
      if (!std::isfinite(v)) fail(ErrorCode::kFormat, origin + ": non-finite float sample");
      clip.samples[i] = std::clamp(v, -1.0f, 1.0f);
    }
  } else {
    fail(ErrorCode::kFormat, origin + ": unsupported encoding (format " +
                                 std::to_string(format) + ", " + std::to_string(bits) +
                                 " bits)");
  }
  if (clip.samples.empty()) fail(ErrorCode::kEmptyAudio, origin + ": zero-length audio");
  return clip;
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.string());
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto data_size = static_cast<std::uint32_t>(clip.samples.size() * bytes_per_sample);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * bytes_per_sample);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  put_tag(out, "data");
  put_u32(out, data_size);
  for (float s : clip.samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    if (pcm) {
      const auto q = static_cast<std::int16_t>(std::lround(c * 32767.0f));
      put_u16(out, static_cast<std::uint16_t>(q));
    } else {
      std::uint32_t bits;
      std::memcpy(&bits, &c, 4);
      put_u32(out, bits);
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding) {
  const auto bytes = encode_wav(clip, encoding);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                           bytes.size()));
}

}  // namespace asd
