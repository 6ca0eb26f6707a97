// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "asd/core/error.hpp"

namespace asd {

static_assert(std::endian::native == std::endian::little,
              "artifact encoders assume a little-endian host");

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size);

class BinaryWriter {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + size);
  }
  template <typename T>
  void put(T value) {
    bytes(&value, sizeof(T));
  }
  void append_checksum() { put<std::uint64_t>(fnv1a(buf_.data(), buf_.size())); }

  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Reads fixed-layout records; running off the end is a kCorruptArtifact.
class BinaryReader {
 public:
  BinaryReader(const std::vector<std::uint8_t>& bytes, std::string origin)
      : bytes_(bytes), origin_(std::move(origin)) {}

  void bytes(void* out, std::size_t size) {
    if (bytes_.size() - pos_ < size) {
      fail(ErrorCode::kCorruptArtifact, origin_ + ": truncated file");
    }
    std::memcpy(out, bytes_.data() + pos_, size);
    pos_ += size;
  }
  template <typename T>
  T get() {
    T value;
    bytes(&value, sizeof(T));
    return value;
  }

  void expect_magic(std::string_view magic) {
    std::string found(magic.size(), '\0');
    if (bytes_.size() < magic.size()) {
      fail(ErrorCode::kArtifactFormat, origin_ + ": file too small to be an artifact");
    }
    bytes(found.data(), found.size());
    if (found != magic) fail(ErrorCode::kArtifactFormat, origin_ + ": bad magic");
  }

  /// Checks the trailing FNV-1a hash and that nothing follows it.
  void verify_checksum() {
    const std::size_t covered = pos_;
    const auto stored = get<std::uint64_t>();
    if (pos_ != bytes_.size()) fail(ErrorCode::kCorruptArtifact, origin_ + ": trailing bytes");
    if (stored != fnv1a(bytes_.data(), covered)) {
      fail(ErrorCode::kCorruptArtifact, origin_ + ": checksum mismatch");
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file_atomic(const std::filesystem::path& path,
                              const std::vector<std::uint8_t>& bytes);

}  // namespace asd
