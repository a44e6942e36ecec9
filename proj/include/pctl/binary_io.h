/*
 * Copyright 2026 The pctl Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCTL_BINARY_IO_H_
#define PCTL_BINARY_IO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pctl::io {

// 8-byte versioned file magics.
inline constexpr std::string_view kStateMagic = "PCTLST01";
inline constexpr std::string_view kModelMagic = "PCTLMD01";

// Little-endian encoder for length-prefixed records of u64 and f64 fields.
class ByteWriter {
 public:
  void Magic(std::string_view magic);
  void U64(std::uint64_t v);
  void F64(double v);

  // Opens a record whose u64 length prefix is patched by EndRecord().
  void BeginRecord();
  void EndRecord();

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::vector<std::size_t> open_records_;
};

// Decoder that reports the byte offset of the first inconsistency.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void ExpectMagic(std::string_view magic);
  std::uint64_t U64();
  double F64();

  // Reads a record length prefix; the matching EndRecord() checks that the
  // payload was consumed exactly.
  void BeginRecord();
  void EndRecord();

  void ExpectEnd() const;
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n, const char* what) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> record_ends_;
};

std::vector<std::uint8_t> ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace pctl::io

#endif  // PCTL_BINARY_IO_H_
