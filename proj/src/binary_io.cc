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

#include "pctl/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pctl/errors.h"

namespace pctl::io {

void ByteWriter::Magic(std::string_view magic) {
  bytes_.insert(bytes_.end(), magic.begin(), magic.end());
}

void ByteWriter::U64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void ByteWriter::F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::BeginRecord() {
  open_records_.push_back(bytes_.size());
  U64(0);
}

void ByteWriter::EndRecord() {
  const std::size_t at = open_records_.back();
  open_records_.pop_back();
  const std::uint64_t len = bytes_.size() - at - 8;
  for (int i = 0; i < 8; ++i) {
    bytes_[at + i] = static_cast<std::uint8_t>(len >> (8 * i));
  }
}

void ByteReader::Need(std::size_t n, const char* what) const {
  const std::size_t limit =
      record_ends_.empty() ? bytes_.size() : record_ends_.back();
  if (pos_ + n > limit) {
    throw DecodeError(pos_, std::string("truncated ") + what);
  }
}

void ByteReader::ExpectMagic(std::string_view magic) {
  Need(magic.size(), "magic header");
  if (std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0) {
    throw DecodeError(pos_, "bad magic header, expected '" +
                                std::string(magic) + "'");
  }
  pos_ += magic.size();
}

std::uint64_t ByteReader::U64() {
  Need(8, "u64 field");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  }
  pos_ += 8;
  return v;
}

double ByteReader::F64() { return std::bit_cast<double>(U64()); }

void ByteReader::BeginRecord() {
  const std::size_t at = pos_;
  const std::uint64_t len = U64();
  const std::size_t limit =
      record_ends_.empty() ? bytes_.size() : record_ends_.back();
  if (len > limit - pos_) {
    throw DecodeError(at, "record length " + std::to_string(len) +
                              " exceeds available bytes");
  }
  record_ends_.push_back(pos_ + len);
}

void ByteReader::EndRecord() {
  const std::size_t end = record_ends_.back();
  if (pos_ != end) {
    throw DecodeError(pos_, "record has " + std::to_string(end - pos_) +
                                " unread trailing bytes");
  }
  record_ends_.pop_back();
}

void ByteReader::ExpectEnd() const {
  if (pos_ != bytes_.size()) {
    throw DecodeError(pos_, "trailing bytes after final record");
  }
}

std::vector<std::uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace pctl::io
