/*
 * Copyright 2026 The sisa_rl Authors.
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

#ifndef SISA_RL_BYTE_IO_H_
#define SISA_RL_BYTE_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sisa_rl {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Appends fixed-width little-endian fields to a byte string.
class ByteWriter {
 public:
  void PutBytes(std::string_view bytes) { out_.append(bytes); }
  void PutU8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void PutU32(uint32_t v);
  void PutU64(uint64_t v);
  void PutF64(double v);

  const std::string& bytes() const { return out_; }
  std::string Release() { return std::move(out_); }

 private:
  std::string out_;
};

// Reads the fields written by ByteWriter; throws FormatError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : in_(bytes) {}

  std::string_view GetBytes(size_t n);
  uint8_t GetU8();
  uint32_t GetU32();
  uint64_t GetU64();
  double GetF64();

  size_t remaining() const { return in_.size() - pos_; }

 private:
  std::string_view in_;
  size_t pos_ = 0;
};

// FNV-1a, 64 bit.
uint64_t Fnv1a64(std::string_view bytes);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sisa_rl

#endif  // SISA_RL_BYTE_IO_H_
