// Licensed to the Apache Software Foundation (ASF) under one
// or more contributor license agreements.  See the NOTICE file
// distributed with this work for additional information
// regarding copyright ownership.  The ASF licenses this file
// to you under the Apache License, Version 2.0 (the
// "License"); you may not use this file except in compliance
// with the License.  You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing,
// software distributed under the License is distributed on an
// "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, either express or implied.  See the License for the
// specific language governing permissions and limitations
// under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace archfmt {

/// I/O accounting for one operation. Every reader in the library goes through
/// InputFile, which is the only place these counters are incremented.
struct Measurement {
  double wall_ms = 0.0;
  uint64_t bytes_read = 0;
  uint64_t seek_count = 0;
  uint64_t open_count = 0;
  uint64_t records_out = 0;

  Measurement& operator+=(const Measurement& other);
};

/// Read-only file handle with instrumented access.
///
/// Two access patterns are distinguished:
///  - read_at(): a positioned read; always counts as one seek.
///  - read_next(): continues a sequential cursor; the first call after open
///    (or after read_at) counts as one seek, later calls count none.
class InputFile {
 public:
  InputFile(const std::filesystem::path& path, Measurement* stats);
  ~InputFile();

  InputFile(const InputFile&) = delete;
  InputFile& operator=(const InputFile&) = delete;
  InputFile(InputFile&& other) noexcept;
  InputFile& operator=(InputFile&& other) noexcept;

  uint64_t size() const noexcept { return size_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Reads up to out.size() bytes at offset. Returns bytes read (short only at EOF).
  size_t read_at(uint64_t offset, std::span<uint8_t> out);
  std::vector<uint8_t> read_at(uint64_t offset, size_t length);

  /// Sequential read from the cursor. Returns 0 at EOF.
  size_t read_next(std::span<uint8_t> out);
  void rewind_to(uint64_t offset);
  uint64_t cursor() const noexcept { return cursor_; }

 private:
  size_t pread_full(uint64_t offset, std::span<uint8_t> out);

  std::filesystem::path path_;
  Measurement* stats_ = nullptr;
  int fd_ = -1;
  uint64_t size_ = 0;
  uint64_t cursor_ = 0;
  bool sequential_started_ = false;
};

/// Buffered sequential reader over an InputFile.
class SequentialReader {
 public:
  explicit SequentialReader(InputFile& file, size_t buffer_size = 1 << 20);

  /// Ensures at least n bytes are buffered past the current position unless
  /// EOF intervenes. Returns the number of bytes available.
  size_t fill(size_t n);
  std::span<const uint8_t> available() const noexcept {
    return {buffer_.data() + pos_, end_ - pos_};
  }
  void consume(size_t n) noexcept {
    pos_ += n;
    offset_ += n;
  }
  /// File offset of the first unconsumed byte.
  uint64_t offset() const noexcept { return offset_; }
  bool at_eof();

 private:
  InputFile& file_;
  std::vector<uint8_t> buffer_;
  size_t pos_ = 0;
  size_t end_ = 0;
  uint64_t offset_ = 0;
};

/// Write-only file created (truncated) on open.
class OutputFile {
 public:
  explicit OutputFile(const std::filesystem::path& path);
  ~OutputFile();

  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;

  void write(std::span<const uint8_t> data);
  void write(std::string_view data);
  uint64_t position() const noexcept { return position_; }
  void close();

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  uint64_t position_ = 0;
};

uint64_t file_size(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path, Measurement* stats = nullptr);

}  // namespace archfmt
