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

#include "archfmt/io.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "archfmt/error.hpp"

namespace archfmt {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kGzipCorrupt: return "GzipCorrupt";
    case ErrorCode::kBadOffset: return "BadOffset";
    case ErrorCode::kNotAbsoluteUrl: return "NotAbsoluteUrl";
    case ErrorCode::kBadFieldCount: return "BadFieldCount";
    case ErrorCode::kBadTimestamp: return "BadTimestamp";
    case ErrorCode::kBadDate: return "BadDate";
    case ErrorCode::kUnsortedInput: return "UnsortedInput";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kStatlessColumn: return "StatlessColumn";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kFooterCorrupt: return "FooterCorrupt";
    case ErrorCode::kDecompressFailure: return "DecompressFailure";
    case ErrorCode::kSyncLost: return "SyncLost";
    case ErrorCode::kExcluded: return "Excluded";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kUnachievable: return "Unachievable";
    case ErrorCode::kEquivalenceFailure: return "EquivalenceFailure";
    case ErrorCode::kBadCsv: return "BadCsv";
    case ErrorCode::kUsage: return "Usage";
  }
  return "Unknown";
}

Measurement& Measurement::operator+=(const Measurement& other) {
  wall_ms += other.wall_ms;
  bytes_read += other.bytes_read;
  seek_count += other.seek_count;
  open_count += other.open_count;
  records_out += other.records_out;
  return *this;
}

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& path) {
  fail(ErrorCode::kIoFailure, what + " " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

InputFile::InputFile(const std::filesystem::path& path, Measurement* stats)
    : path_(path), stats_(stats) {
  fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd_ < 0) io_fail("cannot open", path);
  struct stat st {};
  if (::fstat(fd_, &st) != 0) {
    ::close(fd_);
    fd_ = -1;
    io_fail("cannot stat", path);
  }
  size_ = static_cast<uint64_t>(st.st_size);
  if (stats_) ++stats_->open_count;
}

InputFile::~InputFile() {
  if (fd_ >= 0) ::close(fd_);
}

InputFile::InputFile(InputFile&& other) noexcept
    : path_(std::move(other.path_)),
      stats_(other.stats_),
      fd_(other.fd_),
      size_(other.size_),
      cursor_(other.cursor_),
      sequential_started_(other.sequential_started_) {
  other.fd_ = -1;
}

InputFile& InputFile::operator=(InputFile&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    stats_ = other.stats_;
    fd_ = other.fd_;
    size_ = other.size_;
    cursor_ = other.cursor_;
    sequential_started_ = other.sequential_started_;
    other.fd_ = -1;
  }
  return *this;
}

size_t InputFile::pread_full(uint64_t offset, std::span<uint8_t> out) {
  size_t done = 0;
  while (done < out.size()) {
    ssize_t n = ::pread(fd_, out.data() + done, out.size() - done,
                        static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("read failed on", path_);
    }
    if (n == 0) break;
    done += static_cast<size_t>(n);
  }
  if (stats_) stats_->bytes_read += done;
  return done;
}

size_t InputFile::read_at(uint64_t offset, std::span<uint8_t> out) {
  if (stats_) ++stats_->seek_count;
  sequential_started_ = false;
  size_t n = pread_full(offset, out);
  cursor_ = offset + n;
  return n;
}

std::vector<uint8_t> InputFile::read_at(uint64_t offset, size_t length) {
  std::vector<uint8_t> out(length);
  out.resize(read_at(offset, std::span<uint8_t>(out)));
  return out;
}

size_t InputFile::read_next(std::span<uint8_t> out) {
  if (!sequential_started_) {
    if (stats_) ++stats_->seek_count;
    sequential_started_ = true;
  }
  size_t n = pread_full(cursor_, out);
  cursor_ += n;
  return n;
}

void InputFile::rewind_to(uint64_t offset) {
  cursor_ = offset;
  sequential_started_ = false;
}

SequentialReader::SequentialReader(InputFile& file, size_t buffer_size)
    : file_(file), offset_(file.cursor()) {
  buffer_.resize(buffer_size);
}

size_t SequentialReader::fill(size_t n) {
  if (end_ - pos_ >= n) return end_ - pos_;
  // Compact, then grow if one request exceeds the buffer.
  if (pos_ > 0) {
    std::memmove(buffer_.data(), buffer_.data() + pos_, end_ - pos_);
    end_ -= pos_;
    pos_ = 0;
  }
  if (buffer_.size() < n) buffer_.resize(n);
  while (end_ < n) {
    size_t want = buffer_.size() - end_;
    size_t got = file_.read_next(std::span<uint8_t>(buffer_.data() + end_, want));
    if (got == 0) break;
    end_ += got;
  }
  return end_ - pos_;
}

bool SequentialReader::at_eof() { return fill(1) == 0; }

OutputFile::OutputFile(const std::filesystem::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd_ < 0) io_fail("cannot create", path);
}

OutputFile::~OutputFile() {
  if (fd_ >= 0) ::close(fd_);
}

void OutputFile::write(std::span<const uint8_t> data) {
  size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write failed on", path_);
    }
    done += static_cast<size_t>(n);
  }
  position_ += data.size();
}

void OutputFile::write(std::string_view data) {
  write(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

void OutputFile::close() {
  if (fd_ >= 0) {
    if (::close(fd_) != 0) {
      fd_ = -1;
      io_fail("close failed on", path_);
    }
    fd_ = -1;
  }
}

uint64_t file_size(const std::filesystem::path& path) {
  std::error_code ec;
  auto n = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot stat " + path.string() + ": " + ec.message());
  return n;
}

std::string read_text_file(const std::filesystem::path& path, Measurement* stats) {
  InputFile file(path, stats);
  std::string out(file.size(), '\0');
  size_t n = file.read_next(
      std::span<uint8_t>(reinterpret_cast<uint8_t*>(out.data()), out.size()));
  out.resize(n);
  return out;
}

}  // namespace archfmt
