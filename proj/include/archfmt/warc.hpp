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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "archfmt/error.hpp"
#include "archfmt/io.hpp"

namespace archfmt::warc {

enum class RecordType { kWarcinfo, kRequest, kResponse, kMetadata, kResource, kRevisit, kOther };

std::string_view record_type_name(RecordType t);
RecordType parse_record_type(std::string_view value);

using HeaderField = std::pair<std::string, std::string>;

/// One WARC record. The typed fields mirror the raw header lines in
/// `header_fields`; both are populated by from_headers().
struct Record {
  std::string record_id;
  RecordType record_type = RecordType::kOther;
  std::string type_name;  // WARC-Type value as written; meaningful for kOther
  std::string target_uri;
  std::string warc_date_raw;
  std::string content_type;
  uint64_t content_length = 0;
  std::vector<HeaderField> header_fields;
  std::string block;

  /// Builds a record from raw header lines and a block, deriving typed
  /// fields. Throws MalformedHeader if a mandatory header is missing or
  /// Content-Length disagrees with the block.
  static Record from_headers(std::vector<HeaderField> fields, std::string block);

  /// Convenience constructor emitting the standard header set in canonical order.
  static Record make(RecordType type, std::string record_id, std::string date,
                     std::string target_uri, std::string content_type, std::string block,
                     std::vector<HeaderField> extra = {});

  /// First header value with this name (case-insensitive).
  std::optional<std::string_view> header(std::string_view name) const;

  bool operator==(const Record&) const = default;
};

/// Where a record sits in its stored file.
struct RecordLocation {
  std::string file;
  uint64_t offset = 0;
  uint64_t stored_length = 0;

  bool operator==(const RecordLocation&) const = default;
};

enum class Mode { kPlain, kMemberGzip, kAuto };

/// Sequential cursor over one WARC file.
class Reader {
 public:
  Reader(const std::filesystem::path& path, Mode mode, Measurement* stats = nullptr);
  ~Reader();
  Reader(Reader&&) noexcept;

  /// Next record, or nullopt at end of file.
  std::optional<std::pair<Record, RecordLocation>> next();
  Mode resolved_mode() const noexcept { return mode_; }

 private:
  struct State;
  std::unique_ptr<State> state_;
  Mode mode_;
};

std::vector<std::pair<Record, RecordLocation>> scan(const std::filesystem::path& path,
                                                    Mode mode = Mode::kAuto,
                                                    Measurement* stats = nullptr);

/// Reads the record at `location` with a single positioned read of
/// stored_length bytes. For repeated lookups on one file, pass an open handle.
Record read_record_at(InputFile& file, const RecordLocation& location, Mode mode = Mode::kAuto);
Record read_record_at(const std::filesystem::path& path, const RecordLocation& location,
                      Mode mode = Mode::kAuto, Measurement* stats = nullptr);

/// Parses one record from an in-memory buffer that holds exactly one record
/// (including its trailing CRLF CRLF). `where` prefixes error messages.
Record parse_record(std::string_view bytes, const std::string& where, ErrorCode misaligned);

/// Writes records as WARC/1.1. Returns one location per record.
std::vector<RecordLocation> write(const std::vector<Record>& records,
                                  const std::filesystem::path& path, Mode mode,
                                  int gzip_level = 6);

/// Incremental writer used by corpus generation and derived datasets.
class Writer {
 public:
  Writer(const std::filesystem::path& path, Mode mode, int gzip_level = 6);
  RecordLocation append(const Record& record);
  uint64_t bytes_written() const noexcept { return out_.position(); }
  void close() { out_.close(); }

 private:
  std::string name_;
  OutputFile out_;
  Mode mode_;
  int level_;
  std::string scratch_;
};

/// Serialized plain-text form of one record, including the trailing CRLF CRLF.
std::string serialize(const Record& record);

bool iequals(std::string_view a, std::string_view b) noexcept;

}  // namespace archfmt::warc
