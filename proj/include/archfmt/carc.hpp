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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "archfmt/io.hpp"
#include "archfmt/schema.hpp"

// Columnar archive container.
//
// File layout (little-endian):
//   "CARC" u16 version
//   row groups: per group, one chunk per column in schema order. A chunk is
//     (presence bitmap, 1 bit/row LSB-first) + values, compressed as a unit.
//     INT64 stores 8 bytes for every row (0 in null slots); STRING/BYTES
//     store u32 length + bytes for present rows only.
//   footer: tagged, length-prefixed sections (schema, row groups,
//     total_rows, sort_key, codec)
//   u32 CRC32(footer) | u64 footer length | "CARC"
namespace archfmt::carc {

using archfmt::Codec;

inline constexpr uint16_t kVersion = 1;
inline constexpr size_t kStatPrefixBytes = 64;

struct ChunkMeta {
  uint64_t offset = 0;
  uint64_t compressed_len = 0;
  uint64_t uncompressed_len = 0;
  uint64_t null_count = 0;
  std::optional<Scalar> min;
  std::optional<Scalar> max;

  bool operator==(const ChunkMeta&) const = default;
};

struct RowGroupMeta {
  uint64_t row_count = 0;
  std::vector<ChunkMeta> columns;

  bool operator==(const RowGroupMeta&) const = default;
};

struct Footer {
  Schema schema;
  std::vector<RowGroupMeta> row_groups;
  uint64_t total_rows = 0;
  std::optional<std::string> sort_key;
  Codec codec = Codec::kGzip;

  bool operator==(const Footer&) const = default;
};

std::string encode_footer(const Footer& footer);
Footer decode_footer(std::string_view bytes);

/// Row filter. A range is closed on both ends. When the scalar type differs
/// from the column type (e.g. an INT64 bound against a STRING timestamp
/// column) statistics cannot be used and values are cast per row.
struct ScanPredicate {
  enum class Kind { kNone, kRange, kSet };
  Kind kind = Kind::kNone;
  std::string column;
  Scalar lo;
  Scalar hi;
  std::vector<Scalar> values;

  static ScanPredicate none() { return {}; }
  static ScanPredicate range(std::string column, Scalar lo, Scalar hi);
  static ScanPredicate set(std::string column, std::vector<Scalar> values);

  bool matches(const Value& value) const;
};

struct WriteOptions {
  uint32_t rows_per_group = 4096;
  Codec codec = Codec::kGzip;
  int gzip_level = 6;
  std::optional<std::string> sort_key;
  unsigned threads = 1;
};

/// Streaming writer; rows are buffered one row group at a time.
class Writer {
 public:
  Writer(const std::filesystem::path& path, Schema schema, WriteOptions options);
  ~Writer();

  void append(Row row);
  /// Flushes the last group and writes the footer and trailer.
  Footer finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Footer write(const std::vector<Row>& rows, const Schema& schema,
             const std::filesystem::path& path, const WriteOptions& options = {});

/// Reads the trailer and footer (two positioned reads).
Footer read_footer(InputFile& file, uint64_t* footer_bytes = nullptr);
Footer read_footer(const std::filesystem::path& path);

/// Indices of row groups whose statistics admit a match. Pure.
std::vector<size_t> plan_row_groups(const Footer& footer, const ScanPredicate& pred);

using RowSink = std::function<void(Row&&)>;

struct ScanStats {
  std::vector<size_t> planned_groups;
  uint64_t footer_bytes = 0;
};

/// Yields the projected values (in projection order) of every row that
/// satisfies `pred`, reading only planned groups and only the chunks of
/// projected and predicate columns.
ScanStats scan(const std::filesystem::path& path, const std::vector<std::string>& projection,
               const ScanPredicate& pred, Measurement* stats, const RowSink& sink);

struct ReadResult {
  std::vector<Row> rows;
  Measurement measurement;
  ScanStats scan;
};

ReadResult read(const std::filesystem::path& path, const std::vector<std::string>& projection,
                const ScanPredicate& pred = {});

/// Matching row count. Without a predicate only the footer is read.
uint64_t count(const std::filesystem::path& path, const ScanPredicate& pred, Measurement* stats);

/// Three-way comparison for same-typed scalars.
int compare(const Scalar& a, const Scalar& b);

/// Truncated lower / rounded-up upper bounds for long strings.
std::string truncate_min(std::string_view v);
std::optional<std::string> truncate_max(std::string_view v);

}  // namespace archfmt::carc
