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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "archfmt/io.hpp"
#include "archfmt/schema.hpp"

// Row-binary archive container.
//
// File layout (little-endian):
//   "RARC" u16 version | u8 codec | u32 schema_text length | schema_text |
//   16-byte sync marker
//   blocks: u32 record_count | u64 uncompressed_len | u64 compressed_len |
//           payload | sync marker
//
// A block "starts" at the byte after the marker that precedes it. Split
// readers claim the blocks whose start falls inside their byte range.
namespace archfmt::rarc {

inline constexpr uint16_t kVersion = 1;
inline constexpr size_t kSyncBytes = 16;
inline constexpr size_t kBlockHeaderBytes = 20;

using SyncMarker = std::array<uint8_t, kSyncBytes>;

/// Deterministic marker for a seed.
SyncMarker sync_marker_for(uint64_t seed);

struct Header {
  Schema schema;
  Codec codec = Codec::kGzip;
  SyncMarker sync{};
  /// Offset of the first block.
  uint64_t length = 0;
};

struct WriteOptions {
  uint32_t rows_per_block = 1024;
  Codec codec = Codec::kGzip;
  int gzip_level = 6;
  uint64_t seed = 0;
};

class Writer {
 public:
  Writer(const std::filesystem::path& path, Schema schema, WriteOptions options);
  ~Writer();

  void append(Row row);
  /// Flushes the final block. Returns the number of blocks written.
  uint64_t finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

uint64_t write(const std::vector<Row>& rows, const Schema& schema,
               const std::filesystem::path& path, const WriteOptions& options = {});

Header read_header(const std::filesystem::path& path);

/// Encodes rows into one block payload (before compression), and back.
std::string encode_records(const Schema& schema, const std::vector<Row>& rows);
std::vector<Row> decode_records(const Schema& schema, std::string_view payload, uint32_t count);

using RowSink = std::function<void(Row&&)>;

/// Sequential read of every block in one pass. Rows of each complete block
/// reach the sink before a truncation or marker mismatch raises SyncLost.
Header scan(const std::filesystem::path& path, Measurement* stats, const RowSink& sink);

/// Rows of every block whose start lies in [start, end), found by searching
/// for the sync marker from `start`.
Header resync(const std::filesystem::path& path, uint64_t start, uint64_t end,
              Measurement* stats, const RowSink& sink);
Header resync(const std::filesystem::path& path, uint64_t start, Measurement* stats,
              const RowSink& sink);

struct ReadResult {
  std::vector<Row> rows;
  Measurement measurement;
  Header header;
};

ReadResult read(const std::filesystem::path& path);

}  // namespace archfmt::rarc
