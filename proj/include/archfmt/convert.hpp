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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "archfmt/schema.hpp"
#include "archfmt/warc.hpp"

namespace archfmt::convert {

/// Column positions in the canonical schema.
enum Col : size_t {
  kUrlkey = 0,
  kUrl,
  kTimestamp,
  kRecordType,
  kMime,
  kStatus,
  kDigest,
  kContentLength,
  kHttpHeaders,
  kPayload,
  kColumnCount,
};

/// kString stores the raw WARC-Date text instead of epoch milliseconds; this
/// is the configuration in which timestamp statistics cannot serve a
/// numeric range filter.
enum class TimestampType { kInt64, kString };

Schema canonical_schema(TimestampType ts = TimestampType::kInt64);

struct CanonicalRecord {
  std::string urlkey;
  std::string url;
  int64_t timestamp_ms = 0;
  std::string timestamp_raw;
  std::string record_type;
  std::string mime;
  int64_t status = -1;
  std::string digest;
  int64_t content_length = 0;
  std::optional<std::string> http_headers;
  std::string payload;

  Row to_row(TimestampType ts = TimestampType::kInt64) const;
  bool operator==(const CanonicalRecord&) const = default;
};

/// Epoch milliseconds of an ISO-8601 UTC date; throws BadDate.
int64_t parse_warc_date(std::string_view s);

using TypeSet = std::set<warc::RecordType>;

/// Throws Excluded when the record's type is not in `include`.
CanonicalRecord to_canonical(const warc::Record& record,
                             const TypeSet& include = {warc::RecordType::kResponse});

enum class Target { kCarc, kRarc };
enum class SortOrder { kNone, kTimestamp, kUrlkey };

std::string_view target_name(Target t);
std::string_view sort_name(SortOrder s);
Target parse_target(std::string_view s);
SortOrder parse_sort(std::string_view s);

struct Options {
  Target target = Target::kCarc;
  SortOrder sort = SortOrder::kNone;
  TimestampType timestamp_type = TimestampType::kInt64;
  uint32_t rows_per_group = 4096;
  uint32_t rows_per_block = 1024;
  Codec codec = Codec::kGzip;
  int carc_gzip_level = 6;
  int rarc_gzip_level = 6;
  uint64_t seed = 0;
  TypeSet include{warc::RecordType::kResponse};
  unsigned threads = 1;
};

struct Manifest {
  std::vector<std::string> inputs;
  std::string schema;
  std::string sort;
  std::string codec;
  uint64_t in_count = 0;
  uint64_t out_count = 0;
  uint64_t excluded = 0;
  std::string output;

  /// "key<TAB>value" lines; repeated keys for multiple inputs.
  std::string to_text() const;
  static Manifest parse(std::string_view text);
};

std::filesystem::path manifest_path(const std::filesystem::path& output);

/// Converts WARC files to one CARC or RARC file plus `<output>.manifest`.
/// Sorted conversion keeps only sort keys and record locations in memory
/// and fetches records in order with positioned reads. Partial outputs are
/// removed on failure.
Manifest convert(const std::vector<std::filesystem::path>& warc_files,
                 const std::filesystem::path& output, const Options& options = {});

}  // namespace archfmt::convert
