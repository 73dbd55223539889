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
#include <string>
#include <vector>

#include "archfmt/convert.hpp"
#include "archfmt/io.hpp"
#include "archfmt/schema.hpp"

namespace archfmt::query {

enum class Kind { kCount, kMeta, kRecords, kScanExtract };
enum class Backend { kWarc, kWarcCdx, kCarc, kRarc };
enum class Extractor { kText, kLinks };

std::string_view kind_name(Kind k);
std::string_view backend_name(Backend b);
std::string_view extractor_name(Extractor e);
Kind parse_kind(std::string_view s);
Backend parse_backend(std::string_view s);
Extractor parse_extractor(std::string_view s);

inline constexpr Backend kAllBackends[] = {Backend::kWarc, Backend::kWarcCdx, Backend::kCarc,
                                           Backend::kRarc};

/// Filter on capture time (closed range, epoch ms) or on urlkey membership.
struct Predicate {
  enum class Type { kNone, kTimeRange, kUrlList };
  Type type = Type::kNone;
  int64_t lo_ms = 0;
  int64_t hi_ms = 0;
  std::vector<std::string> urlkeys;

  static Predicate none() { return {}; }
  static Predicate time_range(int64_t lo_ms, int64_t hi_ms);
  static Predicate url_list(std::vector<std::string> urlkeys);

  bool matches(std::string_view urlkey, int64_t timestamp_ms) const;
};

/// Metadata columns a meta query may project. "record_type" and
/// "content_length" are not carried by CDX lines.
inline constexpr std::string_view kMetaColumns[] = {"urlkey", "url",    "timestamp",
                                                    "record_type", "mime", "status",
                                                    "digest", "content_length"};

struct QuerySpec {
  Kind kind = Kind::kCount;
  Predicate predicate;
  std::vector<std::string> projection;  // meta only
  Extractor extractor = Extractor::kText;
};

/// Artifacts one corpus was converted into. Empty paths mark a missing
/// backend. CDX filenames resolve against warc_dir.
struct Dataset {
  std::vector<std::filesystem::path> warc_files;
  std::filesystem::path warc_dir;
  std::filesystem::path cdx;
  std::filesystem::path carc;
  std::filesystem::path rarc;
};

struct QueryOptions {
  /// When false, matched rows are counted and digested but not kept.
  bool materialize = true;
  convert::TypeSet include{warc::RecordType::kResponse};
};

/// Identity of a matched record: the canonical sort key.
struct RecordId {
  std::string urlkey;
  int64_t timestamp_ms = 0;
  std::string digest;

  auto operator<=>(const RecordId&) const = default;
};

struct QueryResult {
  Backend backend = Backend::kWarc;
  uint64_t count = 0;
  std::vector<Row> meta_rows;                       // meta: projection order
  std::vector<convert::CanonicalRecord> records;    // records
  std::vector<RecordId> ids;                        // meta/records, canonical order
  Measurement measurement;
  std::string record_ids_digest;
};

/// SHA-1 (hex) over the canonically sorted identities. Count queries digest
/// "count:<n>" instead, since no identities are produced.
std::string digest_ids(std::vector<RecordId>& ids);
std::string digest_count(uint64_t n);

QueryResult run_query(const QuerySpec& spec, Backend backend, const Dataset& data,
                      const QueryOptions& options = {});

struct ExtractResult {
  uint64_t rows = 0;
  Measurement measurement;
};

/// One "digest<TAB>text" line per HTML record, sorted by (urlkey,
/// timestamp, digest, text). Tabs, newlines and backslashes in the text
/// are escaped; link lists are joined with an escaped newline.
ExtractResult scan_extract(Backend backend, const Dataset& data, Extractor extractor,
                           const std::filesystem::path& out, const QueryOptions& options = {});

std::string escape_field(std::string_view s);

}  // namespace archfmt::query
