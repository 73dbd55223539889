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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archfmt/io.hpp"
#include "archfmt/warc.hpp"

namespace archfmt::cdx {

inline constexpr std::string_view kHeaderLine = " CDX N b a m s k S V g";

/// One index line. Values are kept in their on-disk form ("-" for unknown).
struct Entry {
  std::string urlkey;
  std::string timestamp14;
  std::string original_url;
  std::string mime;
  std::string status;
  std::string digest;
  uint64_t stored_length = 0;
  uint64_t offset = 0;
  std::string filename;

  bool operator==(const Entry&) const = default;
};

std::string canonicalize_url(std::string_view url);
/// canonicalize_url, falling back to the lowercased URI when it is not an
/// absolute hierarchical URL (e.g. "dns:example.com").
std::string urlkey_of(std::string_view uri);

/// Whole-second UTC instant as YYYYMMDDhhmmss; sub-second part floored.
std::string timestamp14_of(int64_t epoch_ms);
int64_t parse_timestamp14(std::string_view ts);

/// Derives the index line for a record (urlkey falls back to the lowercased
/// URI for non-hierarchical targets such as "dns:").
Entry entry_for(const warc::Record& record, const warc::RecordLocation& location);

std::string format_line(const Entry& e);
Entry parse_line(std::string_view line, uint64_t line_number);

struct BuildOptions {
  std::set<warc::RecordType> types{warc::RecordType::kResponse};
  unsigned threads = 1;
};

/// Indexes the given WARC files into one sorted CDX. Returns the entry count.
uint64_t build(const std::vector<std::filesystem::path>& warc_files,
               const std::filesystem::path& out, const BuildOptions& options = {});

std::vector<Entry> parse(const std::filesystem::path& file, Measurement* stats = nullptr);

/// Strict ordering used for the CDX sort: (urlkey, timestamp14) bytewise.
bool entry_less(const Entry& a, const Entry& b);

using RecordSink = std::function<void(const Entry&, warc::Record&&)>;

/// One positioned read per entry, in entry order. Each distinct file is
/// opened once.
void fetch_records(const std::vector<Entry>& entries, const std::filesystem::path& warc_dir,
                   Measurement* stats, const RecordSink& sink);
std::vector<warc::Record> fetch_records(const std::vector<Entry>& entries,
                                        const std::filesystem::path& warc_dir,
                                        Measurement* stats = nullptr);

}  // namespace archfmt::cdx
