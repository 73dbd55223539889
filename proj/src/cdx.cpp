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

#include "archfmt/cdx.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <memory>

#include "archfmt/civil_time.hpp"
#include "archfmt/error.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/http.hpp"
#include "archfmt/parallel.hpp"
#include "archfmt/url.hpp"

namespace archfmt::cdx {
namespace {

constexpr int64_t kMinYear = 1000;
constexpr int64_t kMaxYear = 9999;

std::string escape_field(std::string_view v) {
  if (v.empty()) return "-";
  std::string out;
  out.reserve(v.size());
  for (char c : v) {
    switch (c) {
      case ' ': out += "%20"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

uint64_t parse_number(std::string_view field, uint64_t line_number, const char* what) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || p != field.data() + field.size()) {
    fail(ErrorCode::kBadFieldCount, std::string("line ") + std::to_string(line_number) +
                                        ": non-numeric " + what + " '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string canonicalize_url(std::string_view url) { return url::canonicalize(url); }

std::string urlkey_of(std::string_view uri) {
  try {
    return canonicalize_url(uri);
  } catch (const Error&) {
    std::string key(uri);
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return key;
  }
}

std::string timestamp14_of(int64_t epoch_ms) {
  // The civil sub-second field is dropped, so pre-1970 instants floor.
  int64_t whole = civil::floor_div(epoch_ms, 1000) * 1000;
  civil::DateTime dt = civil::from_epoch_ms(whole);
  if (dt.year < kMinYear || dt.year > kMaxYear) {
    fail(ErrorCode::kBadTimestamp, "year " + std::to_string(dt.year) + " outside 1000..9999");
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04lld%02d%02d%02d%02d%02d", static_cast<long long>(dt.year),
                dt.month, dt.day, dt.hour, dt.minute, dt.second);
  return buf;
}

int64_t parse_timestamp14(std::string_view ts) {
  if (ts.size() != 14) {
    fail(ErrorCode::kBadTimestamp, "'" + std::string(ts) + "' is not 14 digits");
  }
  int64_t v[6] = {};
  const int widths[6] = {4, 2, 2, 2, 2, 2};
  size_t pos = 0;
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < widths[i]; ++k, ++pos) {
      char c = ts[pos];
      if (c < '0' || c > '9') fail(ErrorCode::kBadTimestamp, "non-digit in '" + std::string(ts) + "'");
      v[i] = v[i] * 10 + (c - '0');
    }
  }
  civil::DateTime dt{v[0], static_cast<int>(v[1]), static_cast<int>(v[2]),
                     static_cast<int>(v[3]), static_cast<int>(v[4]), static_cast<int>(v[5]), 0};
  if (dt.year < kMinYear || !civil::is_valid(dt)) {
    fail(ErrorCode::kBadTimestamp, "out-of-range field in '" + std::string(ts) + "'");
  }
  return civil::to_epoch_ms(dt);
}

Entry entry_for(const warc::Record& record, const warc::RecordLocation& location) {
  Entry e;
  e.urlkey = urlkey_of(record.target_uri);
  auto ms = civil::parse_iso8601(record.warc_date_raw);
  if (!ms) {
    fail(ErrorCode::kBadDate, "record " + record.record_id + " has WARC-Date '" +
                                  record.warc_date_raw + "'");
  }
  e.timestamp14 = timestamp14_of(*ms);
  e.original_url = record.target_uri;
  auto p = http::payload_of(record);
  e.mime = p.mime;
  e.status = p.status >= 0 ? std::to_string(p.status) : "-";
  e.digest = payload_digest(p.payload);
  e.stored_length = location.stored_length;
  e.offset = location.offset;
  e.filename = location.file;
  return e;
}

std::string format_line(const Entry& e) {
  std::string line;
  line.reserve(e.urlkey.size() + e.original_url.size() + 96);
  line += escape_field(e.urlkey);
  line += ' ';
  line += escape_field(e.timestamp14);
  line += ' ';
  line += escape_field(e.original_url);
  line += ' ';
  line += escape_field(e.mime);
  line += ' ';
  line += escape_field(e.status);
  line += ' ';
  line += escape_field(e.digest);
  line += ' ';
  line += std::to_string(e.stored_length);
  line += ' ';
  line += std::to_string(e.offset);
  line += ' ';
  line += escape_field(e.filename);
  return line;
}

Entry parse_line(std::string_view line, uint64_t line_number) {
  std::string_view fields[9];
  size_t count = 0;
  size_t start = 0;
  for (;;) {
    size_t sp = line.find(' ', start);
    if (count < 9) fields[count] = line.substr(start, sp - start);
    ++count;
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  if (count != 9) {
    fail(ErrorCode::kBadFieldCount, "line " + std::to_string(line_number) + ": expected 9 fields, got " +
                                        std::to_string(count));
  }
  Entry e;
  e.urlkey = fields[0];
  e.timestamp14 = fields[1];
  try {
    parse_timestamp14(e.timestamp14);
  } catch (const Error& err) {
    fail(ErrorCode::kBadTimestamp, "line " + std::to_string(line_number) + ": " + err.what());
  }
  e.original_url = fields[2];
  e.mime = fields[3];
  e.status = fields[4];
  e.digest = fields[5];
  e.stored_length = parse_number(fields[6], line_number, "length");
  e.offset = parse_number(fields[7], line_number, "offset");
  e.filename = fields[8];
  return e;
}

bool entry_less(const Entry& a, const Entry& b) {
  if (int c = a.urlkey.compare(b.urlkey); c != 0) return c < 0;
  return a.timestamp14 < b.timestamp14;
}

uint64_t build(const std::vector<std::filesystem::path>& warc_files,
               const std::filesystem::path& out, const BuildOptions& options) {
  std::vector<std::vector<Entry>> per_file(warc_files.size());
  parallel_for(warc_files.size(), options.threads, [&](size_t i) {
    try {
      warc::Reader reader(warc_files[i], warc::Mode::kAuto);
      while (auto item = reader.next()) {
        if (options.types.count(item->first.record_type)) {
          per_file[i].push_back(entry_for(item->first, item->second));
        }
      }
    } catch (const Error& err) {
      throw Error(err.code(), "indexing " + warc_files[i].string() + ": " + err.what());
    }
  });
  std::vector<Entry> all;
  for (auto& v : per_file) {
    for (auto& e : v) all.push_back(std::move(e));
  }
  // Ties on (urlkey, timestamp14) keep input file order then offset order.
  std::stable_sort(all.begin(), all.end(), entry_less);

  OutputFile file(out);
  std::string buf;
  buf.reserve(1 << 20);
  buf += kHeaderLine;
  buf += '\n';
  for (const auto& e : all) {
    buf += format_line(e);
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      file.write(buf);
      buf.clear();
    }
  }
  file.write(buf);
  file.close();
  return all.size();
}

std::vector<Entry> parse(const std::filesystem::path& path, Measurement* stats) {
  std::string text = read_text_file(path, stats);
  std::vector<Entry> out;
  uint64_t line_number = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (line.rfind(" CDX", 0) == 0 || line.empty()) continue;
    out.push_back(parse_line(line, line_number));
  }
  return out;
}

void fetch_records(const std::vector<Entry>& entries, const std::filesystem::path& warc_dir,
                   Measurement* stats, const RecordSink& sink) {
  std::map<std::string, std::unique_ptr<InputFile>> open_files;
  for (const auto& e : entries) {
    auto& handle = open_files[e.filename];
    if (!handle) handle = std::make_unique<InputFile>(warc_dir / e.filename, stats);
    warc::Record record;
    try {
      record = warc::read_record_at(*handle, {e.filename, e.offset, e.stored_length});
    } catch (const Error& err) {
      throw Error(err.code(), std::string(err.what()) + " for CDX entry '" + format_line(e) + "'");
    }
    if (stats) ++stats->records_out;
    sink(e, std::move(record));
  }
}

std::vector<warc::Record> fetch_records(const std::vector<Entry>& entries,
                                        const std::filesystem::path& warc_dir,
                                        Measurement* stats) {
  std::vector<warc::Record> out;
  out.reserve(entries.size());
  fetch_records(entries, warc_dir, stats,
                [&](const Entry&, warc::Record&& r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace archfmt::cdx
