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

#include "archfmt/convert.hpp"

#include <algorithm>
#include <charconv>
#include <memory>

#include "archfmt/carc.hpp"
#include "archfmt/cdx.hpp"
#include "archfmt/civil_time.hpp"
#include "archfmt/error.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/http.hpp"
#include "archfmt/rarc.hpp"

namespace archfmt::convert {

Schema canonical_schema(TimestampType ts) {
  ColumnType ts_type = ts == TimestampType::kInt64 ? ColumnType::kInt64 : ColumnType::kString;
  return Schema({{"urlkey", ColumnType::kString, false},
                 {"url", ColumnType::kString, false},
                 {"timestamp", ts_type, false},
                 {"record_type", ColumnType::kString, false},
                 {"mime", ColumnType::kString, false},
                 {"status", ColumnType::kInt64, false},
                 {"digest", ColumnType::kString, false},
                 {"content_length", ColumnType::kInt64, false},
                 {"http_headers", ColumnType::kString, true},
                 {"payload", ColumnType::kBytes, false}});
}

Row CanonicalRecord::to_row(TimestampType ts) const {
  Row row;
  row.reserve(kColumnCount);
  row.emplace_back(urlkey);
  row.emplace_back(url);
  if (ts == TimestampType::kInt64) {
    row.emplace_back(timestamp_ms);
  } else {
    row.emplace_back(timestamp_raw);
  }
  row.emplace_back(record_type);
  row.emplace_back(mime);
  row.emplace_back(status);
  row.emplace_back(digest);
  row.emplace_back(content_length);
  row.push_back(http_headers ? Value(*http_headers) : Value());
  row.emplace_back(payload);
  return row;
}

int64_t parse_warc_date(std::string_view s) {
  auto ms = civil::parse_iso8601(s);
  if (!ms) fail(ErrorCode::kBadDate, "unparseable WARC-Date '" + std::string(s) + "'");
  return *ms;
}

CanonicalRecord to_canonical(const warc::Record& record, const TypeSet& include) {
  if (!include.count(record.record_type)) {
    fail(ErrorCode::kExcluded, "record " + record.record_id + " of type " + record.type_name +
                                   " is not in the include set");
  }
  CanonicalRecord c;
  c.url = record.target_uri;
  c.urlkey = c.url.empty() ? std::string() : cdx::urlkey_of(c.url);
  c.timestamp_raw = record.warc_date_raw;
  c.timestamp_ms = parse_warc_date(record.warc_date_raw);
  c.record_type = record.record_type == warc::RecordType::kOther
                      ? record.type_name
                      : std::string(warc::record_type_name(record.record_type));
  auto p = http::payload_of(record);
  c.mime = p.mime;
  c.status = p.status;
  c.payload = std::string(p.payload);
  c.digest = payload_digest(c.payload);
  c.content_length = static_cast<int64_t>(c.payload.size());
  if (p.has_http) c.http_headers = std::string(p.http_headers);
  return c;
}

std::string_view target_name(Target t) { return t == Target::kCarc ? "carc" : "rarc"; }

std::string_view sort_name(SortOrder s) {
  switch (s) {
    case SortOrder::kNone: return "none";
    case SortOrder::kTimestamp: return "timestamp";
    case SortOrder::kUrlkey: return "urlkey";
  }
  return "none";
}

Target parse_target(std::string_view s) {
  if (s == "carc") return Target::kCarc;
  if (s == "rarc") return Target::kRarc;
  fail(ErrorCode::kUsage, "unknown target '" + std::string(s) + "'");
}

SortOrder parse_sort(std::string_view s) {
  for (auto o : {SortOrder::kNone, SortOrder::kTimestamp, SortOrder::kUrlkey}) {
    if (s == sort_name(o)) return o;
  }
  fail(ErrorCode::kUsage, "unknown sort '" + std::string(s) + "'");
}

std::string Manifest::to_text() const {
  std::string out;
  for (const auto& in : inputs) out += "input\t" + in + "\n";
  out += "schema\t" + schema + "\n";
  out += "sort\t" + sort + "\n";
  out += "codec\t" + codec + "\n";
  out += "in_count\t" + std::to_string(in_count) + "\n";
  out += "out_count\t" + std::to_string(out_count) + "\n";
  out += "excluded\t" + std::to_string(excluded) + "\n";
  out += "output\t" + output + "\n";
  return out;
}

Manifest Manifest::parse(std::string_view text) {
  Manifest m;
  auto number = [](std::string_view v) {
    uint64_t n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || p != v.data() + v.size()) {
      fail(ErrorCode::kBadFieldCount, "non-numeric manifest value '" + std::string(v) + "'");
    }
    return n;
  };
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      fail(ErrorCode::kBadFieldCount, "manifest line without tab: '" + std::string(line) + "'");
    }
    std::string_view key = line.substr(0, tab), value = line.substr(tab + 1);
    if (key == "input") m.inputs.emplace_back(value);
    else if (key == "schema") m.schema = value;
    else if (key == "sort") m.sort = value;
    else if (key == "codec") m.codec = value;
    else if (key == "in_count") m.in_count = number(value);
    else if (key == "out_count") m.out_count = number(value);
    else if (key == "excluded") m.excluded = number(value);
    else if (key == "output") m.output = value;
  }
  return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest";
  return p;
}

namespace {

/// Uniform append interface over the two container writers.
class Sink {
 public:
  Sink(const std::filesystem::path& output, const Schema& schema, const Options& o) {
    if (o.target == Target::kCarc) {
      carc::WriteOptions w;
      w.rows_per_group = o.rows_per_group;
      w.codec = o.codec;
      w.gzip_level = o.carc_gzip_level;
      w.threads = o.threads;
      if (o.sort == SortOrder::kUrlkey) w.sort_key = "urlkey";
      // Raw date strings do not sort chronologically in general, so the
      // sort is only declared for the typed column.
      if (o.sort == SortOrder::kTimestamp && o.timestamp_type == TimestampType::kInt64) {
        w.sort_key = "timestamp";
      }
      carc_ = std::make_unique<carc::Writer>(output, schema, w);
    } else {
      rarc::WriteOptions w;
      w.rows_per_block = o.rows_per_block;
      w.codec = o.codec;
      w.gzip_level = o.rarc_gzip_level;
      w.seed = o.seed;
      rarc_ = std::make_unique<rarc::Writer>(output, schema, w);
    }
  }

  void append(Row row) {
    if (carc_) carc_->append(std::move(row));
    else rarc_->append(std::move(row));
  }

  void finish() {
    if (carc_) carc_->finish();
    else rarc_->finish();
  }

 private:
  std::unique_ptr<carc::Writer> carc_;
  std::unique_ptr<rarc::Writer> rarc_;
};

struct SortItem {
  int64_t timestamp_ms;
  std::string urlkey;
  uint32_t file;
  uint64_t offset;
  uint64_t stored_length;
};

}  // namespace

Manifest convert(const std::vector<std::filesystem::path>& warc_files,
                 const std::filesystem::path& output, const Options& options) {
  Manifest m;
  for (const auto& f : warc_files) m.inputs.push_back(f.string());
  Schema schema = canonical_schema(options.timestamp_type);
  m.schema = schema.to_text();
  m.sort = sort_name(options.sort);
  m.codec = codec_name(options.codec);
  m.output = output.string();
  try {
    Sink sink(output, schema, options);
    if (options.sort == SortOrder::kNone) {
      for (const auto& file : warc_files) {
        warc::Reader reader(file, warc::Mode::kAuto);
        while (auto item = reader.next()) {
          ++m.in_count;
          if (!options.include.count(item->first.record_type)) continue;
          sink.append(to_canonical(item->first, options.include).to_row(options.timestamp_type));
          ++m.out_count;
        }
      }
    } else {
      std::vector<SortItem> items;
      for (uint32_t i = 0; i < warc_files.size(); ++i) {
        warc::Reader reader(warc_files[i], warc::Mode::kAuto);
        while (auto item = reader.next()) {
          ++m.in_count;
          const auto& r = item->first;
          if (!options.include.count(r.record_type)) continue;
          SortItem s{parse_warc_date(r.warc_date_raw),
                     r.target_uri.empty() ? std::string() : cdx::urlkey_of(r.target_uri), i,
                     item->second.offset, item->second.stored_length};
          items.push_back(std::move(s));
        }
      }
      if (options.sort == SortOrder::kTimestamp) {
        std::stable_sort(items.begin(), items.end(), [](const SortItem& a, const SortItem& b) {
          return a.timestamp_ms < b.timestamp_ms;
        });
      } else {
        std::stable_sort(items.begin(), items.end(), [](const SortItem& a, const SortItem& b) {
          if (int c = a.urlkey.compare(b.urlkey); c != 0) return c < 0;
          return a.timestamp_ms < b.timestamp_ms;
        });
      }
      std::vector<std::unique_ptr<InputFile>> handles(warc_files.size());
      for (const auto& s : items) {
        auto& h = handles[s.file];
        if (!h) h = std::make_unique<InputFile>(warc_files[s.file], nullptr);
        auto record = warc::read_record_at(*h, {warc_files[s.file].filename().string(), s.offset,
                                                s.stored_length});
        sink.append(to_canonical(record, options.include).to_row(options.timestamp_type));
        ++m.out_count;
      }
    }
    m.excluded = m.in_count - m.out_count;
    sink.finish();
    OutputFile mf(manifest_path(output));
    mf.write(m.to_text());
    mf.close();
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(output, ec);
    std::filesystem::remove(manifest_path(output), ec);
    throw;
  }
  return m;
}

}  // namespace archfmt::convert
