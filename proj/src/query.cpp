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

#include "archfmt/query.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "archfmt/carc.hpp"
#include "archfmt/cdx.hpp"
#include "archfmt/civil_time.hpp"
#include "archfmt/error.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/html.hpp"
#include "archfmt/http.hpp"
#include "archfmt/rarc.hpp"

namespace archfmt::query {

using convert::CanonicalRecord;

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::kCount: return "count";
    case Kind::kMeta: return "meta";
    case Kind::kRecords: return "records";
    case Kind::kScanExtract: return "scan_extract";
  }
  return "count";
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kWarc: return "warc";
    case Backend::kWarcCdx: return "warc_cdx";
    case Backend::kCarc: return "carc";
    case Backend::kRarc: return "rarc";
  }
  return "warc";
}

std::string_view extractor_name(Extractor e) { return e == Extractor::kText ? "text" : "links"; }

Kind parse_kind(std::string_view s) {
  for (auto k : {Kind::kCount, Kind::kMeta, Kind::kRecords, Kind::kScanExtract}) {
    if (s == kind_name(k)) return k;
  }
  fail(ErrorCode::kUsage, "unknown query kind '" + std::string(s) + "'");
}

Backend parse_backend(std::string_view s) {
  for (auto b : kAllBackends) {
    if (s == backend_name(b)) return b;
  }
  fail(ErrorCode::kUsage, "unknown backend '" + std::string(s) + "'");
}

Extractor parse_extractor(std::string_view s) {
  if (s == "text") return Extractor::kText;
  if (s == "links") return Extractor::kLinks;
  fail(ErrorCode::kUsage, "unknown extractor '" + std::string(s) + "'");
}

Predicate Predicate::time_range(int64_t lo_ms, int64_t hi_ms) {
  Predicate p;
  p.type = Type::kTimeRange;
  p.lo_ms = lo_ms;
  p.hi_ms = hi_ms;
  return p;
}

Predicate Predicate::url_list(std::vector<std::string> urlkeys) {
  Predicate p;
  p.type = Type::kUrlList;
  std::sort(urlkeys.begin(), urlkeys.end());
  urlkeys.erase(std::unique(urlkeys.begin(), urlkeys.end()), urlkeys.end());
  p.urlkeys = std::move(urlkeys);
  return p;
}

bool Predicate::matches(std::string_view urlkey, int64_t timestamp_ms) const {
  switch (type) {
    case Type::kNone: return true;
    case Type::kTimeRange: return timestamp_ms >= lo_ms && timestamp_ms <= hi_ms;
    case Type::kUrlList: return std::binary_search(urlkeys.begin(), urlkeys.end(), urlkey);
  }
  return false;
}

std::string digest_ids(std::vector<RecordId>& ids) {
  std::sort(ids.begin(), ids.end());
  Sha1Builder b;
  for (const auto& id : ids) {
    b.update(id.urlkey);
    b.update("\t");
    b.update(std::to_string(id.timestamp_ms));
    b.update("\t");
    b.update(id.digest);
    b.update("\n");
  }
  return hex(b.finish());
}

std::string digest_count(uint64_t n) { return hex(sha1("count:" + std::to_string(n))); }

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace {

using Visitor = std::function<void(CanonicalRecord&&)>;

/// Which canonical fields a visit must populate.
struct Needs {
  bool digest = true;
  bool full = false;      // every field, including payload
  bool extract = false;   // url, mime, payload
  std::vector<std::string> meta;
};

Needs needs_for(const QuerySpec& spec) {
  Needs n;
  switch (spec.kind) {
    case Kind::kCount: n.digest = false; break;
    case Kind::kMeta: n.meta = spec.projection; break;
    case Kind::kRecords: n.full = true; break;
    case Kind::kScanExtract: n.extract = true; break;
  }
  for (const auto& c : n.meta) {
    if (std::find(std::begin(kMetaColumns), std::end(kMetaColumns), c) == std::end(kMetaColumns)) {
      fail(ErrorCode::kUnknownColumn, "'" + c + "' is not a metadata column");
    }
  }
  return n;
}

void require(const std::filesystem::path& p, Backend b, const char* what) {
  if (p.empty() || !std::filesystem::exists(p)) {
    fail(ErrorCode::kBackendUnavailable, std::string(backend_name(b)) + " backend needs a " + what +
                                             (p.empty() ? std::string() : " at " + p.string()));
  }
}

// Full sequential scan of the WARC files with an in-memory filter.
void visit_warc(const QuerySpec& spec, const Dataset& data, const Needs& needs,
                const QueryOptions& opts, Measurement& m, const Visitor& fn) {
  if (data.warc_files.empty()) {
    fail(ErrorCode::kBackendUnavailable, "warc backend needs WARC files");
  }
  for (const auto& file : data.warc_files) {
    warc::Reader reader(file, warc::Mode::kAuto, &m);
    while (auto item = reader.next()) {
      const warc::Record& r = item->first;
      if (!opts.include.count(r.record_type)) continue;
      if (!needs.digest) {
        std::string key = r.target_uri.empty() ? std::string() : cdx::urlkey_of(r.target_uri);
        int64_t ts = convert::parse_warc_date(r.warc_date_raw);
        if (!spec.predicate.matches(key, ts)) continue;
        CanonicalRecord c;
        c.urlkey = std::move(key);
        c.timestamp_ms = ts;
        fn(std::move(c));
        continue;
      }
      CanonicalRecord c = convert::to_canonical(r, opts.include);
      if (!spec.predicate.matches(c.urlkey, c.timestamp_ms)) continue;
      fn(std::move(c));
    }
  }
}

int64_t cdx_status(std::string_view s) {
  if (s == "-") return -1;
  int64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return -1;
    v = v * 10 + (c - '0');
  }
  return v;
}

void visit_cdx(const QuerySpec& spec, const Dataset& data, const Needs& needs,
               const QueryOptions& opts, Measurement& m, const Visitor& fn) {
  require(data.cdx, Backend::kWarcCdx, "CDX index");
  for (const auto& c : needs.meta) {
    if (c == "record_type" || c == "content_length") {
      fail(ErrorCode::kUnknownColumn, "CDX lines do not carry '" + c + "'");
    }
  }
  auto entries = cdx::parse(data.cdx, &m);
  std::vector<cdx::Entry> matched;
  for (auto& e : entries) {
    if (spec.predicate.matches(e.urlkey, cdx::parse_timestamp14(e.timestamp14))) {
      matched.push_back(std::move(e));
    }
  }
  if (!needs.full && !needs.extract) {
    for (auto& e : matched) {
      CanonicalRecord c;
      c.timestamp_ms = cdx::parse_timestamp14(e.timestamp14);
      c.urlkey = std::move(e.urlkey);
      c.url = std::move(e.original_url);
      c.mime = e.mime == "-" ? std::string() : std::move(e.mime);
      c.status = cdx_status(e.status);
      c.digest = std::move(e.digest);
      fn(std::move(c));
    }
    return;
  }
  cdx::fetch_records(matched, data.warc_dir, &m, [&](const cdx::Entry&, warc::Record&& r) {
    fn(convert::to_canonical(r, opts.include));
  });
}

CanonicalRecord from_columns(const std::vector<std::string>& names, Row&& row) {
  CanonicalRecord c;
  for (size_t i = 0; i < names.size(); ++i) {
    Value& v = row[i];
    const std::string& n = names[i];
    if (n == "http_headers") {
      if (v) c.http_headers = std::move(std::get<std::string>(*v));
      continue;
    }
    if (!v) continue;
    if (n == "timestamp") {
      if (auto* ms = std::get_if<int64_t>(&*v)) {
        c.timestamp_ms = *ms;
        c.timestamp_raw = civil::format_iso8601(*ms);
      } else {
        c.timestamp_raw = std::get<std::string>(*v);
        c.timestamp_ms = convert::parse_warc_date(c.timestamp_raw);
      }
    } else if (n == "status") {
      c.status = std::get<int64_t>(*v);
    } else if (n == "content_length") {
      c.content_length = std::get<int64_t>(*v);
    } else {
      std::string& s = std::get<std::string>(*v);
      if (n == "urlkey") c.urlkey = std::move(s);
      else if (n == "url") c.url = std::move(s);
      else if (n == "record_type") c.record_type = std::move(s);
      else if (n == "mime") c.mime = std::move(s);
      else if (n == "digest") c.digest = std::move(s);
      else if (n == "payload") c.payload = std::move(s);
    }
  }
  return c;
}

carc::ScanPredicate to_scan_predicate(const Predicate& p) {
  switch (p.type) {
    case Predicate::Type::kNone: return carc::ScanPredicate::none();
    case Predicate::Type::kTimeRange:
      return carc::ScanPredicate::range("timestamp", p.lo_ms, p.hi_ms);
    case Predicate::Type::kUrlList: {
      std::vector<Scalar> keys(p.urlkeys.begin(), p.urlkeys.end());
      return carc::ScanPredicate::set("urlkey", std::move(keys));
    }
  }
  return carc::ScanPredicate::none();
}

void visit_carc(const QuerySpec& spec, const Dataset& data, const Needs& needs,
                const QueryOptions&, Measurement& m, const Visitor& fn) {
  require(data.carc, Backend::kCarc, "CARC file");
  std::vector<std::string> cols;
  auto add = [&](std::string_view c) {
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.emplace_back(c);
  };
  if (needs.full) {
    Schema schema = convert::canonical_schema();
    for (const auto& c : schema.columns()) add(c.name);
  } else {
    add("urlkey");
    add("timestamp");
    if (needs.digest) add("digest");
    for (const auto& c : needs.meta) add(c);
    if (needs.extract) {
      add("url");
      add("mime");
      add("payload");
    }
  }
  carc::scan(data.carc, cols, to_scan_predicate(spec.predicate), &m,
             [&](Row&& row) { fn(from_columns(cols, std::move(row))); });
}

void visit_rarc(const QuerySpec& spec, const Dataset& data, const Needs&, const QueryOptions&,
                Measurement& m, const Visitor& fn) {
  require(data.rarc, Backend::kRarc, "RARC file");
  std::vector<std::string> names;
  // Row-binary files decode whole records; the filter runs after decoding.
  rarc::Header h = rarc::read_header(data.rarc);
  for (const auto& c : h.schema.columns()) names.push_back(c.name);
  Measurement scan_stats;
  rarc::scan(data.rarc, &scan_stats, [&](Row&& row) {
    CanonicalRecord c = from_columns(names, std::move(row));
    if (spec.predicate.matches(c.urlkey, c.timestamp_ms)) fn(std::move(c));
  });
  scan_stats.records_out = 0;
  m += scan_stats;
}

void visit(Backend backend, const QuerySpec& spec, const Dataset& data, const Needs& needs,
           const QueryOptions& opts, Measurement& m, const Visitor& fn) {
  switch (backend) {
    case Backend::kWarc: visit_warc(spec, data, needs, opts, m, fn); break;
    case Backend::kWarcCdx: visit_cdx(spec, data, needs, opts, m, fn); break;
    case Backend::kCarc: visit_carc(spec, data, needs, opts, m, fn); break;
    case Backend::kRarc: visit_rarc(spec, data, needs, opts, m, fn); break;
  }
}

Value meta_value(const CanonicalRecord& c, std::string_view col) {
  if (col == "urlkey") return c.urlkey;
  if (col == "url") return c.url;
  if (col == "timestamp") return c.timestamp_ms;
  if (col == "record_type") return c.record_type;
  if (col == "mime") return c.mime;
  if (col == "status") return c.status;
  if (col == "digest") return c.digest;
  return c.content_length;
}

template <class T>
std::vector<T> permuted(std::vector<T> v, const std::vector<size_t>& order) {
  std::vector<T> out;
  out.reserve(v.size());
  for (size_t i : order) out.push_back(std::move(v[i]));
  return out;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

QueryResult run_query(const QuerySpec& spec, Backend backend, const Dataset& data,
                      const QueryOptions& options) {
  if (spec.kind == Kind::kScanExtract) {
    fail(ErrorCode::kUsage, "scan_extract queries produce a derived file; use scan_extract()");
  }
  QueryResult result;
  result.backend = backend;
  Needs needs = needs_for(spec);
  Measurement& m = result.measurement;
  auto start = Clock::now();

  if (spec.kind == Kind::kCount && backend == Backend::kCarc) {
    require(data.carc, backend, "CARC file");
    result.count = carc::count(data.carc, to_scan_predicate(spec.predicate), &m);
  } else {
    visit(backend, spec, data, needs, options, m, [&](CanonicalRecord&& c) {
      ++result.count;
      if (spec.kind == Kind::kCount) return;
      result.ids.push_back({c.urlkey, c.timestamp_ms, c.digest});
      if (!options.materialize) return;
      if (spec.kind == Kind::kMeta) {
        Row row;
        for (const auto& col : spec.projection) row.push_back(meta_value(c, col));
        result.meta_rows.push_back(std::move(row));
      } else {
        result.records.push_back(std::move(c));
      }
    });
  }
  m.records_out = result.count;
  m.wall_ms = elapsed_ms(start);
  if (spec.kind == Kind::kCount) {
    result.record_ids_digest = digest_count(result.count);
  } else {
    // Backends visit records in storage order; results use the canonical order.
    std::vector<size_t> order(result.ids.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return result.ids[a] < result.ids[b]; });
    result.ids = permuted(std::move(result.ids), order);
    if (!result.meta_rows.empty()) result.meta_rows = permuted(std::move(result.meta_rows), order);
    if (!result.records.empty()) result.records = permuted(std::move(result.records), order);
    result.record_ids_digest = digest_ids(result.ids);
  }
  if (!options.materialize) result.ids.clear();
  return result;
}

ExtractResult scan_extract(Backend backend, const Dataset& data, Extractor extractor,
                           const std::filesystem::path& out, const QueryOptions& options) {
  QuerySpec spec;
  spec.kind = Kind::kScanExtract;
  spec.extractor = extractor;
  Needs needs = needs_for(spec);
  ExtractResult result;
  Measurement& m = result.measurement;
  auto start = Clock::now();

  struct Line {
    RecordId id;
    std::string text;
    bool operator<(const Line& o) const {
      if (id != o.id) return id < o.id;
      return text < o.text;
    }
  };
  std::vector<Line> lines;
  visit(backend, spec, data, needs, options, m, [&](CanonicalRecord&& c) {
    if (!http::is_html(c.mime)) return;
    std::string text;
    if (extractor == Extractor::kText) {
      text = escape_field(html::extract_text(c.payload, c.mime));
    } else {
      for (const auto& link : html::extract_links(c.payload, c.url)) {
        if (!text.empty()) text += "\\n";
        text += escape_field(link);
      }
    }
    lines.push_back({{std::move(c.urlkey), c.timestamp_ms, std::move(c.digest)}, std::move(text)});
  });
  std::sort(lines.begin(), lines.end());

  OutputFile file(out);
  std::string buf;
  for (const auto& l : lines) {
    buf += l.id.digest;
    buf += '\t';
    buf += l.text;
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      file.write(buf);
      buf.clear();
    }
  }
  file.write(buf);
  file.close();
  result.rows = lines.size();
  m.records_out = result.rows;
  m.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace archfmt::query
