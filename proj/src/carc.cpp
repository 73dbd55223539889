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

#include "archfmt/carc.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

#include "archfmt/civil_time.hpp"
#include "archfmt/error.hpp"
#include "archfmt/gzip.hpp"
#include "archfmt/parallel.hpp"

namespace archfmt::carc {
namespace {

constexpr std::string_view kMagic = "CARC";
constexpr size_t kHeaderBytes = 6;
constexpr size_t kTrailerBytes = 16;

enum FooterTag : uint8_t {
  kTagSchema = 1,
  kTagRowGroups = 2,
  kTagTotalRows = 3,
  kTagSortKey = 4,
  kTagCodec = 5,
};

bool is_int(const Scalar& s) { return std::holds_alternative<int64_t>(s); }

bool type_matches(ColumnType t, const Scalar& s) {
  return is_int(s) == (t == ColumnType::kInt64);
}

void put_scalar(std::string& out, const Scalar& s) {
  if (is_int(s)) {
    le::put_u64(out, static_cast<uint64_t>(std::get<int64_t>(s)));
  } else {
    le::put_bytes(out, std::get<std::string>(s));
  }
}

Scalar get_scalar(le::Cursor& in, ColumnType t) {
  if (t == ColumnType::kInt64) return static_cast<int64_t>(in.u64());
  return std::string(in.length_prefixed());
}

/// Numeric view of a scalar for cross-type comparisons: strings are read as
/// ISO-8601 instants (epoch ms) or decimal integers.
std::optional<int64_t> as_int(const Scalar& s) {
  if (is_int(s)) return std::get<int64_t>(s);
  const auto& str = std::get<std::string>(s);
  if (auto ms = civil::parse_iso8601(str)) return ms;
  int64_t v = 0;
  auto [p, ec] = std::from_chars(str.data(), str.data() + str.size(), v);
  if (str.empty() || ec != std::errc() || p != str.data() + str.size()) return std::nullopt;
  return v;
}

/// Compares a value against a bound, casting the value when types differ.
std::optional<int> compare_cast(const Scalar& value, const Scalar& bound) {
  if (is_int(value) == is_int(bound)) return compare(value, bound);
  auto v = as_int(value);
  auto b = as_int(bound);
  if (!v || !b) return std::nullopt;
  return *v < *b ? -1 : (*v > *b ? 1 : 0);
}

std::string encode_chunk(const Column& col, const std::vector<Row>& rows, size_t c,
                         ChunkMeta& meta, bool exact_stats) {
  std::string out;
  size_t n = rows.size();
  size_t bitmap_bytes = (n + 7) / 8;
  out.resize(bitmap_bytes, '\0');
  uint64_t nulls = 0;
  std::optional<Scalar> lo, hi;
  for (size_t r = 0; r < n; ++r) {
    const Value& v = rows[r][c];
    if (v) out[r / 8] = static_cast<char>(static_cast<uint8_t>(out[r / 8]) | (1u << (r % 8)));
  }
  if (col.type == ColumnType::kInt64) {
    out.reserve(bitmap_bytes + 8 * n);
    for (size_t r = 0; r < n; ++r) {
      const Value& v = rows[r][c];
      int64_t x = 0;
      if (v) {
        x = std::get<int64_t>(*v);
        if (!lo || x < std::get<int64_t>(*lo)) lo = x;
        if (!hi || x > std::get<int64_t>(*hi)) hi = x;
      } else {
        ++nulls;
      }
      le::put_u64(out, static_cast<uint64_t>(x));
    }
  } else {
    size_t total = bitmap_bytes;
    for (size_t r = 0; r < n; ++r) {
      if (rows[r][c]) total += 4 + std::get<std::string>(*rows[r][c]).size();
    }
    out.reserve(total);
    const std::string* smin = nullptr;
    const std::string* smax = nullptr;
    for (size_t r = 0; r < n; ++r) {
      const Value& v = rows[r][c];
      if (!v) {
        ++nulls;
        continue;
      }
      const auto& s = std::get<std::string>(*v);
      le::put_bytes(out, s);
      if (col.type == ColumnType::kString) {
        if (!smin || s < *smin) smin = &s;
        if (!smax || s > *smax) smax = &s;
      }
    }
    if (smin) {
      if (exact_stats) {
        lo = *smin;
        hi = *smax;
      } else {
        lo = truncate_min(*smin);
        if (auto m = truncate_max(*smax)) hi = std::move(*m);
      }
    }
  }
  meta.null_count = nulls;
  meta.min = std::move(lo);
  meta.max = std::move(hi);
  meta.uncompressed_len = out.size();
  return out;
}

std::vector<Value> decode_chunk(const Column& col, std::string_view data, uint64_t rows,
                                const std::string& where) {
  le::Cursor in(data, ErrorCode::kDecompressFailure);
  std::string_view bitmap = in.take((rows + 7) / 8);
  std::vector<Value> out;
  out.reserve(rows);
  for (uint64_t r = 0; r < rows; ++r) {
    bool present = (static_cast<uint8_t>(bitmap[r / 8]) >> (r % 8)) & 1;
    if (col.type == ColumnType::kInt64) {
      auto x = static_cast<int64_t>(in.u64());
      out.push_back(present ? Value(x) : Value());
    } else if (present) {
      out.emplace_back(std::string(in.length_prefixed()));
    } else {
      out.emplace_back();
    }
  }
  if (in.remaining() != 0) {
    fail(ErrorCode::kDecompressFailure, "trailing bytes in chunk of " + col.name + " " + where);
  }
  return out;
}

}  // namespace

int compare(const Scalar& a, const Scalar& b) {
  if (is_int(a) && is_int(b)) {
    auto x = std::get<int64_t>(a), y = std::get<int64_t>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (!is_int(a) && !is_int(b)) {
    int c = std::get<std::string>(a).compare(std::get<std::string>(b));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  fail(ErrorCode::kSchemaMismatch, "comparing INT64 with STRING scalar");
}

std::string truncate_min(std::string_view v) {
  return std::string(v.substr(0, std::min(v.size(), kStatPrefixBytes)));
}

std::optional<std::string> truncate_max(std::string_view v) {
  if (v.size() <= kStatPrefixBytes) return std::string(v);
  std::string out(v.substr(0, kStatPrefixBytes));
  while (!out.empty() && static_cast<uint8_t>(out.back()) == 0xff) out.pop_back();
  if (out.empty()) return std::nullopt;
  out.back() = static_cast<char>(static_cast<uint8_t>(out.back()) + 1);
  return out;
}

ScanPredicate ScanPredicate::range(std::string column, Scalar lo, Scalar hi) {
  ScanPredicate p;
  p.kind = Kind::kRange;
  p.column = std::move(column);
  p.lo = std::move(lo);
  p.hi = std::move(hi);
  return p;
}

ScanPredicate ScanPredicate::set(std::string column, std::vector<Scalar> values) {
  ScanPredicate p;
  p.kind = Kind::kSet;
  p.column = std::move(column);
  p.values = std::move(values);
  return p;
}

bool ScanPredicate::matches(const Value& value) const {
  if (kind == Kind::kNone) return true;
  if (!value) return false;
  if (kind == Kind::kRange) {
    auto a = compare_cast(*value, lo);
    auto b = compare_cast(*value, hi);
    return a && b && *a >= 0 && *b <= 0;
  }
  for (const auto& v : values) {
    auto c = compare_cast(*value, v);
    if (c && *c == 0) return true;
  }
  return false;
}

std::string encode_footer(const Footer& f) {
  std::string out;
  auto section = [&](uint8_t tag, const std::string& body) {
    le::put_u8(out, tag);
    le::put_bytes(out, body);
  };
  std::string body;
  le::put_u32(body, static_cast<uint32_t>(f.schema.size()));
  for (const auto& c : f.schema.columns()) {
    le::put_bytes(body, c.name);
    le::put_u8(body, static_cast<uint8_t>(c.type));
    le::put_u8(body, c.nullable ? 1 : 0);
  }
  section(kTagSchema, body);

  body.clear();
  le::put_u32(body, static_cast<uint32_t>(f.row_groups.size()));
  for (const auto& g : f.row_groups) {
    le::put_u64(body, g.row_count);
    for (const auto& c : g.columns) {
      le::put_u64(body, c.offset);
      le::put_u64(body, c.compressed_len);
      le::put_u64(body, c.uncompressed_len);
      le::put_u64(body, c.null_count);
      le::put_u8(body, c.min ? 1 : 0);
      if (c.min) put_scalar(body, *c.min);
      le::put_u8(body, c.max ? 1 : 0);
      if (c.max) put_scalar(body, *c.max);
    }
  }
  section(kTagRowGroups, body);

  body.clear();
  le::put_u64(body, f.total_rows);
  section(kTagTotalRows, body);

  body.clear();
  le::put_u8(body, f.sort_key ? 1 : 0);
  if (f.sort_key) le::put_bytes(body, *f.sort_key);
  section(kTagSortKey, body);

  body.clear();
  le::put_u8(body, static_cast<uint8_t>(f.codec));
  section(kTagCodec, body);
  return out;
}

Footer decode_footer(std::string_view bytes) {
  le::Cursor in(bytes, ErrorCode::kFooterCorrupt);
  auto expect = [&](uint8_t tag) {
    uint8_t got = in.u8();
    if (got != tag) {
      fail(ErrorCode::kFooterCorrupt, "footer tag " + std::to_string(got) + " where " +
                                          std::to_string(tag) + " expected");
    }
    return le::Cursor(in.length_prefixed(), ErrorCode::kFooterCorrupt);
  };
  Footer f;
  {
    auto s = expect(kTagSchema);
    uint32_t n = s.u32();
    std::vector<Column> cols;
    for (uint32_t i = 0; i < n; ++i) {
      Column c;
      c.name = std::string(s.length_prefixed());
      uint8_t t = s.u8();
      if (t < 1 || t > 3) fail(ErrorCode::kFooterCorrupt, "bad column type");
      c.type = static_cast<ColumnType>(t);
      c.nullable = s.u8() != 0;
      cols.push_back(std::move(c));
    }
    try {
      f.schema = Schema(std::move(cols));
    } catch (const Error& e) {
      fail(ErrorCode::kFooterCorrupt, e.what());
    }
  }
  {
    auto s = expect(kTagRowGroups);
    uint32_t n = s.u32();
    f.row_groups.resize(n);
    for (auto& g : f.row_groups) {
      g.row_count = s.u64();
      g.columns.resize(f.schema.size());
      for (size_t c = 0; c < f.schema.size(); ++c) {
        auto& m = g.columns[c];
        m.offset = s.u64();
        m.compressed_len = s.u64();
        m.uncompressed_len = s.u64();
        m.null_count = s.u64();
        if (s.u8()) m.min = get_scalar(s, f.schema[c].type);
        if (s.u8()) m.max = get_scalar(s, f.schema[c].type);
      }
    }
  }
  f.total_rows = expect(kTagTotalRows).u64();
  {
    auto s = expect(kTagSortKey);
    if (s.u8()) f.sort_key = std::string(s.length_prefixed());
  }
  uint8_t codec = expect(kTagCodec).u8();
  if (codec > 1) fail(ErrorCode::kFooterCorrupt, "unknown codec id " + std::to_string(codec));
  f.codec = static_cast<Codec>(codec);
  uint64_t sum = 0;
  for (const auto& g : f.row_groups) sum += g.row_count;
  if (sum != f.total_rows) fail(ErrorCode::kFooterCorrupt, "row counts do not sum to total_rows");
  return f;
}

struct Writer::Impl {
  OutputFile out;
  Schema schema;
  WriteOptions opts;
  std::optional<size_t> sort_col;
  std::vector<Row> pending;
  Footer footer;
  uint64_t row_index = 0;
  std::optional<Value> last_key;
  bool finished = false;

  Impl(const std::filesystem::path& path, Schema s, WriteOptions o)
      : out(path), schema(std::move(s)), opts(std::move(o)) {
    if (opts.rows_per_group == 0) fail(ErrorCode::kUsage, "rows_per_group must be positive");
    if (opts.sort_key) {
      sort_col = schema.index_of(*opts.sort_key);
      if (schema[*sort_col].type == ColumnType::kBytes) {
        fail(ErrorCode::kStatlessColumn, "cannot sort by BYTES column " + *opts.sort_key);
      }
    }
    footer.schema = schema;
    footer.sort_key = opts.sort_key;
    footer.codec = opts.codec;
    std::string header(kMagic);
    le::put_u16(header, kVersion);
    out.write(header);
  }

  void flush() {
    if (pending.empty()) return;
    RowGroupMeta group;
    group.row_count = pending.size();
    group.columns.resize(schema.size());
    std::vector<std::string> chunks(schema.size());
    parallel_for(schema.size(), opts.threads, [&](size_t c) {
      bool exact = sort_col && *sort_col == c;
      std::string raw = encode_chunk(schema[c], pending, c, group.columns[c], exact);
      if (opts.codec == Codec::kGzip) {
        auto z = gzip::compress(
            std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(raw.data()), raw.size()),
            opts.gzip_level);
        chunks[c].assign(reinterpret_cast<const char*>(z.data()), z.size());
      } else {
        chunks[c] = std::move(raw);
      }
    });
    for (size_t c = 0; c < schema.size(); ++c) {
      group.columns[c].offset = out.position();
      group.columns[c].compressed_len = chunks[c].size();
      out.write(chunks[c]);
    }
    footer.total_rows += group.row_count;
    footer.row_groups.push_back(std::move(group));
    pending.clear();
  }
};

Writer::Writer(const std::filesystem::path& path, Schema schema, WriteOptions options)
    : impl_(std::make_unique<Impl>(path, std::move(schema), std::move(options))) {}

Writer::~Writer() = default;

void Writer::append(Row row) {
  auto& im = *impl_;
  check_row(im.schema, row, im.row_index);
  if (im.sort_col) {
    const Value& key = row[*im.sort_col];
    if (im.last_key) {
      bool ordered = !*im.last_key || (key && compare(**im.last_key, *key) <= 0);
      if (!ordered) {
        fail(ErrorCode::kUnsortedInput, "row " + std::to_string(im.row_index) + " breaks " +
                                            *im.opts.sort_key + " order");
      }
    }
    im.last_key = key;
  }
  im.pending.push_back(std::move(row));
  ++im.row_index;
  if (im.pending.size() >= im.opts.rows_per_group) im.flush();
}

Footer Writer::finish() {
  auto& im = *impl_;
  if (im.finished) return im.footer;
  im.flush();
  std::string footer = encode_footer(im.footer);
  std::string trailer;
  le::put_u32(trailer, gzip::crc32(std::span<const uint8_t>(
                           reinterpret_cast<const uint8_t*>(footer.data()), footer.size())));
  le::put_u64(trailer, footer.size());
  trailer += kMagic;
  im.out.write(footer);
  im.out.write(trailer);
  im.out.close();
  im.finished = true;
  return im.footer;
}

Footer write(const std::vector<Row>& rows, const Schema& schema,
             const std::filesystem::path& path, const WriteOptions& options) {
  Writer w(path, schema, options);
  for (const auto& r : rows) w.append(r);
  return w.finish();
}

Footer read_footer(InputFile& file, uint64_t* footer_bytes) {
  const std::string where = file.path().string();
  if (file.size() < kHeaderBytes + kTrailerBytes) {
    fail(ErrorCode::kBadMagic, where + " is too small to be a CARC file");
  }
  auto trailer = file.read_at(file.size() - kTrailerBytes, kTrailerBytes);
  if (std::memcmp(trailer.data() + 12, kMagic.data(), 4) != 0) {
    fail(ErrorCode::kBadMagic, where + " lacks trailing CARC magic");
  }
  auto crc = static_cast<uint32_t>(le::get(trailer.data(), 4));
  uint64_t len = le::get(trailer.data() + 4, 8);
  if (len > file.size() - kHeaderBytes - kTrailerBytes) {
    fail(ErrorCode::kFooterCorrupt, where + ": footer length " + std::to_string(len) +
                                        " exceeds file");
  }
  auto bytes = file.read_at(file.size() - kTrailerBytes - len, static_cast<size_t>(len));
  if (gzip::crc32(bytes) != crc) fail(ErrorCode::kFooterCorrupt, where + ": footer CRC mismatch");
  if (footer_bytes) *footer_bytes = len + kTrailerBytes;
  Footer f = decode_footer(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  uint64_t data_end = file.size() - kTrailerBytes - len;
  for (const auto& g : f.row_groups) {
    for (const auto& c : g.columns) {
      if (c.offset < kHeaderBytes || c.offset + c.compressed_len > data_end) {
        fail(ErrorCode::kFooterCorrupt, where + ": chunk outside data region");
      }
    }
  }
  return f;
}

Footer read_footer(const std::filesystem::path& path) {
  InputFile file(path, nullptr);
  return read_footer(file);
}

std::vector<size_t> plan_row_groups(const Footer& footer, const ScanPredicate& pred) {
  std::vector<size_t> out;
  if (pred.kind == ScanPredicate::Kind::kNone) {
    for (size_t g = 0; g < footer.row_groups.size(); ++g) out.push_back(g);
    return out;
  }
  size_t col = footer.schema.index_of(pred.column);
  ColumnType type = footer.schema[col].type;
  if (type == ColumnType::kBytes) {
    fail(ErrorCode::kStatlessColumn, "BYTES column " + pred.column + " has no statistics");
  }
  for (size_t g = 0; g < footer.row_groups.size(); ++g) {
    const ChunkMeta& m = footer.row_groups[g].columns[col];
    // No stats (all null) or an uncomparable predicate: the group must be read.
    if (!m.min && !m.max) {
      out.push_back(g);
      continue;
    }
    auto above_min = [&](const Scalar& v) { return !m.min || compare(v, *m.min) >= 0; };
    auto below_max = [&](const Scalar& v) { return !m.max || compare(v, *m.max) <= 0; };
    bool keep = false;
    if (pred.kind == ScanPredicate::Kind::kRange) {
      if (!type_matches(type, pred.lo) || !type_matches(type, pred.hi)) {
        keep = true;
      } else {
        keep = below_max(pred.lo) && above_min(pred.hi) && compare(pred.lo, pred.hi) <= 0;
      }
    } else {
      for (const auto& v : pred.values) {
        if (!type_matches(type, v) || (above_min(v) && below_max(v))) {
          keep = true;
          break;
        }
      }
    }
    if (keep) out.push_back(g);
  }
  return out;
}

namespace {

std::vector<Value> load_chunk(InputFile& file, const Footer& f, size_t g, size_t c) {
  const ChunkMeta& m = f.row_groups[g].columns[c];
  std::string where = "group " + std::to_string(g) + " of " + file.path().string();
  std::vector<uint8_t> raw = file.read_at(m.offset, static_cast<size_t>(m.compressed_len));
  if (raw.size() != m.compressed_len) fail(ErrorCode::kDecompressFailure, "short chunk read in " + where);
  if (f.codec == Codec::kGzip) {
    raw = gzip::decompress(raw, ErrorCode::kDecompressFailure, m.uncompressed_len);
  }
  if (raw.size() != m.uncompressed_len) {
    fail(ErrorCode::kDecompressFailure, "chunk length mismatch in " + where);
  }
  return decode_chunk(f.schema[c],
                      std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()),
                      f.row_groups[g].row_count, where);
}

}  // namespace

ScanStats scan(const std::filesystem::path& path, const std::vector<std::string>& projection,
               const ScanPredicate& pred, Measurement* stats, const RowSink& sink) {
  InputFile file(path, stats);
  ScanStats out;
  Footer f = read_footer(file, &out.footer_bytes);
  std::vector<size_t> proj;
  for (const auto& name : projection) proj.push_back(f.schema.index_of(name));
  out.planned_groups = plan_row_groups(f, pred);
  std::optional<size_t> pred_col;
  if (pred.kind != ScanPredicate::Kind::kNone) pred_col = f.schema.index_of(pred.column);

  // Chunks needed per group, in file (schema) order.
  std::vector<size_t> needed(proj);
  if (pred_col) needed.push_back(*pred_col);
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());

  for (size_t g : out.planned_groups) {
    std::vector<std::vector<Value>> cols(f.schema.size());
    for (size_t c : needed) cols[c] = load_chunk(file, f, g, c);
    uint64_t rows = f.row_groups[g].row_count;
    for (uint64_t r = 0; r < rows; ++r) {
      if (pred_col && !pred.matches(cols[*pred_col][r])) continue;
      Row row;
      row.reserve(proj.size());
      for (size_t k = 0; k < proj.size(); ++k) {
        // A column projected twice is moved only on its last use.
        bool last = std::find(proj.begin() + k + 1, proj.end(), proj[k]) == proj.end();
        row.push_back(last ? std::move(cols[proj[k]][r]) : cols[proj[k]][r]);
      }
      if (stats) ++stats->records_out;
      sink(std::move(row));
    }
  }
  return out;
}

ReadResult read(const std::filesystem::path& path, const std::vector<std::string>& projection,
                const ScanPredicate& pred) {
  ReadResult result;
  result.scan = scan(path, projection, pred, &result.measurement,
                     [&](Row&& r) { result.rows.push_back(std::move(r)); });
  return result;
}

uint64_t count(const std::filesystem::path& path, const ScanPredicate& pred, Measurement* stats) {
  if (pred.kind == ScanPredicate::Kind::kNone) {
    InputFile file(path, stats);
    return read_footer(file).total_rows;
  }
  uint64_t n = 0;
  scan(path, {}, pred, stats, [&](Row&&) { ++n; });
  return n;
}

}  // namespace archfmt::carc
