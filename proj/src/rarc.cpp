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

#include "archfmt/rarc.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <random>

#include "archfmt/error.hpp"
#include "archfmt/gzip.hpp"

namespace archfmt::rarc {
namespace {

constexpr std::string_view kMagic = "RARC";
constexpr size_t kFixedHeaderBytes = 11;  // magic, version, codec, schema length
// Candidate blocks larger than this are validated with a positioned read
// instead of buffering the whole block.
constexpr uint64_t kMaxBufferedCandidate = 64u << 20;

std::string_view as_chars(std::span<const uint8_t> s) {
  return {reinterpret_cast<const char*>(s.data()), s.size()};
}

Header parse_header(std::string_view fixed, std::string_view rest, const std::string& where) {
  le::Cursor in(fixed, ErrorCode::kBadMagic);
  if (in.take(4) != kMagic) fail(ErrorCode::kBadMagic, where + " does not start with RARC");
  uint16_t version = in.u16();
  if (version != kVersion) {
    fail(ErrorCode::kBadMagic, where + ": unsupported version " + std::to_string(version));
  }
  Header h;
  uint8_t codec = in.u8();
  if (codec > 1) fail(ErrorCode::kBadMagic, where + ": unknown codec id " + std::to_string(codec));
  h.codec = static_cast<Codec>(codec);
  uint32_t schema_len = in.u32();
  if (rest.size() < schema_len + kSyncBytes) {
    fail(ErrorCode::kSyncLost, where + ": header truncated");
  }
  h.schema = Schema::from_text(rest.substr(0, schema_len));
  std::memcpy(h.sync.data(), rest.data() + schema_len, kSyncBytes);
  h.length = kFixedHeaderBytes + schema_len + kSyncBytes;
  return h;
}

uint32_t schema_length(std::string_view fixed) {
  return static_cast<uint32_t>(le::get(reinterpret_cast<const uint8_t*>(fixed.data()) + 7, 4));
}

Header read_header_seq(SequentialReader& r, const std::string& where) {
  if (r.fill(kFixedHeaderBytes) < kFixedHeaderBytes) {
    fail(ErrorCode::kBadMagic, where + " is too small to be a RARC file");
  }
  std::string fixed(as_chars(r.available().first(kFixedHeaderBytes)));
  uint32_t len = schema_length(fixed);
  if (fixed.substr(0, 4) != kMagic) fail(ErrorCode::kBadMagic, where + " does not start with RARC");
  size_t total = kFixedHeaderBytes + len + kSyncBytes;
  r.fill(total);
  auto avail = as_chars(r.available());
  Header h = parse_header(fixed, avail.substr(std::min(avail.size(), kFixedHeaderBytes)), where);
  r.consume(total);
  return h;
}

Header read_header_at(InputFile& f) {
  const std::string where = f.path().string();
  auto fixed = f.read_at(0, kFixedHeaderBytes);
  if (fixed.size() < kFixedHeaderBytes) {
    fail(ErrorCode::kBadMagic, where + " is too small to be a RARC file");
  }
  std::string_view fv = as_chars(fixed);
  if (fv.substr(0, 4) != kMagic) fail(ErrorCode::kBadMagic, where + " does not start with RARC");
  auto rest = f.read_at(kFixedHeaderBytes, schema_length(fv) + kSyncBytes);
  return parse_header(fv, as_chars(rest), where);
}

struct BlockHeader {
  uint32_t count = 0;
  uint64_t uncompressed_len = 0;
  uint64_t compressed_len = 0;
};

BlockHeader parse_block_header(std::span<const uint8_t> p) {
  return {static_cast<uint32_t>(le::get(p.data(), 4)), le::get(p.data() + 4, 8),
          le::get(p.data() + 12, 8)};
}

bool marker_at(std::span<const uint8_t> p, size_t pos, const SyncMarker& sync) {
  return p.size() >= pos + kSyncBytes && std::memcmp(p.data() + pos, sync.data(), kSyncBytes) == 0;
}

/// Reads consecutive blocks starting at the reader's position while the
/// block start is below `end`.
void read_blocks(SequentialReader& r, const Header& h, uint64_t file_size, uint64_t end,
                 const std::string& where, const RowSink& sink) {
  for (;;) {
    uint64_t start = r.offset();
    if (start >= end || r.at_eof()) return;
    auto lost = [&](const std::string& why) {
      fail(ErrorCode::kSyncLost, where + ": " + why + " in block at offset " + std::to_string(start));
    };
    if (r.fill(kBlockHeaderBytes) < kBlockHeaderBytes) lost("truncated block header");
    BlockHeader b = parse_block_header(r.available());
    if (b.compressed_len > file_size - start - kBlockHeaderBytes) lost("truncated block");
    size_t total = kBlockHeaderBytes + static_cast<size_t>(b.compressed_len) + kSyncBytes;
    if (r.fill(total) < total) lost("truncated block");
    auto span = r.available();
    if (!marker_at(span, total - kSyncBytes, h.sync)) lost("sync marker mismatch");
    auto payload = span.subspan(kBlockHeaderBytes, static_cast<size_t>(b.compressed_len));
    std::vector<uint8_t> inflated;
    std::string_view raw = as_chars(payload);
    if (h.codec == Codec::kGzip) {
      inflated = gzip::decompress(payload, ErrorCode::kDecompressFailure, b.uncompressed_len);
      raw = as_chars(inflated);
    }
    if (raw.size() != b.uncompressed_len) {
      fail(ErrorCode::kDecompressFailure,
           where + ": block at offset " + std::to_string(start) + " has wrong length");
    }
    auto rows = decode_records(h.schema, raw, b.count);
    r.consume(total);
    for (auto& row : rows) sink(std::move(row));
  }
}

}  // namespace

SyncMarker sync_marker_for(uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5241524353594e43ull);
  SyncMarker m{};
  for (size_t i = 0; i < kSyncBytes; i += 8) {
    uint64_t v = rng();
    for (size_t k = 0; k < 8; ++k) m[i + k] = static_cast<uint8_t>(v >> (8 * k));
  }
  return m;
}

std::string encode_records(const Schema& schema, const std::vector<Row>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (size_t c = 0; c < schema.size(); ++c) {
      const Value& v = row[c];
      if (schema[c].nullable) le::put_u8(out, v ? 1 : 0);
      if (!v) continue;
      if (schema[c].type == ColumnType::kInt64) {
        le::put_u64(out, static_cast<uint64_t>(std::get<int64_t>(*v)));
      } else {
        le::put_bytes(out, std::get<std::string>(*v));
      }
    }
  }
  return out;
}

std::vector<Row> decode_records(const Schema& schema, std::string_view payload, uint32_t count) {
  le::Cursor in(payload, ErrorCode::kDecompressFailure);
  std::vector<Row> rows;
  rows.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Row row;
    row.reserve(schema.size());
    for (size_t c = 0; c < schema.size(); ++c) {
      if (schema[c].nullable && in.u8() == 0) {
        row.emplace_back();
      } else if (schema[c].type == ColumnType::kInt64) {
        row.emplace_back(static_cast<int64_t>(in.u64()));
      } else {
        row.emplace_back(std::string(in.length_prefixed()));
      }
    }
    rows.push_back(std::move(row));
  }
  if (in.remaining() != 0) fail(ErrorCode::kDecompressFailure, "trailing bytes in block payload");
  return rows;
}

struct Writer::Impl {
  OutputFile out;
  Schema schema;
  WriteOptions opts;
  SyncMarker sync;
  std::vector<Row> pending;
  uint64_t row_index = 0;
  uint64_t blocks = 0;
  bool finished = false;

  Impl(const std::filesystem::path& path, Schema s, WriteOptions o)
      : out(path), schema(std::move(s)), opts(o), sync(sync_marker_for(o.seed)) {
    if (opts.rows_per_block == 0) fail(ErrorCode::kUsage, "rows_per_block must be positive");
    std::string header(kMagic);
    le::put_u16(header, kVersion);
    le::put_u8(header, static_cast<uint8_t>(opts.codec));
    std::string text = schema.to_text();
    le::put_bytes(header, text);
    header.append(reinterpret_cast<const char*>(sync.data()), kSyncBytes);
    out.write(header);
  }

  void flush() {
    if (pending.empty()) return;
    std::string raw = encode_records(schema, pending);
    std::string block;
    le::put_u32(block, static_cast<uint32_t>(pending.size()));
    le::put_u64(block, raw.size());
    if (opts.codec == Codec::kGzip) {
      auto z = gzip::compress(
          std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(raw.data()), raw.size()),
          opts.gzip_level);
      le::put_u64(block, z.size());
      out.write(block);
      out.write(z);
    } else {
      le::put_u64(block, raw.size());
      out.write(block);
      out.write(raw);
    }
    out.write(std::span<const uint8_t>(sync));
    ++blocks;
    pending.clear();
  }
};

Writer::Writer(const std::filesystem::path& path, Schema schema, WriteOptions options)
    : impl_(std::make_unique<Impl>(path, std::move(schema), options)) {}

Writer::~Writer() = default;

void Writer::append(Row row) {
  auto& im = *impl_;
  check_row(im.schema, row, im.row_index++);
  im.pending.push_back(std::move(row));
  if (im.pending.size() >= im.opts.rows_per_block) im.flush();
}

uint64_t Writer::finish() {
  auto& im = *impl_;
  if (!im.finished) {
    im.flush();
    im.out.close();
    im.finished = true;
  }
  return im.blocks;
}

uint64_t write(const std::vector<Row>& rows, const Schema& schema,
               const std::filesystem::path& path, const WriteOptions& options) {
  Writer w(path, schema, options);
  for (const auto& r : rows) w.append(r);
  return w.finish();
}

Header read_header(const std::filesystem::path& path) {
  InputFile f(path, nullptr);
  return read_header_at(f);
}

Header scan(const std::filesystem::path& path, Measurement* stats, const RowSink& sink) {
  InputFile f(path, stats);
  SequentialReader r(f);
  const std::string where = path.string();
  Header h = read_header_seq(r, where);
  auto counted = [&](Row&& row) {
    if (stats) ++stats->records_out;
    sink(std::move(row));
  };
  read_blocks(r, h, f.size(), f.size(), where, counted);
  return h;
}

Header resync(const std::filesystem::path& path, uint64_t start, uint64_t end,
              Measurement* stats, const RowSink& sink) {
  InputFile f(path, stats);
  const std::string where = path.string();
  Header h = read_header_at(f);
  end = std::min(end, f.size());
  uint64_t from = std::max(start, h.length);
  if (from >= end) return h;

  // A block starting at s is preceded by a marker at s - 16.
  f.rewind_to(from - kSyncBytes);
  SequentialReader r(f);
  std::boyer_moore_horspool_searcher searcher(h.sync.begin(), h.sync.end());
  for (;;) {
    size_t n = r.fill(kSyncBytes);
    if (n < kSyncBytes) return h;
    auto span = r.available();
    auto hit = std::search(span.begin(), span.end(), searcher);
    if (hit == span.end()) {
      r.consume(n - (kSyncBytes - 1));
      continue;
    }
    size_t i = static_cast<size_t>(hit - span.begin());
    uint64_t s = r.offset() + i + kSyncBytes;
    if (s >= end) return h;
    // Validate: a block header whose length lands on another marker.
    bool valid = false;
    if (s + kBlockHeaderBytes + kSyncBytes <= f.size()) {
      r.fill(i + kSyncBytes + kBlockHeaderBytes);
      BlockHeader b = parse_block_header(r.available().subspan(i + kSyncBytes));
      uint64_t trailer = s + kBlockHeaderBytes + b.compressed_len;
      if (b.compressed_len <= f.size() - s - kBlockHeaderBytes - kSyncBytes) {
        if (b.compressed_len <= kMaxBufferedCandidate) {
          size_t need = static_cast<size_t>(trailer - r.offset()) + kSyncBytes;
          r.fill(need);
          valid = marker_at(r.available(), need - kSyncBytes, h.sync);
        } else {
          auto tail = f.read_at(trailer, kSyncBytes);
          valid = marker_at(tail, 0, h.sync);
        }
      }
    }
    if (valid) {
      r.consume(i + kSyncBytes);
      break;
    }
    r.consume(i + 1);
  }
  auto counted = [&](Row&& row) {
    if (stats) ++stats->records_out;
    sink(std::move(row));
  };
  read_blocks(r, h, f.size(), end, where, counted);
  return h;
}

Header resync(const std::filesystem::path& path, uint64_t start, Measurement* stats,
              const RowSink& sink) {
  return resync(path, start, UINT64_MAX, stats, sink);
}

ReadResult read(const std::filesystem::path& path) {
  ReadResult result;
  result.header =
      scan(path, &result.measurement, [&](Row&& r) { result.rows.push_back(std::move(r)); });
  return result;
}

}  // namespace archfmt::rarc
