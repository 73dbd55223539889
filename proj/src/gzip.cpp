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

#include "archfmt/gzip.hpp"

#include <zlib.h>

#include <cstring>
#include <limits>

namespace archfmt::gzip {
namespace {

constexpr int kGzipWindowBits = 15 + 16;

class Deflater {
 public:
  explicit Deflater(int level) {
    std::memset(&zs_, 0, sizeof(zs_));
    if (deflateInit2(&zs_, level, Z_DEFLATED, kGzipWindowBits, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
      fail(ErrorCode::kIoFailure, "deflateInit2 failed");
    }
  }
  ~Deflater() { deflateEnd(&zs_); }
  z_stream* get() { return &zs_; }

 private:
  z_stream zs_;
};

class Inflater {
 public:
  Inflater() {
    std::memset(&zs_, 0, sizeof(zs_));
    if (inflateInit2(&zs_, kGzipWindowBits) != Z_OK) {
      fail(ErrorCode::kIoFailure, "inflateInit2 failed");
    }
  }
  ~Inflater() { inflateEnd(&zs_); }
  z_stream* get() { return &zs_; }

 private:
  z_stream zs_;
};

std::string describe(const z_stream* zs, int rc) {
  std::string msg = zs->msg ? zs->msg : "zlib error";
  return msg + " (rc " + std::to_string(rc) + ")";
}

}  // namespace

void compress_append(std::span<const uint8_t> data, int level, std::vector<uint8_t>& out) {
  Deflater d(level);
  z_stream* zs = d.get();
  size_t base = out.size();
  out.resize(base + deflateBound(zs, data.size()) + 32);
  zs->next_in = const_cast<Bytef*>(data.data());
  zs->avail_in = static_cast<uInt>(data.size());
  zs->next_out = out.data() + base;
  zs->avail_out = static_cast<uInt>(out.size() - base);
  int rc = deflate(zs, Z_FINISH);
  if (rc != Z_STREAM_END) fail(ErrorCode::kIoFailure, "deflate: " + describe(zs, rc));
  out.resize(base + zs->total_out);
}

std::vector<uint8_t> compress(std::span<const uint8_t> data, int level) {
  std::vector<uint8_t> out;
  compress_append(data, level, out);
  return out;
}

std::vector<uint8_t> decompress(std::span<const uint8_t> data, ErrorCode on_error,
                                size_t size_hint) {
  Inflater inf;
  z_stream* zs = inf.get();
  std::vector<uint8_t> out(size_hint > 0 ? size_hint : data.size() * 4 + 64);
  zs->next_in = const_cast<Bytef*>(data.data());
  zs->avail_in = static_cast<uInt>(data.size());
  size_t produced = 0;
  for (;;) {
    if (produced == out.size()) out.resize(out.size() * 2);
    zs->next_out = out.data() + produced;
    zs->avail_out = static_cast<uInt>(out.size() - produced);
    int rc = inflate(zs, Z_NO_FLUSH);
    produced = out.size() - zs->avail_out;
    if (rc == Z_STREAM_END) break;
    if (rc == Z_BUF_ERROR && zs->avail_in == 0) fail(on_error, "truncated gzip member");
    if (rc != Z_OK && rc != Z_BUF_ERROR) fail(on_error, describe(zs, rc));
  }
  if (zs->avail_in != 0) fail(on_error, "trailing bytes after gzip member");
  out.resize(produced);
  return out;
}

uint64_t inflate_member(SequentialReader& reader, std::string& out, ErrorCode on_error) {
  Inflater inf;
  z_stream* zs = inf.get();
  uint64_t consumed = 0;
  size_t produced = out.size();
  if (out.capacity() < produced + 4096) out.reserve(produced + 4096);
  for (;;) {
    size_t avail = reader.fill(1);
    if (avail == 0) fail(on_error, "truncated gzip member");
    auto in = reader.available();
    size_t in_len = std::min<size_t>(in.size(), std::numeric_limits<uInt>::max());
    zs->next_in = const_cast<Bytef*>(in.data());
    zs->avail_in = static_cast<uInt>(in_len);
    int rc = Z_OK;
    while (zs->avail_in > 0 && rc != Z_STREAM_END) {
      if (out.size() == produced) out.resize(std::max<size_t>(produced * 2, produced + 65536));
      zs->next_out = reinterpret_cast<Bytef*>(out.data()) + produced;
      zs->avail_out = static_cast<uInt>(out.size() - produced);
      rc = inflate(zs, Z_NO_FLUSH);
      produced = out.size() - zs->avail_out;
      if (rc != Z_OK && rc != Z_STREAM_END && !(rc == Z_BUF_ERROR && zs->avail_out == 0)) {
        out.resize(produced);
        fail(on_error, describe(zs, rc));
      }
    }
    size_t used = in_len - zs->avail_in;
    reader.consume(used);
    consumed += used;
    if (rc == Z_STREAM_END) break;
  }
  out.resize(produced);
  return consumed;
}

uint32_t crc32(std::span<const uint8_t> data) {
  return static_cast<uint32_t>(::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

}  // namespace archfmt::gzip
