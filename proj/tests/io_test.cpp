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

#include <gtest/gtest.h>

#include <fstream>

#include "archfmt/gzip.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/io.hpp"
#include "test_util.hpp"

namespace archfmt {
namespace {

using testing::TempDir;

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream(p, std::ios::binary) << data;
}

TEST(InputFileTest, PositionedReadsCountOneSeekEach) {
  TempDir dir;
  write_file(dir / "f", std::string(1000, 'x'));
  Measurement m;
  InputFile f(dir / "f", &m);
  EXPECT_EQ(m.open_count, 1u);
  f.read_at(10, 20);
  f.read_at(500, 100);
  EXPECT_EQ(m.seek_count, 2u);
  EXPECT_EQ(m.bytes_read, 120u);
}

TEST(InputFileTest, SequentialReadCountsOneSeekPerRun) {
  TempDir dir;
  write_file(dir / "f", std::string(1000, 'x'));
  Measurement m;
  InputFile f(dir / "f", &m);
  std::vector<uint8_t> buf(100);
  for (int i = 0; i < 5; ++i) f.read_next(buf);
  EXPECT_EQ(m.seek_count, 1u);
  f.read_at(0, 10);
  f.read_next(buf);
  EXPECT_EQ(m.seek_count, 3u);
  EXPECT_EQ(m.bytes_read, 610u);
}

TEST(InputFileTest, ShortReadAtEof) {
  TempDir dir;
  write_file(dir / "f", "abcdef");
  InputFile f(dir / "f", nullptr);
  auto v = f.read_at(4, 10);
  EXPECT_EQ(std::string(v.begin(), v.end()), "ef");
}

TEST(InputFileTest, MissingFileIsIoFailure) {
  try {
    InputFile f("/nonexistent/archfmt", nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoFailure);
  }
}

TEST(SequentialReaderTest, FillsAcrossBufferBoundary) {
  TempDir dir;
  std::string data;
  for (int i = 0; i < 5000; ++i) data += static_cast<char>('a' + i % 26);
  write_file(dir / "f", data);
  InputFile f(dir / "f", nullptr);
  SequentialReader r(f, 64);
  std::string got;
  while (r.fill(7) > 0) {
    auto a = r.available();
    size_t n = std::min<size_t>(7, a.size());
    got.append(reinterpret_cast<const char*>(a.data()), n);
    r.consume(n);
  }
  EXPECT_EQ(got, data);
  EXPECT_TRUE(r.at_eof());
}

TEST(GzipTest, RoundTripAndDeterminism) {
  testing::Gen g(1);
  for (int i = 0; i < 200; ++i) {
    std::string s = g.bytes(3000);
    std::span<const uint8_t> in(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    auto a = gzip::compress(in);
    auto b = gzip::compress(in);
    EXPECT_EQ(a, b);
    ASSERT_TRUE(gzip::has_magic(a));
    auto out = gzip::decompress(a, ErrorCode::kGzipCorrupt);
    EXPECT_EQ(std::string(out.begin(), out.end()), s);
  }
}

TEST(GzipTest, CorruptionIsReported) {
  std::string s(500, 'q');
  auto z = gzip::compress(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
  z[z.size() - 6] ^= 0xff;  // CRC field
  EXPECT_THROW(gzip::decompress(z, ErrorCode::kGzipCorrupt), Error);
  z.resize(z.size() / 2);
  EXPECT_THROW(gzip::decompress(z, ErrorCode::kGzipCorrupt), Error);
}

TEST(HashingTest, KnownVectors) {
  // FIPS 180 "abc".
  EXPECT_EQ(hex(sha1("abc")), "a9993e364706816aba3e25717850c26c9cd0d89d");
  // RFC 4648 test vectors.
  auto b32 = [](std::string_view s) {
    return base32(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(b32(""), "");
  EXPECT_EQ(b32("f"), "MY");
  EXPECT_EQ(b32("fo"), "MZXQ");
  EXPECT_EQ(b32("foo"), "MZXW6");
  EXPECT_EQ(b32("foob"), "MZXW6YQ");
  EXPECT_EQ(b32("fooba"), "MZXW6YTB");
  EXPECT_EQ(b32("foobar"), "MZXW6YTBOI");
  EXPECT_EQ(payload_digest("").size(), 32u);
  EXPECT_EQ(payload_digest(""), "3I42H3S6NNFQ2MSVX7XZKYAYSCX5QBYJ");
}

TEST(HashingTest, BuilderMatchesOneShot) {
  Sha1Builder b;
  b.update("ab");
  b.update("c");
  EXPECT_EQ(b.finish(), sha1("abc"));
}

}  // namespace
}  // namespace archfmt
