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

#include <algorithm>
#include <fstream>

#include "archfmt/rarc.hpp"
#include "test_util.hpp"

namespace archfmt::rarc {
namespace {

using testing::TempDir;

Schema test_schema() {
  return Schema({{"id", ColumnType::kInt64, false},
                 {"url", ColumnType::kString, false},
                 {"headers", ColumnType::kString, true},
                 {"payload", ColumnType::kBytes, false}});
}

std::vector<Row> make_rows(testing::Gen& g, size_t n) {
  std::vector<Row> rows;
  for (size_t i = 0; i < n; ++i) {
    Row r;
    r.emplace_back(static_cast<int64_t>(i));
    r.emplace_back("http://e.com/" + g.text(10));
    r.push_back(g.chance(30) ? Value() : Value(g.text(40)));
    r.emplace_back(g.bytes(200));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<int64_t> ids(const std::vector<Row>& rows) {
  std::vector<int64_t> out;
  for (const auto& r : rows) out.push_back(std::get<int64_t>(*r[0]));
  return out;
}

TEST(RarcTest, RoundTripAllOptions) {
  TempDir dir;
  testing::Gen g(61);
  for (uint32_t per_block : {1u, 7u, 1024u}) {
    for (Codec codec : {Codec::kNone, Codec::kGzip}) {
      auto rows = make_rows(g, static_cast<size_t>(g.between(0, 300)));
      auto path = dir / "r.rarc";
      WriteOptions opts;
      opts.rows_per_block = per_block;
      opts.codec = codec;
      write(rows, test_schema(), path, opts);
      auto res = read(path);
      ASSERT_EQ(res.rows, rows);
      EXPECT_EQ(res.header.schema, test_schema());
      EXPECT_EQ(res.measurement.bytes_read, archfmt::file_size(path));
      EXPECT_EQ(res.measurement.seek_count, 1u);
      EXPECT_EQ(res.measurement.records_out, rows.size());
    }
  }
}

TEST(RarcTest, BlockCountIsCeilingDivision) {
  TempDir dir;
  testing::Gen g(67);
  auto rows = make_rows(g, 2500);
  EXPECT_EQ(write(rows, test_schema(), dir / "b.rarc"), 3u);
  EXPECT_EQ(write({}, test_schema(), dir / "e.rarc"), 0u);
  EXPECT_EQ(archfmt::file_size(dir / "e.rarc"), read_header(dir / "e.rarc").length);
  EXPECT_TRUE(read(dir / "e.rarc").rows.empty());
}

TEST(RarcTest, SeedsChangeMarkerNotContent) {
  TempDir dir;
  testing::Gen g(71);
  auto rows = make_rows(g, 100);
  WriteOptions a, b;
  a.seed = 1;
  b.seed = 2;
  write(rows, test_schema(), dir / "a.rarc", a);
  write(rows, test_schema(), dir / "b.rarc", b);
  EXPECT_NE(read_header(dir / "a.rarc").sync, read_header(dir / "b.rarc").sync);
  EXPECT_EQ(read(dir / "a.rarc").rows, read(dir / "b.rarc").rows);
  EXPECT_EQ(sync_marker_for(1), read_header(dir / "a.rarc").sync);
}

TEST(RarcTest, TruncationYieldsCompleteBlocksThenSyncLost) {
  TempDir dir;
  testing::Gen g(73);
  auto rows = make_rows(g, 50);
  WriteOptions opts;
  opts.rows_per_block = 10;
  write(rows, test_schema(), dir / "t.rarc", opts);
  std::string data = slurp(dir / "t.rarc");
  std::ofstream(dir / "cut.rarc", std::ios::binary) << data.substr(0, data.size() - 30);
  std::vector<Row> got;
  try {
    scan(dir / "cut.rarc", nullptr, [&](Row&& r) { got.push_back(std::move(r)); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyncLost);
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
  }
  EXPECT_EQ(got, std::vector<Row>(rows.begin(), rows.begin() + 40));
}

TEST(RarcTest, CorruptMarkerIsSyncLost) {
  TempDir dir;
  testing::Gen g(79);
  WriteOptions opts;
  opts.rows_per_block = 10;
  write(make_rows(g, 30), test_schema(), dir / "m.rarc", opts);
  std::string data = slurp(dir / "m.rarc");
  data[data.size() - 3] ^= 1;
  std::ofstream(dir / "m.rarc", std::ios::binary) << data;
  try {
    read(dir / "m.rarc");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyncLost);
  }
}

void check_partition(const std::filesystem::path& path, const std::vector<int64_t>& all,
                     testing::Gen& g, int rounds) {
  uint64_t size = archfmt::file_size(path);
  std::vector<Row> from_zero;
  resync(path, 0, nullptr, [&](Row&& r) { from_zero.push_back(std::move(r)); });
  ASSERT_EQ(ids(from_zero), all);
  std::vector<Row> at_end;
  resync(path, size, nullptr, [&](Row&& r) { at_end.push_back(std::move(r)); });
  EXPECT_TRUE(at_end.empty());
  for (int i = 0; i < rounds; ++i) {
    std::vector<uint64_t> cuts = {0, size};
    int k = static_cast<int>(g.between(1, 4));
    for (int c = 0; c < k; ++c) cuts.push_back(static_cast<uint64_t>(g.between(0, static_cast<int64_t>(size))));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int64_t> got;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
      resync(path, cuts[c], cuts[c + 1], nullptr,
             [&](Row&& r) { got.push_back(std::get<int64_t>(*r[0])); });
    }
    ASSERT_EQ(got, all) << "split round " << i;
  }
}

TEST(RarcTest, SplitsPartitionRecords) {
  TempDir dir;
  testing::Gen g(83);
  auto rows = make_rows(g, 400);
  WriteOptions opts;
  opts.rows_per_block = 17;
  write(rows, test_schema(), dir / "s.rarc", opts);
  check_partition(dir / "s.rarc", ids(rows), g, 100);
}

TEST(RarcTest, MarkerInsidePayloadIsTolerated) {
  TempDir dir;
  testing::Gen g(89);
  WriteOptions opts;
  opts.rows_per_block = 5;
  opts.codec = Codec::kNone;
  opts.seed = 9;
  SyncMarker m = sync_marker_for(opts.seed);
  std::string marker(reinterpret_cast<const char*>(m.data()), m.size());
  auto rows = make_rows(g, 60);
  for (size_t i = 0; i < rows.size(); i += 3) {
    // Marker followed by bytes that parse as a plausible block header.
    rows[i][3] = Value(marker + std::string(20, '\x01') + marker + g.bytes(30));
  }
  write(rows, test_schema(), dir / "c.rarc", opts);
  EXPECT_EQ(read(dir / "c.rarc").rows, rows);
  check_partition(dir / "c.rarc", ids(rows), g, 100);
}

TEST(RarcTest, BlocksConcatenateUnderSharedMarker) {
  TempDir dir;
  testing::Gen g(97);
  auto a_rows = make_rows(g, 40);
  auto b_rows = make_rows(g, 25);
  for (auto& r : b_rows) r[0] = Value(std::get<int64_t>(*r[0]) + 1000);
  WriteOptions opts;
  opts.rows_per_block = 8;
  opts.seed = 5;
  write(a_rows, test_schema(), dir / "a.rarc", opts);
  write(b_rows, test_schema(), dir / "b.rarc", opts);
  uint64_t header = read_header(dir / "b.rarc").length;
  std::string joined = slurp(dir / "a.rarc") + slurp(dir / "b.rarc").substr(header);
  std::ofstream(dir / "ab.rarc", std::ios::binary) << joined;
  auto expect = a_rows;
  expect.insert(expect.end(), b_rows.begin(), b_rows.end());
  EXPECT_EQ(read(dir / "ab.rarc").rows, expect);
}

TEST(RarcTest, RecordCodecRoundTripProperty) {
  testing::Gen g(101);
  Schema s = test_schema();
  for (int i = 0; i < 1000; ++i) {
    auto rows = make_rows(g, static_cast<size_t>(g.between(0, 5)));
    ASSERT_EQ(decode_records(s, encode_records(s, rows), static_cast<uint32_t>(rows.size())), rows);
  }
}

TEST(RarcTest, SchemaMismatchRejected) {
  TempDir dir;
  Row bad = {Value(std::string("x")), Value(std::string("u")), Value(), Value(std::string())};
  try {
    write({bad}, test_schema(), dir / "x.rarc");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

}  // namespace
}  // namespace archfmt::rarc
