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

#include "archfmt/schema.hpp"

#include <set>

#include "archfmt/error.hpp"

namespace archfmt {

std::string_view column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::kInt64: return "INT64";
    case ColumnType::kString: return "STRING";
    case ColumnType::kBytes: return "BYTES";
  }
  return "?";
}

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) fail(ErrorCode::kSchemaMismatch, "schema needs at least one column");
  std::set<std::string_view> seen;
  for (const auto& c : columns_) {
    if (c.name.empty()) fail(ErrorCode::kSchemaMismatch, "empty column name");
    for (char ch : c.name) {
      if (ch == ':' || ch == ';' || ch == '?' || ch == ' ') {
        fail(ErrorCode::kSchemaMismatch, "column name '" + c.name + "' has reserved character");
      }
    }
    if (!seen.insert(c.name).second) {
      fail(ErrorCode::kSchemaMismatch, "duplicate column '" + c.name + "'");
    }
  }
}

std::optional<size_t> Schema::find(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

size_t Schema::index_of(std::string_view name) const {
  auto i = find(name);
  if (!i) fail(ErrorCode::kUnknownColumn, "no column named '" + std::string(name) + "'");
  return *i;
}

std::string Schema::to_text() const {
  std::string out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) out.push_back(';');
    out += columns_[i].name;
    out.push_back(':');
    out += column_type_name(columns_[i].type);
    if (columns_[i].nullable) out.push_back('?');
  }
  return out;
}

Schema Schema::from_text(std::string_view text) {
  std::vector<Column> cols;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorCode::kSchemaMismatch, "bad schema item '" + std::string(item) + "'");
    }
    Column c;
    c.name = std::string(item.substr(0, colon));
    std::string_view type = item.substr(colon + 1);
    if (!type.empty() && type.back() == '?') {
      c.nullable = true;
      type.remove_suffix(1);
    }
    if (type == "INT64") c.type = ColumnType::kInt64;
    else if (type == "STRING") c.type = ColumnType::kString;
    else if (type == "BYTES") c.type = ColumnType::kBytes;
    else fail(ErrorCode::kSchemaMismatch, "unknown column type '" + std::string(type) + "'");
    cols.push_back(std::move(c));
    start = end + 1;
  }
  return Schema(std::move(cols));
}

void check_row(const Schema& schema, const Row& row, uint64_t row_index) {
  if (row.size() != schema.size()) {
    fail(ErrorCode::kSchemaMismatch, "row " + std::to_string(row_index) + " has " +
                                         std::to_string(row.size()) + " values for " +
                                         std::to_string(schema.size()) + " columns");
  }
  for (size_t i = 0; i < row.size(); ++i) {
    const Column& c = schema[i];
    if (!row[i]) {
      if (!c.nullable) {
        fail(ErrorCode::kSchemaMismatch,
             "row " + std::to_string(row_index) + ": null in non-nullable column " + c.name);
      }
      continue;
    }
    bool is_int = std::holds_alternative<int64_t>(*row[i]);
    if (is_int != (c.type == ColumnType::kInt64)) {
      fail(ErrorCode::kSchemaMismatch,
           "row " + std::to_string(row_index) + ": wrong value type for column " + c.name);
    }
  }
}

namespace le {

std::string_view Cursor::take(size_t n) {
  if (n > remaining()) {
    fail(fail_code_, "read of " + std::to_string(n) + " bytes overruns buffer at " +
                         std::to_string(pos_));
  }
  std::string_view out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

}  // namespace le

std::string_view codec_name(Codec c) { return c == Codec::kGzip ? "gzip" : "none"; }

Codec parse_codec(std::string_view name) {
  if (name == "gzip") return Codec::kGzip;
  if (name == "none") return Codec::kNone;
  fail(ErrorCode::kUsage, "unknown codec '" + std::string(name) + "'");
}

}  // namespace archfmt
