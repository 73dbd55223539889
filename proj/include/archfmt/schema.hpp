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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "archfmt/error.hpp"

namespace archfmt {

enum class ColumnType : uint8_t { kInt64 = 1, kString = 2, kBytes = 3 };

std::string_view column_type_name(ColumnType t);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kString;
  bool nullable = false;

  bool operator==(const Column&) const = default;
};

/// Ordered, uniquely named column list shared by both containers.
class Schema {
 public:
  Schema() = default;
  /// Throws SchemaMismatch on empty or duplicate names, or zero columns.
  explicit Schema(std::vector<Column> columns);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  size_t size() const noexcept { return columns_.size(); }
  const Column& operator[](size_t i) const { return columns_[i]; }

  /// Column index, or nullopt.
  std::optional<size_t> find(std::string_view name) const;
  /// Column index; throws UnknownColumn.
  size_t index_of(std::string_view name) const;

  /// "name:TYPE[?];..." with '?' marking nullable columns.
  std::string to_text() const;
  static Schema from_text(std::string_view text);

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Column> columns_;
};

/// Block/chunk compression shared by both binary containers.
enum class Codec : uint8_t { kNone = 0, kGzip = 1 };

std::string_view codec_name(Codec c);
/// "none" or "gzip"; throws Usage otherwise.
Codec parse_codec(std::string_view name);

/// INT64 values hold int64_t; STRING and BYTES hold raw bytes in std::string.
using Scalar = std::variant<int64_t, std::string>;
using Value = std::optional<Scalar>;
using Row = std::vector<Value>;

/// Throws SchemaMismatch unless every value matches its column's type and
/// nullability.
void check_row(const Schema& schema, const Row& row, uint64_t row_index);

/// Little-endian primitives for both binary containers.
namespace le {

inline void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }
inline void put_u16(std::string& out, uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
inline void put_bytes(std::string& out, std::string_view v) {
  put_u32(out, static_cast<uint32_t>(v.size()));
  out.append(v);
}

inline uint64_t get(const uint8_t* p, int width) {
  uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

/// Bounds-checked cursor; `fail_code` is raised when a read overruns.
class Cursor {
 public:
  Cursor(std::string_view data, ErrorCode fail_code) : data_(data), fail_code_(fail_code) {}

  uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }
  uint16_t u16() { return static_cast<uint16_t>(get(bytes(take(2)), 2)); }
  uint32_t u32() { return static_cast<uint32_t>(get(bytes(take(4)), 4)); }
  uint64_t u64() { return get(bytes(take(8)), 8); }
  std::string_view take(size_t n);
  std::string_view length_prefixed() { return take(u32()); }
  size_t remaining() const noexcept { return data_.size() - pos_; }
  size_t position() const noexcept { return pos_; }

 private:
  static const uint8_t* bytes(std::string_view s) {
    return reinterpret_cast<const uint8_t*>(s.data());
  }
  std::string_view data_;
  size_t pos_ = 0;
  ErrorCode fail_code_;
};

}  // namespace le

}  // namespace archfmt
