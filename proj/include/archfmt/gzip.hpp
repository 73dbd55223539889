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
#include <span>
#include <string>
#include <vector>

#include "archfmt/error.hpp"
#include "archfmt/io.hpp"

namespace archfmt::gzip {

inline constexpr int kDefaultLevel = 6;

/// One complete RFC 1952 member (header, deflate stream, CRC32, ISIZE).
/// The header carries mtime 0 so output is deterministic.
std::vector<uint8_t> compress(std::span<const uint8_t> data, int level = kDefaultLevel);
void compress_append(std::span<const uint8_t> data, int level, std::vector<uint8_t>& out);

/// Inflates a buffer holding exactly one member. Trailing bytes, truncation
/// or a bad CRC raise Error(on_error).
std::vector<uint8_t> decompress(std::span<const uint8_t> data, ErrorCode on_error,
                                size_t size_hint = 0);

/// Inflates the member starting at the reader's position, appending the
/// output to `out` and consuming exactly the member's compressed bytes.
/// Returns the compressed length.
uint64_t inflate_member(SequentialReader& reader, std::string& out, ErrorCode on_error);

inline bool has_magic(std::span<const uint8_t> head) {
  return head.size() >= 2 && head[0] == 0x1f && head[1] == 0x8b;
}

uint32_t crc32(std::span<const uint8_t> data);

}  // namespace archfmt::gzip
