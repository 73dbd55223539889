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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace archfmt {

using Sha1 = std::array<uint8_t, 20>;

Sha1 sha1(std::span<const uint8_t> data);
inline Sha1 sha1(std::string_view data) {
  return sha1(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

/// RFC 4648 base32 alphabet, uppercase, no padding (20 bytes -> 32 chars).
std::string base32(std::span<const uint8_t> data);
std::string hex(std::span<const uint8_t> data);

/// The digest form used by CDX lines and the canonical schema.
inline std::string payload_digest(std::string_view payload) { return base32(sha1(payload)); }

/// Incremental SHA-1, used for order-sensitive digests over many items.
class Sha1Builder {
 public:
  Sha1Builder();
  ~Sha1Builder();
  Sha1Builder(const Sha1Builder&) = delete;
  Sha1Builder& operator=(const Sha1Builder&) = delete;

  void update(std::string_view data);
  Sha1 finish();

 private:
  void* ctx_;
};

}  // namespace archfmt
