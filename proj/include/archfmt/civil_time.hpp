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

// Proleptic-Gregorian UTC conversions shared by the CDX codec, the WARC-Date
// parser and the canonical schema.
namespace archfmt::civil {

struct DateTime {
  int64_t year = 1970;
  int month = 1;   // 1..12
  int day = 1;     // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millisecond = 0;
};

int64_t days_from_civil(int64_t year, int month, int day) noexcept;
DateTime from_epoch_ms(int64_t epoch_ms) noexcept;
int64_t to_epoch_ms(const DateTime& dt) noexcept;
int days_in_month(int64_t year, int month) noexcept;

/// Validates ranges (month, day-of-month, hour < 24, minute < 60, second < 60).
bool is_valid(const DateTime& dt) noexcept;

/// "YYYY-MM-DDThh:mm:ssZ", with ".mmm" before "Z" when milliseconds are non-zero.
std::string format_iso8601(int64_t epoch_ms);

/// Parses "YYYY-MM-DDThh:mm:ss[.fff...]Z" into epoch milliseconds; digits
/// beyond milliseconds are truncated. nullopt on any syntax or range error.
std::optional<int64_t> parse_iso8601(std::string_view s) noexcept;

/// Floor division that rounds toward negative infinity.
constexpr int64_t floor_div(int64_t a, int64_t b) noexcept {
  return (a >= 0) ? a / b : -((-a + b - 1) / b);
}

}  // namespace archfmt::civil
