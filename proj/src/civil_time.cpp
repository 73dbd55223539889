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

#include "archfmt/civil_time.hpp"

#include <cstdio>

namespace archfmt::civil {

// Day counting after H. Hinnant's days_from_civil / civil_from_days.
int64_t days_from_civil(int64_t y, int m, int d) noexcept {
  y -= m <= 2;
  const int64_t era = floor_div(y, 400);
  const int64_t yoe = y - era * 400;
  const int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

namespace {

void civil_from_days(int64_t z, int64_t& y, int& m, int& d) noexcept {
  z += 719468;
  const int64_t era = floor_div(z, 146097);
  const int64_t doe = z - era * 146097;
  const int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int64_t mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = yoe + era * 400 + (m <= 2);
}

bool is_leap(int64_t y) noexcept { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

int days_in_month(int64_t year, int month) noexcept {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

bool is_valid(const DateTime& dt) noexcept {
  return dt.month >= 1 && dt.month <= 12 && dt.day >= 1 &&
         dt.day <= days_in_month(dt.year, dt.month) && dt.hour >= 0 && dt.hour < 24 &&
         dt.minute >= 0 && dt.minute < 60 && dt.second >= 0 && dt.second < 60 &&
         dt.millisecond >= 0 && dt.millisecond < 1000;
}

DateTime from_epoch_ms(int64_t epoch_ms) noexcept {
  DateTime dt;
  int64_t days = floor_div(epoch_ms, 86400000);
  int64_t rem = epoch_ms - days * 86400000;
  civil_from_days(days, dt.year, dt.month, dt.day);
  dt.hour = static_cast<int>(rem / 3600000);
  dt.minute = static_cast<int>(rem / 60000 % 60);
  dt.second = static_cast<int>(rem / 1000 % 60);
  dt.millisecond = static_cast<int>(rem % 1000);
  return dt;
}

int64_t to_epoch_ms(const DateTime& dt) noexcept {
  int64_t days = days_from_civil(dt.year, dt.month, dt.day);
  return ((days * 24 + dt.hour) * 60 + dt.minute) * 60000 + dt.second * 1000 + dt.millisecond;
}

namespace {

bool digits(std::string_view s, size_t pos, size_t n, int64_t& out) noexcept {
  if (pos + n > s.size()) return false;
  int64_t v = 0;
  for (size_t i = pos; i < pos + n; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<int64_t> parse_iso8601(std::string_view s) noexcept {
  int64_t y, mo, d, h, mi, se;
  if (s.size() < 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':') {
    return std::nullopt;
  }
  if (!digits(s, 0, 4, y) || !digits(s, 5, 2, mo) || !digits(s, 8, 2, d) ||
      !digits(s, 11, 2, h) || !digits(s, 14, 2, mi) || !digits(s, 17, 2, se)) {
    return std::nullopt;
  }
  size_t pos = 19;
  int64_t ms = 0;
  if (s[pos] == '.') {
    ++pos;
    size_t start = pos;
    int scale = 100;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (scale > 0) {
        ms += (s[pos] - '0') * scale;
        scale /= 10;
      }
      ++pos;
    }
    if (pos == start) return std::nullopt;
  }
  if (pos + 1 != s.size() || s[pos] != 'Z') return std::nullopt;
  DateTime dt{y, static_cast<int>(mo), static_cast<int>(d), static_cast<int>(h),
              static_cast<int>(mi), static_cast<int>(se), static_cast<int>(ms)};
  if (!is_valid(dt)) return std::nullopt;
  return to_epoch_ms(dt);
}

std::string format_iso8601(int64_t epoch_ms) {
  DateTime dt = from_epoch_ms(epoch_ms);
  char buf[40];
  if (dt.millisecond != 0) {
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  static_cast<long long>(dt.year), dt.month, dt.day, dt.hour, dt.minute,
                  dt.second, dt.millisecond);
  } else {
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<long long>(dt.year), dt.month, dt.day, dt.hour, dt.minute,
                  dt.second);
  }
  return buf;
}

}  // namespace archfmt::civil
