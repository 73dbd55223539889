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
#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "archfmt/error.hpp"

namespace archfmt::testing {

/// Code of the archfmt::Error thrown by f, or nullopt if it returned.
template <class F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("archfmt-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  uint64_t next() { return rng_(); }
  /// Uniform in [lo, hi].
  int64_t between(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(span == 0 ? next() : next() % span);
  }
  bool chance(int percent) { return between(0, 99) < percent; }

  std::string bytes(size_t max_len) {
    std::string s(static_cast<size_t>(between(0, static_cast<int64_t>(max_len))), '\0');
    for (char& c : s) c = static_cast<char>(between(0, 255));
    return s;
  }
  std::string text(size_t max_len, std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789") {
    std::string s(static_cast<size_t>(between(0, static_cast<int64_t>(max_len))), 'a');
    for (char& c : s) c = alphabet[static_cast<size_t>(between(0, static_cast<int64_t>(alphabet.size()) - 1))];
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace archfmt::testing
