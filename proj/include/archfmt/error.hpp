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
#include <stdexcept>
#include <string>
#include <string_view>

namespace archfmt {

enum class ErrorCode {
  kIoFailure,
  kMalformedHeader,
  kLengthMismatch,
  kGzipCorrupt,
  kBadOffset,
  kNotAbsoluteUrl,
  kBadFieldCount,
  kBadTimestamp,
  kBadDate,
  kUnsortedInput,
  kSchemaMismatch,
  kUnknownColumn,
  kStatlessColumn,
  kBadMagic,
  kFooterCorrupt,
  kDecompressFailure,
  kSyncLost,
  kExcluded,
  kBackendUnavailable,
  kUnachievable,
  kEquivalenceFailure,
  kBadCsv,
  kUsage,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. The message carries the context
/// (file, byte offset, line number) needed to locate the problem.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace archfmt
