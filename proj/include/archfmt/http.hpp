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

#include "archfmt/warc.hpp"

namespace archfmt::http {

/// A WARC block split into its HTTP envelope. `headers` runs through the
/// terminating CRLF CRLF, so headers + payload reproduce the block.
struct Envelope {
  std::string_view headers;
  std::string_view payload;
  int64_t status = -1;
  std::string_view content_type;  // raw header value, may carry parameters
};

/// True for "application/http" block content types.
bool is_http_block(std::string_view block_content_type);

/// Splits at the first CRLF CRLF. A block without one is all headers.
Envelope split(std::string_view block);

/// Lowercased media type with parameters removed: "Text/HTML; charset=x" -> "text/html".
std::string media_type(std::string_view content_type);

bool is_html(std::string_view mime);

/// Payload view of a WARC record: the HTTP body for application/http
/// blocks, otherwise the whole block. Views alias record.block.
struct RecordPayload {
  bool has_http = false;
  std::string_view http_headers;
  std::string_view payload;
  int64_t status = -1;
  std::string mime;
};

RecordPayload payload_of(const warc::Record& record);

}  // namespace archfmt::http
