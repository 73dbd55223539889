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

#include "archfmt/http.hpp"

#include <cctype>
#include <string>

#include "archfmt/warc.hpp"

namespace archfmt::http {

bool is_http_block(std::string_view ct) {
  constexpr std::string_view kPrefix = "application/http";
  return ct.size() >= kPrefix.size() && warc::iequals(ct.substr(0, kPrefix.size()), kPrefix);
}

Envelope split(std::string_view block) {
  Envelope env;
  size_t end = block.find("\r\n\r\n");
  if (end == std::string_view::npos) {
    env.headers = block;
  } else {
    env.headers = block.substr(0, end + 4);
    env.payload = block.substr(end + 4);
  }
  // Status line: "HTTP/x.y NNN reason"
  std::string_view head = env.headers;
  if (head.substr(0, 5) == "HTTP/") {
    size_t sp = head.find(' ');
    if (sp != std::string_view::npos && sp + 4 <= head.size()) {
      int64_t code = 0;
      bool ok = true;
      for (size_t i = sp + 1; i < sp + 4; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(head[i]))) {
          ok = false;
          break;
        }
        code = code * 10 + (head[i] - '0');
      }
      if (ok && (sp + 4 == head.size() || head[sp + 4] == ' ' || head[sp + 4] == '\r')) {
        env.status = code;
      }
    }
  }
  size_t pos = head.find('\n');
  while (pos != std::string_view::npos && pos + 1 < head.size()) {
    size_t next = head.find('\n', pos + 1);
    std::string_view line = head.substr(pos + 1, (next == std::string_view::npos ? head.size() : next) - pos - 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) break;
    size_t colon = line.find(':');
    if (colon != std::string_view::npos && warc::iequals(line.substr(0, colon), "Content-Type")) {
      std::string_view v = line.substr(colon + 1);
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
      env.content_type = v;
      break;
    }
    pos = next;
  }
  return env;
}

std::string media_type(std::string_view ct) {
  size_t semi = ct.find(';');
  std::string_view base = ct.substr(0, semi);
  while (!base.empty() && std::isspace(static_cast<unsigned char>(base.front()))) base.remove_prefix(1);
  while (!base.empty() && std::isspace(static_cast<unsigned char>(base.back()))) base.remove_suffix(1);
  std::string out;
  out.reserve(base.size());
  for (char c : base) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_html(std::string_view mime) {
  return mime == "text/html" || mime == "application/xhtml+xml";
}

RecordPayload payload_of(const warc::Record& record) {
  RecordPayload out;
  std::string_view block(record.block);
  if (is_http_block(record.content_type)) {
    Envelope env = split(block);
    out.has_http = true;
    out.http_headers = env.headers;
    out.payload = env.payload;
    out.status = env.status;
    out.mime = media_type(env.content_type);
  } else {
    out.payload = block;
    out.mime = media_type(record.content_type);
  }
  return out;
}

}  // namespace archfmt::http
