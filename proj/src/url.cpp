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

#include "archfmt/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "archfmt/error.hpp"

namespace archfmt::url {
namespace {

bool is_scheme_char(char c, bool first) {
  if (std::isalpha(static_cast<unsigned char>(c))) return true;
  if (first) return false;
  return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view default_port(std::string_view scheme) {
  if (scheme == "http") return "80";
  if (scheme == "https") return "443";
  if (scheme == "ftp") return "21";
  return {};
}

std::string merge_paths(const Components& base, std::string_view ref_path) {
  if (base.has_authority && base.path.empty()) return "/" + std::string(ref_path);
  auto slash = base.path.rfind('/');
  if (slash == std::string::npos) return std::string(ref_path);
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

}  // namespace

Components split(std::string_view ref) {
  Components c;
  if (auto hash = ref.find('#'); hash != std::string_view::npos) {
    c.has_fragment = true;
    c.fragment = std::string(ref.substr(hash + 1));
    ref = ref.substr(0, hash);
  }
  // A scheme is present only when the first ':' precedes any '/', '?'.
  size_t i = 0;
  while (i < ref.size() && is_scheme_char(ref[i], i == 0)) ++i;
  if (i > 0 && i < ref.size() && ref[i] == ':') {
    c.scheme = std::string(ref.substr(0, i));
    ref = ref.substr(i + 1);
  }
  if (ref.size() >= 2 && ref[0] == '/' && ref[1] == '/') {
    ref = ref.substr(2);
    size_t end = ref.find_first_of("/?");
    c.has_authority = true;
    c.authority = std::string(ref.substr(0, end));
    ref = end == std::string_view::npos ? std::string_view{} : ref.substr(end);
  }
  if (auto q = ref.find('?'); q != std::string_view::npos) {
    c.has_query = true;
    c.query = std::string(ref.substr(q + 1));
    ref = ref.substr(0, q);
  }
  c.path = std::string(ref);
  return c;
}

std::string Components::to_string() const {
  std::string out;
  if (!scheme.empty()) out += scheme + ":";
  if (has_authority) out += "//" + authority;
  out += path;
  if (has_query) out += "?" + query;
  if (has_fragment) out += "#" + fragment;
  return out;
}

std::string remove_dot_segments(std::string_view input) {
  std::string in(input);
  std::string out;
  while (!in.empty()) {
    if (in.rfind("../", 0) == 0) {
      in.erase(0, 3);
    } else if (in.rfind("./", 0) == 0) {
      in.erase(0, 2);
    } else if (in.rfind("/./", 0) == 0) {
      in.replace(0, 3, "/");
    } else if (in == "/.") {
      in = "/";
    } else if (in.rfind("/../", 0) == 0 || in == "/..") {
      in = in.size() == 3 ? std::string("/") : in.substr(3);
      auto slash = out.rfind('/');
      out.erase(slash == std::string::npos ? 0 : slash);
    } else if (in == "." || in == "..") {
      in.clear();
    } else {
      size_t start = in[0] == '/' ? 1 : 0;
      size_t next = in.find('/', start);
      if (next == std::string::npos) next = in.size();
      out.append(in, 0, next);
      in.erase(0, next);
    }
  }
  return out;
}

std::optional<std::string> resolve(std::string_view base_str, std::string_view reference) {
  Components base = split(base_str);
  if (base.scheme.empty()) return std::nullopt;
  Components ref = split(reference);
  Components t;
  if (!ref.scheme.empty()) {
    t.scheme = ref.scheme;
    t.has_authority = ref.has_authority;
    t.authority = ref.authority;
    t.path = remove_dot_segments(ref.path);
    t.has_query = ref.has_query;
    t.query = ref.query;
  } else {
    if (ref.has_authority) {
      t.has_authority = true;
      t.authority = ref.authority;
      t.path = remove_dot_segments(ref.path);
      t.has_query = ref.has_query;
      t.query = ref.query;
    } else {
      if (ref.path.empty()) {
        t.path = base.path;
        t.has_query = ref.has_query || base.has_query;
        t.query = ref.has_query ? ref.query : base.query;
      } else {
        t.path = ref.path[0] == '/' ? remove_dot_segments(ref.path)
                                    : remove_dot_segments(merge_paths(base, ref.path));
        t.has_query = ref.has_query;
        t.query = ref.query;
      }
      t.has_authority = base.has_authority;
      t.authority = base.authority;
    }
    t.scheme = base.scheme;
  }
  return t.to_string();
}

std::string canonicalize(std::string_view raw) {
  Components c = split(raw);
  if (c.scheme.empty() || !c.has_authority || c.authority.empty()) {
    fail(ErrorCode::kNotAbsoluteUrl, "not an absolute URL: '" + std::string(raw) + "'");
  }
  std::string scheme = lower(c.scheme);
  std::string authority = lower(c.authority);
  if (auto at = authority.rfind('@'); at != std::string::npos) authority.erase(0, at + 1);

  std::string host = authority;
  std::string port;
  if (!host.empty() && host[0] == '[') {
    auto close = host.find(']');
    if (close != std::string::npos && close + 1 < host.size() && host[close + 1] == ':') {
      port = host.substr(close + 2);
      host.resize(close + 1);
    }
  } else if (auto colon = host.rfind(':'); colon != std::string::npos) {
    port = host.substr(colon + 1);
    host.resize(colon);
  }
  if (port == default_port(scheme)) port.clear();
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);
  if (host.empty()) fail(ErrorCode::kNotAbsoluteUrl, "empty host in '" + std::string(raw) + "'");

  std::string key;
  if (host[0] == '[') {
    key = host;
  } else {
    std::vector<std::string_view> labels;
    std::string_view h(host);
    size_t start = 0;
    for (;;) {
      size_t dot = h.find('.', start);
      labels.push_back(h.substr(start, dot - start));
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
      if (!key.empty()) key.push_back(',');
      key.append(*it);
    }
  }
  if (!port.empty()) key += ":" + port;
  key.push_back(')');
  std::string path = lower(c.path);
  key += path.empty() ? "/" : path;
  if (c.has_query && !c.query.empty()) {
    std::string query = lower(c.query);
    std::vector<std::string> params;
    size_t start = 0;
    for (;;) {
      size_t amp = query.find('&', start);
      std::string param = query.substr(start, amp - start);
      if (!param.empty()) params.push_back(std::move(param));
      if (amp == std::string::npos) break;
      start = amp + 1;
    }
    std::sort(params.begin(), params.end());
    if (!params.empty()) {
      key.push_back('?');
      for (size_t i = 0; i < params.size(); ++i) {
        if (i) key.push_back('&');
        key += params[i];
      }
    }
  }
  return key;
}

}  // namespace archfmt::url
