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

#include "archfmt/html.hpp"

#include <algorithm>
#include <cstdint>

#include "archfmt/http.hpp"
#include "archfmt/url.hpp"

namespace archfmt::html {
namespace {

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool istarts_with(std::string_view s, size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    out += kReplacement;
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct Tag {
  std::string name;  // lowercased
  bool end = false;
  std::string_view attrs;
};

/// Walks markup, calling on_text for character data and on_tag for
/// start/end tags. Comments, doctypes and processing instructions are
/// skipped; script and style bodies are skipped whole.
template <class OnText, class OnTag>
void tokenize(std::string_view s, OnText&& on_text, OnTag&& on_tag) {
  size_t i = 0;
  size_t text_start = 0;
  auto flush = [&](size_t upto) {
    if (upto > text_start) on_text(s.substr(text_start, upto - text_start));
  };
  while (i < s.size()) {
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      flush(i);
      size_t close = s.find("-->", i + 4);
      i = close == std::string_view::npos ? s.size() : close + 3;
      text_start = i;
      continue;
    }
    char next = i + 1 < s.size() ? s[i + 1] : '\0';
    bool end = next == '/';
    size_t name_at = i + (end ? 2 : 1);
    if (next == '!' || next == '?') {
      flush(i);
      size_t close = s.find('>', i);
      i = close == std::string_view::npos ? s.size() : close + 1;
      text_start = i;
      continue;
    }
    if (name_at >= s.size() || !is_alpha(s[name_at])) {
      ++i;  // a literal '<'
      continue;
    }
    flush(i);
    size_t j = name_at;
    Tag tag;
    tag.end = end;
    while (j < s.size() && !is_space(s[j]) && s[j] != '>' && s[j] != '/') tag.name.push_back(lower(s[j++]));
    size_t attrs_at = j;
    char quote = 0;
    while (j < s.size()) {
      char c = s[j];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
      ++j;
    }
    tag.attrs = s.substr(attrs_at, j - attrs_at);
    i = j < s.size() ? j + 1 : s.size();
    on_tag(tag);
    if (!tag.end && (tag.name == "script" || tag.name == "style")) {
      std::string closing = "</" + tag.name;
      size_t k = i;
      while (k < s.size() && !istarts_with(s, k, closing)) {
        k = s.find('<', k + 1);
        if (k == std::string_view::npos) k = s.size();
      }
      size_t close = k < s.size() ? s.find('>', k) : std::string_view::npos;
      i = close == std::string_view::npos ? s.size() : close + 1;
    }
    text_start = i;
  }
  flush(s.size());
}

/// Elements that break a line when rendered; inline ones (b, a, span) do not.
bool is_block(std::string_view name) {
  static constexpr std::string_view kBlock[] = {
      "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt",
      "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li",
      "main", "nav", "ol", "p", "pre", "section", "table", "td", "th", "title", "tr", "ul"};
  return std::find(std::begin(kBlock), std::end(kBlock), name) != std::end(kBlock);
}

/// Value of a named attribute in raw tag text, or npos-marked absence.
bool find_attribute(std::string_view attrs, std::string_view name, std::string_view& value) {
  size_t i = 0;
  while (i < attrs.size()) {
    while (i < attrs.size() && (is_space(attrs[i]) || attrs[i] == '/')) ++i;
    size_t n0 = i;
    while (i < attrs.size() && !is_space(attrs[i]) && attrs[i] != '=' && attrs[i] != '/') ++i;
    std::string_view key = attrs.substr(n0, i - n0);
    while (i < attrs.size() && is_space(attrs[i])) ++i;
    std::string_view val;
    if (i < attrs.size() && attrs[i] == '=') {
      ++i;
      while (i < attrs.size() && is_space(attrs[i])) ++i;
      if (i < attrs.size() && (attrs[i] == '"' || attrs[i] == '\'')) {
        char q = attrs[i++];
        size_t v0 = i;
        while (i < attrs.size() && attrs[i] != q) ++i;
        val = attrs.substr(v0, i - v0);
        if (i < attrs.size()) ++i;
      } else {
        size_t v0 = i;
        while (i < attrs.size() && !is_space(attrs[i])) ++i;
        val = attrs.substr(v0, i - v0);
      }
    }
    if (key.size() == name.size() && istarts_with(key, 0, name)) {
      value = val;
      return true;
    }
    if (key.empty() && i < attrs.size()) ++i;
  }
  return false;
}

}  // namespace

std::string sanitize_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<uint8_t>(s[i]);
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
      ++i;
      continue;
    }
    size_t len = 0;
    uint32_t lo = 0x80, hi = 0xBF;
    if (b >= 0xC2 && b <= 0xDF) {
      len = 2;
    } else if (b >= 0xE0 && b <= 0xEF) {
      len = 3;
      if (b == 0xE0) lo = 0xA0;
      if (b == 0xED) hi = 0x9F;
    } else if (b >= 0xF0 && b <= 0xF4) {
      len = 4;
      if (b == 0xF0) lo = 0x90;
      if (b == 0xF4) hi = 0x8F;
    }
    size_t k = 1;
    if (len) {
      // Second byte has the tightened range; later bytes are plain continuations.
      for (; k < len && i + k < s.size(); ++k) {
        auto c = static_cast<uint8_t>(s[i + k]);
        uint32_t l = k == 1 ? lo : 0x80, h = k == 1 ? hi : 0xBF;
        if (c < l || c > h) break;
      }
    }
    if (len && k == len) {
      out.append(s.substr(i, len));
      i += len;
    } else {
      out += kReplacement;
      i += k;
    }
  }
  return out;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    bool done = true;
    if (name == "amp") {
      out.push_back('&');
    } else if (name == "lt") {
      out.push_back('<');
    } else if (name == "gt") {
      out.push_back('>');
    } else if (name == "quot") {
      out.push_back('"');
    } else if (name == "apos") {
      out.push_back('\'');
    } else if (name.size() >= 2 && name[0] == '#') {
      bool hexa = name[1] == 'x' || name[1] == 'X';
      std::string_view digits = name.substr(hexa ? 2 : 1);
      uint32_t cp = 0;
      bool ok = !digits.empty();
      for (char c : digits) {
        uint32_t d;
        if (c >= '0' && c <= '9') {
          d = static_cast<uint32_t>(c - '0');
        } else if (hexa && lower(c) >= 'a' && lower(c) <= 'f') {
          d = static_cast<uint32_t>(lower(c) - 'a' + 10);
        } else {
          ok = false;
          break;
        }
        cp = cp * (hexa ? 16 : 10) + d;
        if (cp > 0x10FFFF) cp = 0x110000;  // saturate; replaced below
      }
      if (ok) {
        append_utf8(out, cp);
      } else {
        done = false;
      }
    } else {
      done = false;
    }
    if (done) {
      i = semi + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::string extract_text(std::string_view payload, std::string_view mime) {
  if (!http::is_html(http::media_type(mime))) return {};
  std::string raw;
  raw.reserve(payload.size() / 2);
  tokenize(
      payload, [&](std::string_view text) { raw.append(text); },
      [&](const Tag& tag) {
        if (is_block(tag.name)) raw.push_back(' ');
      });
  std::string decoded = sanitize_utf8(decode_entities(raw));
  std::string out;
  out.reserve(decoded.size());
  bool pending_space = false;
  for (char c : decoded) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> extract_links(std::string_view payload, std::string_view base_url) {
  std::vector<std::string> links;
  tokenize(payload, [](std::string_view) {}, [&](const Tag& tag) {
    if (tag.end || tag.name != "a") return;
    std::string_view href;
    if (!find_attribute(tag.attrs, "href", href)) return;
    std::string value = decode_entities(href);
    size_t b = 0, e = value.size();
    while (b < e && is_space(value[b])) ++b;
    while (e > b && is_space(value[e - 1])) --e;
    if (auto resolved = url::resolve(base_url, std::string_view(value).substr(b, e - b))) {
      links.push_back(std::move(*resolved));
    }
  });
  return links;
}

}  // namespace archfmt::html
