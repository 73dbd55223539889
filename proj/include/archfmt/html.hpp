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

#include <string>
#include <string_view>
#include <vector>

// Deterministic, dependency-free extraction from crawled HTML payloads.
namespace archfmt::html {

/// Visible text of an HTML payload: tags removed (no separator inserted),
/// script/style bodies and comments dropped, entities decoded, whitespace
/// collapsed and trimmed, invalid UTF-8 replaced by U+FFFD. Empty for
/// non-HTML mime types.
std::string extract_text(std::string_view payload, std::string_view mime);

/// href targets of <a> tags in document order, resolved against base_url
/// with fragments removed. Unresolvable values are skipped.
std::vector<std::string> extract_links(std::string_view payload, std::string_view base_url);

/// Decodes &amp; &lt; &gt; &quot; &apos; and numeric references; anything
/// else is left as written.
std::string decode_entities(std::string_view s);

/// Replaces each maximal invalid UTF-8 subsequence with U+FFFD.
std::string sanitize_utf8(std::string_view s);

}  // namespace archfmt::html
