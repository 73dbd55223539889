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

#include <optional>
#include <string>
#include <string_view>

namespace archfmt::url {

/// RFC 3986 generic components. `has_*` distinguishes an absent component
/// from an empty one ("http://a/?" has an empty query).
struct Components {
  std::string scheme;
  bool has_authority = false;
  std::string authority;
  std::string path;
  bool has_query = false;
  std::string query;
  bool has_fragment = false;
  std::string fragment;

  std::string to_string() const;
};

Components split(std::string_view reference);

/// Host-reversed sort key: "https://Www.Example.COM:443/About?b=2&a=1#x"
/// becomes "com,example)/about?a=1&b=2". Throws NotAbsoluteUrl.
std::string canonicalize(std::string_view url);

/// Resolves `reference` against the absolute `base` (RFC 3986 section 5.2)
/// and drops any fragment. Returns nullopt when base is not absolute.
std::optional<std::string> resolve(std::string_view base, std::string_view reference);

std::string remove_dot_segments(std::string_view path);

}  // namespace archfmt::url
