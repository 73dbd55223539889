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

#include <gtest/gtest.h>

#include "archfmt/error.hpp"
#include "archfmt/url.hpp"
#include "test_util.hpp"

namespace archfmt::url {
namespace {

TEST(UrlTest, CanonicalizeExamples) {
  EXPECT_EQ(canonicalize("https://Www.Example.COM:443/About?b=2&a=1#x"), "com,example)/about?a=1&b=2");
  EXPECT_EQ(canonicalize("http://example.com"), "com,example)/");
  EXPECT_EQ(canonicalize("http://example.com:8080/a"), "com,example:8080)/a");
  EXPECT_EQ(canonicalize("http://user:pw@a.b.example.org./x"), "org,example,b,a)/x");
  EXPECT_EQ(canonicalize("ftp://files.example.net:21/pub"), "net,example,files)/pub");
}

TEST(UrlTest, CanonicalizeRejectsRelative) {
  for (const char* bad : {"/just/a/path", "example.com/x", "", "mailto:a@b.c"}) {
    try {
      canonicalize(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotAbsoluteUrl) << bad;
    }
  }
}

// Invariants over generated URLs: idempotent on re-rendering, insensitive to
// case, default port, "www." and fragment.
TEST(UrlTest, CanonicalizeProperties) {
  testing::Gen g(3);
  for (int i = 0; i < 2000; ++i) {
    std::string host;
    int labels = static_cast<int>(g.between(1, 4));
    for (int l = 0; l < labels; ++l) host += g.text(8, "abcdefghij") + "x.";
    host += "com";
    std::string path = "/" + g.text(12, "abcdef/");
    std::string query;
    if (g.chance(50)) query = "?" + g.text(3, "ab") + "=1&" + g.text(3, "cd") + "=2";
    std::string base = "http://" + host + path + query;
    std::string key = canonicalize(base);
    std::string upper_host = host;
    for (char& c : upper_host) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    ASSERT_EQ(canonicalize("HTTP://" + upper_host + path + query), key);
    ASSERT_EQ(canonicalize("http://www." + host + ":80" + path + query + "#frag"), key);
    ASSERT_EQ(key.find('#'), std::string::npos);
    ASSERT_EQ(key.substr(0, 4), "com,");
    ASSERT_NE(key.find(')'), std::string::npos);
  }
}

// RFC 3986 section 5.4 reference resolution examples.
TEST(UrlTest, ResolveRfc3986Examples) {
  const std::string base = "http://a/b/c/d;p?q";
  const std::pair<const char*, const char*> cases[] = {
      {"g:h", "g:h"},
      {"g", "http://a/b/c/g"},
      {"./g", "http://a/b/c/g"},
      {"g/", "http://a/b/c/g/"},
      {"/g", "http://a/g"},
      {"//g", "http://g"},
      {"?y", "http://a/b/c/d;p?y"},
      {"g?y", "http://a/b/c/g?y"},
      {"#s", "http://a/b/c/d;p?q"},
      {"g#s", "http://a/b/c/g"},
      {"g?y#s", "http://a/b/c/g?y"},
      {";x", "http://a/b/c/;x"},
      {"g;x", "http://a/b/c/g;x"},
      {"g;x?y#s", "http://a/b/c/g;x?y"},
      {"", "http://a/b/c/d;p?q"},
      {".", "http://a/b/c/"},
      {"./", "http://a/b/c/"},
      {"..", "http://a/b/"},
      {"../", "http://a/b/"},
      {"../g", "http://a/b/g"},
      {"../..", "http://a/"},
      {"../../", "http://a/"},
      {"../../g", "http://a/g"},
      {"../../../g", "http://a/g"},
      {"../../../../g", "http://a/g"},
      {"/./g", "http://a/g"},
      {"/../g", "http://a/g"},
      {"g.", "http://a/b/c/g."},
      {".g", "http://a/b/c/.g"},
      {"g..", "http://a/b/c/g.."},
      {"..g", "http://a/b/c/..g"},
      {"./../g", "http://a/b/g"},
      {"./g/.", "http://a/b/c/g/"},
      {"g/./h", "http://a/b/c/g/h"},
      {"g/../h", "http://a/b/c/h"},
      {"g;x=1/./y", "http://a/b/c/g;x=1/y"},
      {"g;x=1/../y", "http://a/b/c/y"},
      {"g?y/./x", "http://a/b/c/g?y/./x"},
      {"g?y/../x", "http://a/b/c/g?y/../x"},
      {"g#s/./x", "http://a/b/c/g"},
      {"g#s/../x", "http://a/b/c/g"},
      {"http:g", "http:g"},
  };
  for (const auto& [ref, expect] : cases) {
    auto got = resolve(base, ref);
    ASSERT_TRUE(got.has_value()) << ref;
    EXPECT_EQ(*got, expect) << ref;
  }
  EXPECT_FALSE(resolve("relative/base", "g").has_value());
}

TEST(UrlTest, RemoveDotSegments) {
  EXPECT_EQ(remove_dot_segments("/a/b/c/./../../g"), "/a/g");
  EXPECT_EQ(remove_dot_segments("mid/content=5/../6"), "mid/6");
}

TEST(UrlTest, SplitRoundTrips) {
  testing::Gen g(5);
  for (int i = 0; i < 1000; ++i) {
    std::string u = "http://" + g.text(6, "abc") + "x" + "/" + g.text(8, "ab/.") +
                    (g.chance(50) ? "?" + g.text(4, "q=&") : "") +
                    (g.chance(50) ? "#" + g.text(4, "f") : "");
    ASSERT_EQ(split(u).to_string(), u);
  }
}

}  // namespace
}  // namespace archfmt::url
