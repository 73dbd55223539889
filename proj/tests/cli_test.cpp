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

#include "archfmt/cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "test_util.hpp"

namespace archfmt::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "archfmt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::set<std::string> listing(const std::filesystem::path& dir) {
  std::set<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir)) names.insert(e.path().filename().string());
  return names;
}

class CliCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    auto d = (dir_->path() / "d").string();
    gen_ = invoke({"gen", "--records", "1000", "--seed", "42", "--out", d, "--payload-mean", "1500"});
    invoke({"index", d, "--out", (dir_->path() / "d.cdx").string()});
    invoke({"convert", d, "--out", (dir_->path() / "d.carc").string(), "--sort", "timestamp"});
    invoke({"convert", d, "--target", "rarc", "--out", (dir_->path() / "d.rarc").string()});
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string p(const std::string& name) { return (dir_->path() / name).string(); }

  static testing::TempDir* dir_;
  static Outcome gen_;
};
testing::TempDir* CliCorpus::dir_ = nullptr;
Outcome CliCorpus::gen_;

TEST_F(CliCorpus, GenPrintsFileList) {
  EXPECT_EQ(gen_.code, kOk);
  EXPECT_EQ(gen_.out, p("d") + "/corpus-00000.warc.gz\n");
}

TEST_F(CliCorpus, CountOnEveryBackend) {
  EXPECT_EQ(invoke({"query", "count", "--backend", "carc", "--data", p("d.carc")}).out, "1000\n");
  EXPECT_EQ(invoke({"query", "count", "--backend", "rarc", "--data", p("d.rarc")}).out, "1000\n");
  EXPECT_EQ(invoke({"query", "count", "--backend", "warc", "--data", p("d")}).out, "1000\n");
  EXPECT_EQ(invoke({"query", "count", "--backend", "warc_cdx", "--data", p("d"), "--cdx", p("d.cdx")}).out,
            "1000\n");
}

TEST_F(CliCorpus, MissingCdxIsUsageError) {
  auto r = invoke({"query", "meta", "--backend", "warc_cdx"});
  EXPECT_EQ(r.code, kUsageError);
  EXPECT_NE(r.err.find("--cdx"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliCorpus, UnknownFlagNamesToken) {
  auto r = invoke({"query", "count", "--backend", "carc", "--data", p("d.carc"), "--bogus"});
  EXPECT_EQ(r.code, kUsageError);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;
}

TEST_F(CliCorpus, TimeFlagsAcceptBothForms) {
  auto iso = invoke({"query", "meta", "--backend", "carc", "--data", p("d.carc"), "--from",
                     "2018-05-21T00:00:00Z", "--to", "2018-05-21T06:00:00Z"});
  auto digits = invoke({"query", "meta", "--backend", "carc", "--data", p("d.carc"), "--from",
                        "20180521000000", "--to", "20180521060000"});
  EXPECT_EQ(iso.code, kOk);
  EXPECT_EQ(iso.out, digits.out);
  EXPECT_GT(std::count(iso.out.begin(), iso.out.end(), '\n'), 10);
  auto bad = invoke({"query", "meta", "--backend", "carc", "--data", p("d.carc"), "--from", "May 21"});
  EXPECT_EQ(bad.code, kUsageError);
}

TEST_F(CliCorpus, UrlFileIsCanonicalized) {
  std::string meta = invoke({"query", "meta", "--backend", "carc", "--data", p("d.carc"), "--columns", "url"}).out;
  std::string first = meta.substr(meta.find('\n') + 1);
  first = first.substr(0, first.find('\n'));
  // Upper-casing the host must not change the match.
  std::string shouted = first;
  for (size_t i = 7; i < shouted.find('/', 7); ++i) shouted[i] = static_cast<char>(std::toupper(shouted[i]));
  std::ofstream(p("urls.txt")) << shouted << "\n";
  auto r = invoke({"query", "count", "--backend", "warc_cdx", "--data", p("d"), "--cdx", p("d.cdx"),
                   "--url-file", p("urls.txt")});
  EXPECT_EQ(r.code, kOk);
  EXPECT_GE(std::stoi(r.out), 1);
}

TEST_F(CliCorpus, QueriesDoNotWriteIntoInputs) {
  auto before = listing(p("d"));
  invoke({"query", "records", "--backend", "warc_cdx", "--data", p("d"), "--cdx", p("d.cdx"), "--from",
          "2018-05-21T00:00:00Z", "--to", "2018-05-21T01:00:00Z"});
  invoke({"query", "extract", "--backend", "warc", "--data", p("d"), "--out", p("ex.tsv")});
  EXPECT_EQ(listing(p("d")), before);
}

TEST_F(CliCorpus, ExtractNeedsOut) {
  EXPECT_EQ(invoke({"query", "extract", "--backend", "carc", "--data", p("d.carc")}).code, kUsageError);
}

TEST_F(CliCorpus, ErrorClasses) {
  EXPECT_EQ(invoke({"query", "count", "--backend", "carc", "--data", p("missing.carc")}).code, kDataError);
  EXPECT_EQ(invoke({"convert", p("missing.warc.gz"), "--out", p("x.carc")}).code, kIoError);
  EXPECT_EQ(invoke({"query", "count", "--backend", "avro", "--data", p("d.carc")}).code, kUsageError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsageError);
  EXPECT_EQ(invoke({}).code, kUsageError);
}

TEST_F(CliCorpus, BenchAndReport) {
  auto r = invoke({"bench", "--work", p("w"), "--warc-dir", p("d"), "--tasks", "t1", "--repeats", "1",
                   "--out", p("b.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, p("b.csv") + "\n");
  auto rep = invoke({"report", "--csv", p("b.csv"), "--out", p("rep")});
  EXPECT_EQ(rep.code, kOk);
  EXPECT_NE(rep.out.find("report.md"), std::string::npos);
  std::ofstream(p("empty.csv")).close();
  EXPECT_EQ(invoke({"report", "--csv", p("empty.csv"), "--out", p("rep2")}).code, kDataError);
}

TEST(CliHelp, ExitsZero) {
  auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("convert"), std::string::npos);
}

}  // namespace
}  // namespace archfmt::cli
