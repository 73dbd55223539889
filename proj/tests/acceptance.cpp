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

// End-to-end acceptance run on a seeded synthetic corpus. Prints one
// PASS/FAIL line per criterion and exits 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>

#include "archfmt/bench.hpp"
#include "archfmt/carc.hpp"
#include "archfmt/cdx.hpp"
#include "archfmt/civil_time.hpp"
#include "archfmt/convert.hpp"
#include "archfmt/error.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/http.hpp"
#include "archfmt/io.hpp"
#include "archfmt/query.hpp"
#include "archfmt/rarc.hpp"
#include "archfmt/url.hpp"
#include "archfmt/warc.hpp"

namespace fs = std::filesystem;
using namespace archfmt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  uint64_t records = 0;
  uint64_t seed = 42;
  fs::path work;
  std::vector<fs::path> warc_files;
  query::Dataset data;
  convert::Options options;
  double convert_seconds = 0;
  std::vector<cdx::Entry> entries;
};

const std::string& str(const Value& v) { return std::get<std::string>(*v); }
int64_t i64(const Value& v) { return std::get<int64_t>(*v); }

using Fingerprint = std::tuple<std::string, std::string, int64_t, int64_t>;

// (digest, url, timestamp_ms, content_length) straight from the WARC
// headers; the digest is the one the crawler wrote, not a recomputation.
std::vector<Fingerprint> warc_fingerprints(const std::vector<fs::path>& files,
                                           uint64_t* bad_digests) {
  std::vector<Fingerprint> out;
  for (const auto& f : files) {
    warc::Reader reader(f, warc::Mode::kAuto);
    while (auto item = reader.next()) {
      const warc::Record& r = item->first;
      if (r.record_type != warc::RecordType::kResponse) continue;
      auto p = http::payload_of(r);
      std::string declared(r.header("WARC-Payload-Digest").value_or(""));
      if (declared.rfind("sha1:", 0) == 0) declared.erase(0, 5);
      if (declared != payload_digest(p.payload)) ++*bad_digests;
      auto ts = civil::parse_iso8601(r.warc_date_raw);
      if (!ts) fail(ErrorCode::kBadDate, r.warc_date_raw);
      out.emplace_back(declared, r.target_uri, *ts, static_cast<int64_t>(p.payload.size()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome criterion1(Context& cx) {
  auto t0 = Clock::now();
  uint64_t bad = 0;
  auto truth = warc_fingerprints(cx.warc_files, &bad);
  double truth_s = seconds_since(t0);

  const std::vector<std::string> projection{"digest", "url", "timestamp", "content_length",
                                            "payload"};
  t0 = Clock::now();
  std::vector<Fingerprint> from_carc;
  uint64_t carc_bad = 0;
  carc::scan(cx.data.carc, projection, carc::ScanPredicate::none(), nullptr, [&](Row&& row) {
    if (payload_digest(str(row[4])) != str(row[0]) ||
        static_cast<int64_t>(str(row[4]).size()) != i64(row[3]))
      ++carc_bad;
    from_carc.emplace_back(str(row[0]), str(row[1]), i64(row[2]), i64(row[3]));
  });
  std::vector<Fingerprint> from_rarc;
  uint64_t rarc_bad = 0;
  rarc::scan(cx.data.rarc, nullptr, [&](Row&& row) {
    using convert::Col;
    const std::string& payload = str(row[Col::kPayload]);
    if (payload_digest(payload) != str(row[Col::kDigest]) ||
        static_cast<int64_t>(payload.size()) != i64(row[Col::kContentLength]))
      ++rarc_bad;
    from_rarc.emplace_back(str(row[Col::kDigest]), str(row[Col::kUrl]), i64(row[Col::kTimestamp]),
                           i64(row[Col::kContentLength]));
  });
  double read_s = seconds_since(t0);
  std::sort(from_carc.begin(), from_carc.end());
  std::sort(from_rarc.begin(), from_rarc.end());

  auto agree = [&](const std::vector<Fingerprint>& v) {
    uint64_t same = 0;
    for (size_t i = 0; i < std::min(v.size(), truth.size()); ++i) same += v[i] == truth[i];
    return same;
  };
  uint64_t carc_same = agree(from_carc), rarc_same = agree(from_rarc);
  double runtime = cx.convert_seconds + read_s;
  Outcome o;
  o.pass = bad == 0 && carc_bad == 0 && rarc_bad == 0 && from_carc == truth &&
           from_rarc == truth && !truth.empty() && runtime < 600;
  o.detail = fmt(
      "%zu records; carc %llu/%zu and rarc %llu/%zu fingerprints match; digest failures "
      "warc %llu carc %llu rarc %llu; convert+read %.1f s (limit 600 s; warc oracle %.1f s)",
      truth.size(), (unsigned long long)carc_same, truth.size(), (unsigned long long)rarc_same,
      truth.size(), (unsigned long long)bad, (unsigned long long)carc_bad,
      (unsigned long long)rarc_bad, runtime, truth_s);
  return o;
}

Outcome criterion2(Context& cx) {
  std::mt19937_64 rng(cx.seed ^ 0xC2);
  std::vector<int64_t> times;
  std::vector<std::string> keys;
  for (const auto& e : cx.entries) {
    times.push_back(cdx::parse_timestamp14(e.timestamp14));
    keys.push_back(e.urlkey);
  }
  std::sort(times.begin(), times.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const query::Kind kinds[] = {query::Kind::kCount, query::Kind::kMeta, query::Kind::kRecords};

  int agreed = 0, oracle_ok = 0;
  std::string first_failure;
  for (int q = 0; q < 50; ++q) {
    query::QuerySpec spec;
    spec.kind = kinds[rng() % 3];
    if (spec.kind == query::Kind::kMeta) spec.projection = {"url", "mime", "status", "digest"};
    if (rng() % 2 == 0) {
      // Width drawn log-uniformly between a single record and half the corpus.
      double frac = std::exp(std::log(1.0 / times.size()) * std::uniform_real_distribution<>(0, 1)(rng)) * 0.5;
      size_t width = std::max<size_t>(1, static_cast<size_t>(frac * times.size()));
      size_t lo = rng() % (times.size() - std::min(width, times.size() - 1));
      size_t hi = std::min(times.size() - 1, lo + width - 1);
      spec.predicate = query::Predicate::time_range(times[lo], times[hi] + 999);
    } else {
      std::vector<std::string> pick;
      size_t n = 1 + rng() % 20;
      for (size_t i = 0; i < n; ++i) pick.push_back(keys[rng() % keys.size()]);
      if (rng() % 4 == 0) pick.push_back("example,absent)/nothing-here");
      spec.predicate = query::Predicate::url_list(pick);
    }
    uint64_t expected = 0;
    for (const auto& e : cx.entries)
      expected += spec.predicate.matches(e.urlkey, cdx::parse_timestamp14(e.timestamp14));

    query::QueryOptions qo;
    qo.materialize = false;
    std::set<std::string> digests;
    uint64_t count = 0;
    for (auto b : query::kAllBackends) {
      auto r = query::run_query(spec, b, cx.data, qo);
      digests.insert(r.record_ids_digest);
      count = r.count;
    }
    bool same = digests.size() == 1;
    agreed += same;
    oracle_ok += same && count == expected;
    if ((!same || count != expected) && first_failure.empty())
      first_failure = fmt("; first failure: query %d (%s)", q,
                          std::string(query::kind_name(spec.kind)).c_str());
  }
  Outcome o;
  o.pass = agreed == 50 && oracle_ok == 50;
  o.detail = fmt("%d/50 queries agree across 4 backends, %d/50 match the CDX count oracle%s",
                 agreed, oracle_ok, first_failure.c_str());
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome criterion3(Context& cx) {
  uint64_t carc_bytes = archfmt::file_size(cx.data.carc);
  query::QueryOptions qo;
  qo.materialize = false;
  query::QuerySpec count_spec{query::Kind::kCount, {}, {}, {}};
  query::QuerySpec meta_spec{query::Kind::kMeta, {}, {"url", "mime", "status"}, {}};

  auto measure = [&](const query::QuerySpec& spec, query::Backend b, Measurement* last) {
    std::vector<double> walls;
    for (int i = 0; i < 3; ++i) {
      auto r = query::run_query(spec, b, cx.data, qo);
      walls.push_back(r.measurement.wall_ms);
      *last = r.measurement;
    }
    return median(walls);
  };
  Measurement cc, cm, wc, wm;
  double carc_count = measure(count_spec, query::Backend::kCarc, &cc);
  double carc_meta = measure(meta_spec, query::Backend::kCarc, &cm);
  double warc_count = measure(count_spec, query::Backend::kWarc, &wc);
  double warc_meta = measure(meta_spec, query::Backend::kWarc, &wm);

  double count_frac = double(cc.bytes_read) / carc_bytes;
  double meta_frac = double(cm.bytes_read) / carc_bytes;
  double count_speedup = warc_count / std::max(carc_count, 1e-3);
  double meta_speedup = warc_meta / std::max(carc_meta, 1e-3);
  Outcome o;
  o.pass = count_frac <= 0.05 && meta_frac <= 0.05 && count_speedup >= 10 && meta_speedup >= 10;
  o.detail = fmt(
      "carc bytes_read count %.4f%% meta %.3f%% of %llu (limit 5%%); speedup over warc scan "
      "count %.0fx (%.2f vs %.1f ms) meta %.0fx (%.2f vs %.1f ms) (limit 10x)",
      100 * count_frac, 100 * meta_frac, (unsigned long long)carc_bytes, count_speedup,
      carc_count, warc_count, meta_speedup, carc_meta, warc_meta);
  return o;
}

Outcome criterion4(Context& cx) {
  auto ranges = bench::selectivity_ranges(cx.data.cdx, {0.01});
  const auto& r = ranges.front();
  auto pred = carc::ScanPredicate::range("timestamp", r.lo_ms, r.hi_ms);
  auto footer = carc::read_footer(cx.data.carc);
  size_t g = footer.row_groups.size();
  size_t planned = carc::plan_row_groups(footer, pred).size();
  size_t bound = static_cast<size_t>(std::ceil(0.01 * g)) + 2;

  convert::Options nopp = cx.options;
  nopp.timestamp_type = convert::TimestampType::kString;
  fs::path nopp_path = cx.work / "nopp.carc";
  convert::convert(cx.warc_files, nopp_path, nopp);
  auto nopp_footer = carc::read_footer(nopp_path);
  size_t nopp_planned = carc::plan_row_groups(nopp_footer, pred).size();
  size_t nopp_g = nopp_footer.row_groups.size();

  // Same rows either way; only the amount of skipping differs.
  uint64_t pp_rows = carc::count(cx.data.carc, pred, nullptr);
  uint64_t nopp_rows = carc::count(nopp_path, pred, nullptr);
  fs::remove(nopp_path);
  fs::remove(convert::manifest_path(nopp_path));

  Outcome o;
  o.pass = planned <= bound && nopp_planned == nopp_g && pp_rows == nopp_rows &&
           pp_rows == r.matched;
  o.detail = fmt(
      "1%% range (selectivity %.4f): planned %zu of %zu groups (limit %zu); No-PP planned %zu "
      "of %zu; matched rows %llu vs %llu (CDX %llu)",
      r.selectivity, planned, g, bound, nopp_planned, nopp_g, (unsigned long long)pp_rows,
      (unsigned long long)nopp_rows, (unsigned long long)r.matched);
  return o;
}

Outcome criterion5(Context& cx) {
  bench::SuiteConfig config;
  config.data = cx.data;
  config.backends = {query::Backend::kWarc, query::Backend::kWarcCdx};
  config.tasks = {bench::Task::kT4};
  config.repeats = 1;
  config.seed = cx.seed;
  config.work_dir = cx.work / "suite";
  config.convert_options = cx.options;
  fs::create_directories(config.work_dir);
  auto cells = bench::run_suite(config, cx.work / "t4.csv");

  std::vector<const bench::Cell*> warc, cdx;
  for (const auto& c : cells)
    (c.backend == query::Backend::kWarc ? warc : cdx).push_back(&c);
  auto by_sel = [](const bench::Cell* a, const bench::Cell* b) {
    return a->selectivity < b->selectivity;
  };
  std::sort(warc.begin(), warc.end(), by_sel);
  std::sort(cdx.begin(), cdx.end(), by_sel);

  bool constant = std::all_of(warc.begin(), warc.end(), [&](const bench::Cell* c) {
    return c->measurement.bytes_read == warc.front()->measurement.bytes_read;
  });

  // Least-squares fit of bytes_read against matched records.
  double n = cdx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto* c : cdx) {
    double x = c->measurement.records_out, y = c->measurement.bytes_read;
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  double r2 = (vx > 0 && vy > 0) ? cov * cov / (vx * vy) : 0;
  double slope = vx > 0 ? cov / vx : 0;

  bool exceeds = false;
  double first = 0, interpolated = 0;
  for (size_t i = 0; i < cdx.size() && i < warc.size(); ++i) {
    double s = cdx[i]->selectivity;
    if (cdx[i]->modeled_ms > warc[i]->modeled_ms) {
      if (s > 0.01 && s <= 1.0) exceeds = true;
      if (first == 0) {
        first = s;
        interpolated = s;
        if (i > 0) {
          // Log-linear interpolation of the gap between adjacent sweep points.
          double g0 = cdx[i - 1]->modeled_ms - warc[i - 1]->modeled_ms;
          double g1 = cdx[i]->modeled_ms - warc[i]->modeled_ms;
          double l0 = std::log(cdx[i - 1]->selectivity), l1 = std::log(s);
          interpolated = std::exp(l0 + (l1 - l0) * (-g0) / (g1 - g0));
        }
      }
    }
  }
  std::string sweep;
  for (size_t i = 0; i < cdx.size() && i < warc.size(); ++i)
    sweep += fmt(" %.3g:%.0f/%.0f", cdx[i]->selectivity, cdx[i]->modeled_ms, warc[i]->modeled_ms);

  Outcome o;
  o.pass = constant && r2 >= 0.99 && slope > 0 && exceeds;
  o.detail = fmt(
      "warc bytes constant=%s; warc_cdx bytes ~ matched R^2 %.5f (%.0f B/record); crossover "
      "%s (first sweep point %.3g, interpolated %.4f); modeled ms cdx/warc:%s",
      constant ? "yes" : "no", r2, slope, exceeds ? "found" : "not found", first, interpolated,
      sweep.c_str());
  return o;
}

Outcome criterion6(Context& cx, query::Dataset& derived) {
  auto range = bench::selectivity_ranges(cx.data.cdx, {0.05}).front();
  derived = bench::derive_dataset(cx.data, range, cx.work / "derived", cx.options);

  struct Run {
    double wall = 0;
    Measurement m;
    std::string digest;
  };
  std::map<query::Backend, Run> runs;
  for (auto b : query::kAllBackends) {
    fs::path out = cx.work / fmt("extract-%s.tsv", std::string(query::backend_name(b)).c_str());
    std::vector<double> walls;
    Run run;
    for (int i = 0; i < 3; ++i) {
      auto r = query::scan_extract(b, derived, query::Extractor::kText, out);
      walls.push_back(r.measurement.wall_ms);
      run.m = r.measurement;
    }
    run.wall = median(walls);
    run.digest = hex(sha1(read_text_file(out)));
    fs::remove(out);
    runs[b] = run;
  }
  const auto& w = runs[query::Backend::kWarc];
  const auto& wc = runs[query::Backend::kWarcCdx];
  const auto& c = runs[query::Backend::kCarc];
  const auto& r = runs[query::Backend::kRarc];
  bool same = w.digest == wc.digest && w.digest == c.digest && w.digest == r.digest;
  double carc_speed = w.wall / c.wall, rarc_speed = w.wall / r.wall;
  double carc_seeks = double(wc.m.seek_count) / std::max<uint64_t>(c.m.seek_count, 1);
  double rarc_seeks = double(wc.m.seek_count) / std::max<uint64_t>(r.m.seek_count, 1);
  Outcome o;
  o.pass = same && carc_speed >= 2 && rarc_speed >= 2 && carc_seeks >= 5 && rarc_seeks >= 5;
  o.detail = fmt(
      "derived %llu records; outputs identical=%s; wall ms warc %.0f warc_cdx %.0f carc %.0f "
      "rarc %.0f -> speedup carc %.2fx rarc %.2fx (limit 2x); seeks warc_cdx %llu carc %llu "
      "rarc %llu -> %.0fx / %.0fx fewer (limit 5x)",
      (unsigned long long)range.matched, same ? "yes" : "no", w.wall, wc.wall, c.wall, r.wall,
      carc_speed, rarc_speed, (unsigned long long)wc.m.seek_count,
      (unsigned long long)c.m.seek_count, (unsigned long long)r.m.seek_count, carc_seeks,
      rarc_seeks);
  return o;
}

Outcome criterion7(Context& cx) {
  uint64_t warc_b = 0;
  for (const auto& f : cx.warc_files) warc_b += archfmt::file_size(f);
  uint64_t carc_b = archfmt::file_size(cx.data.carc), rarc_b = archfmt::file_size(cx.data.rarc);
  uint64_t cdx_b = archfmt::file_size(cx.data.cdx);
  // Full-scale sizes (TB): WARC 0.985, WARC-CDX 0.998, Avro 1.321, Parquet 0.914.
  const double ref_carc = 0.914 / 0.985, ref_rarc = 1.321 / 0.985,
               ref_cdx = 0.998 / 0.985;
  Outcome o;
  o.pass = carc_b <= warc_b && warc_b <= rarc_b;
  o.detail = fmt(
      "bytes warc %llu carc %llu rarc %llu; carc/warc %.3f (full scale %.3f), rarc/warc %.3f "
      "(full scale %.3f), warc+cdx/warc %.3f (full scale %.3f)",
      (unsigned long long)warc_b, (unsigned long long)carc_b, (unsigned long long)rarc_b,
      double(carc_b) / warc_b, ref_carc, double(rarc_b) / warc_b, ref_rarc,
      double(warc_b + cdx_b) / warc_b, ref_cdx);
  return o;
}

Outcome criterion8(Context& cx, const query::Dataset& derived) {
  convert::Options o8 = cx.options;
  o8.target = convert::Target::kRarc;
  o8.rows_per_block = 16;
  fs::path path = cx.work / "split.rarc";
  convert::convert(derived.warc_files, path, o8);
  uint64_t size = archfmt::file_size(path);

  std::vector<std::string> full;
  rarc::scan(path, nullptr, [&](Row&& row) { full.push_back(str(row[convert::Col::kDigest])); });

  std::mt19937_64 rng(cx.seed ^ 0xC8);
  int held = 0;
  for (int i = 0; i < 100; ++i) {
    uint64_t k = rng() % (size + 1);
    std::vector<std::string> parts;
    auto sink = [&](Row&& row) { parts.push_back(str(row[convert::Col::kDigest])); };
    rarc::resync(path, 0, k, nullptr, sink);
    rarc::resync(path, k, nullptr, sink);
    held += parts == full;
  }
  fs::remove(path);
  fs::remove(convert::manifest_path(path));
  Outcome o;
  o.pass = held == 100 && !full.empty();
  o.detail = fmt("%d/100 random splits reproduce the %zu-row full read exactly (file %llu bytes, "
                 "16 rows per block)",
                 held, full.size(), (unsigned long long)size);
  return o;
}

// Property checks of the pure functions, each against an independent oracle.
struct PropertyRun {
  std::string name;
  int cases = 0;
  int failures = 0;
};

PropertyRun planner_property(std::mt19937_64& rng) {
  PropertyRun run{"plan_row_groups soundness", 2000, 0};
  Schema schema({{"ts", ColumnType::kInt64, false}, {"key", ColumnType::kString, false}});
  for (int c = 0; c < run.cases; ++c) {
    size_t groups = 1 + rng() % 12;
    carc::Footer footer;
    footer.schema = schema;
    std::vector<std::vector<int64_t>> ts(groups);
    std::vector<std::vector<std::string>> keys(groups);
    for (size_t g = 0; g < groups; ++g) {
      size_t rows = 1 + rng() % 8;
      carc::RowGroupMeta meta;
      meta.row_count = rows;
      for (size_t r = 0; r < rows; ++r) {
        ts[g].push_back(static_cast<int64_t>(rng() % 200) - 50);
        keys[g].push_back(std::string(1 + rng() % 3, static_cast<char>('a' + rng() % 6)));
      }
      carc::ChunkMeta tc, kc;
      tc.min = *std::min_element(ts[g].begin(), ts[g].end());
      tc.max = *std::max_element(ts[g].begin(), ts[g].end());
      kc.min = *std::min_element(keys[g].begin(), keys[g].end());
      kc.max = *std::max_element(keys[g].begin(), keys[g].end());
      meta.columns = {tc, kc};
      footer.row_groups.push_back(meta);
      footer.total_rows += rows;
    }
    carc::ScanPredicate pred;
    switch (rng() % 3) {
      case 0: {
        int64_t a = static_cast<int64_t>(rng() % 240) - 70, b = a + static_cast<int64_t>(rng() % 60);
        pred = carc::ScanPredicate::range("ts", a, b);
        break;
      }
      case 1: {
        std::vector<Scalar> vals;
        for (int i = 0, n = 1 + rng() % 4; i < n; ++i)
          vals.emplace_back(std::string(1 + rng() % 3, static_cast<char>('a' + rng() % 6)));
        pred = carc::ScanPredicate::set("key", vals);
        break;
      }
      default:
        pred = carc::ScanPredicate::none();
    }
    auto planned = carc::plan_row_groups(footer, pred);
    std::set<size_t> chosen(planned.begin(), planned.end());
    for (size_t g = 0; g < groups; ++g) {
      bool any = false;
      for (size_t r = 0; r < ts[g].size(); ++r) {
        Value v = pred.column == "key" ? Value(keys[g][r]) : Value(ts[g][r]);
        any |= pred.kind == carc::ScanPredicate::Kind::kNone || pred.matches(v);
      }
      if (any && !chosen.count(g)) {
        ++run.failures;
        break;
      }
    }
  }
  return run;
}

PropertyRun timestamp_property(std::mt19937_64& rng) {
  PropertyRun run{"timestamp codecs vs timegm", 3000, 0};
  for (int c = 0; c < run.cases; ++c) {
    // 1900-01-01 .. 2199-12-31
    int64_t secs = static_cast<int64_t>(rng() % 9467280000ull) - 2208988800ll;
    int ms = static_cast<int>(rng() % 1000);
    int64_t epoch_ms = secs * 1000 + ms;
    std::tm tm{};
    time_t t = static_cast<time_t>(secs);
    gmtime_r(&t, &tm);
    char ts14[32], iso[40];
    std::strftime(ts14, sizeof ts14, "%Y%m%d%H%M%S", &tm);
    std::strftime(iso, sizeof iso, "%Y-%m-%dT%H:%M:%S", &tm);
    std::string iso_ms = std::string(iso) + fmt(".%03dZ", ms);

    bool ok = cdx::timestamp14_of(epoch_ms) == ts14 &&
              cdx::parse_timestamp14(ts14) == secs * 1000 &&
              convert::parse_warc_date(iso_ms) == epoch_ms &&
              convert::parse_warc_date(std::string(iso) + "Z") == secs * 1000 &&
              static_cast<int64_t>(timegm(&tm)) == secs;
    run.failures += !ok;
  }
  return run;
}

PropertyRun url_property(std::mt19937_64& rng) {
  PropertyRun run{"canonicalize_url invariances", 2000, 0};
  const char* tlds[] = {"com", "org", "net", "example"};
  auto word = [&](size_t n) {
    std::string w;
    for (size_t i = 0; i < n; ++i) w += static_cast<char>('a' + rng() % 26);
    return w;
  };
  for (int c = 0; c < run.cases; ++c) {
    std::string host = word(1 + rng() % 8) + "." + word(1 + rng() % 6) + "." + tlds[rng() % 4];
    std::string path;
    for (int i = 0, n = rng() % 4; i < n; ++i) path += "/" + word(1 + rng() % 6);
    std::vector<std::string> params;
    for (int i = 0, n = rng() % 4; i < n; ++i) params.push_back(word(1 + rng() % 3) + "=" + word(rng() % 3));
    auto join = [](const std::vector<std::string>& ps) {
      std::string q;
      for (const auto& p : ps) q += (q.empty() ? "" : "&") + p;
      return q;
    };
    std::string base = "http://" + host + (path.empty() ? "/" : path) +
                       (params.empty() ? "" : "?" + join(params));

    std::string upper = host;
    for (auto& ch : upper)
      if (rng() % 2) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    auto shuffled = params;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::string variant = std::string(rng() % 2 ? "HTTP" : "http") + "://" + upper +
                          (rng() % 2 ? ":80" : "") + (path.empty() ? "/" : path) +
                          (shuffled.empty() ? "" : "?" + join(shuffled)) + "#" + word(rng() % 4);

    std::string key = cdx::canonicalize_url(base);
    // Oracle: reversed host labels, ")", lowercased path, sorted query.
    std::vector<std::string> labels;
    std::stringstream hs(host);
    for (std::string l; std::getline(hs, l, '.');) labels.push_back(l);
    std::reverse(labels.begin(), labels.end());
    if (labels.back() == "www") labels.pop_back();
    std::string expect;
    for (const auto& l : labels) expect += (expect.empty() ? "" : ",") + l;
    auto sorted = params;
    std::sort(sorted.begin(), sorted.end());
    expect += ")" + (path.empty() ? std::string("/") : path) +
              (sorted.empty() ? "" : "?" + join(sorted));

    bool ok = key == expect && cdx::canonicalize_url(variant) == key;
    run.failures += !ok;
  }
  return run;
}

Outcome criterion9(Context& cx) {
  std::mt19937_64 rng(cx.seed ^ 0xC9);
  std::vector<PropertyRun> runs{planner_property(rng), timestamp_property(rng), url_property(rng)};
  Outcome o;
  o.pass = true;
  for (const auto& r : runs) {
    o.pass &= r.failures == 0 && r.cases >= 1000;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += fmt("%s %d/%d", r.name.c_str(), r.cases - r.failures, r.cases);
  }
  o.detail += " (module suites run under ctest)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"archfmt acceptance run"};
  uint64_t records = 200000;
  uint64_t seed = 42;
  std::string work, report;
  bool keep = false;
  app.add_option("--records", records, "Synthetic corpus size");
  app.add_option("--seed", seed);
  app.add_option("--work", work, "Scratch directory (default: a fresh temp dir)");
  app.add_option("--report", report, "Also write the result lines to this file");
  app.add_flag("--keep", keep, "Keep the scratch directory");
  CLI11_PARSE(app, argc, argv);

  Context cx;
  cx.records = records;
  cx.seed = seed;
  cx.work = work.empty() ? fs::temp_directory_path() / fmt("archfmt-acceptance-%d", getpid())
                         : fs::path(work);
  std::vector<std::string> lines;
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    lines.push_back(line);
  };

  int failed = 0;
  try {
    fs::remove_all(cx.work);
    fs::create_directories(cx.work);

    bench::SyntheticSpec spec;
    spec.record_count = records;
    spec.seed = seed;
    auto t0 = Clock::now();
    cx.warc_files = bench::generate_corpus(spec, cx.work / "warc");
    uint64_t warc_bytes = 0;
    for (const auto& f : cx.warc_files) warc_bytes += archfmt::file_size(f);
    emit(fmt("setup: %llu records, %zu WARC files, %llu bytes, generated in %.1f s",
             (unsigned long long)records, cx.warc_files.size(), (unsigned long long)warc_bytes,
             seconds_since(t0)));

    cx.options.sort = convert::SortOrder::kTimestamp;
    cx.options.seed = seed;
    fs::path data = cx.work / "data";
    fs::create_directories(data);
    cx.data.warc_files = cx.warc_files;
    cx.data.warc_dir = cx.warc_files.front().parent_path();
    cx.data.cdx = data / "index.cdx";
    cx.data.carc = data / "data.carc";
    cx.data.rarc = data / "data.rarc";
    t0 = Clock::now();
    cdx::build(cx.warc_files, cx.data.cdx);
    double index_s = seconds_since(t0);
    t0 = Clock::now();
    convert::Options co = cx.options;
    co.target = convert::Target::kCarc;
    convert::convert(cx.warc_files, cx.data.carc, co);
    co.target = convert::Target::kRarc;
    convert::convert(cx.warc_files, cx.data.rarc, co);
    cx.convert_seconds = seconds_since(t0);
    cx.entries = cdx::parse(cx.data.cdx);
    emit(fmt("setup: CDX %zu entries in %.1f s; carc+rarc conversion %.1f s", cx.entries.size(),
             index_s, cx.convert_seconds));
  } catch (const std::exception& e) {
    emit(std::string("acceptance: harness error: ") + e.what());
    return 2;
  }

  query::Dataset derived;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"format fidelity", [&] { return criterion1(cx); }},
      {"oracle equivalence", [&] { return criterion2(cx); }},
      {"projection effect", [&] { return criterion3(cx); }},
      {"predicate pushdown", [&] { return criterion4(cx); }},
      {"selectivity crossover", [&] { return criterion5(cx); }},
      {"scan advantage", [&] { return criterion6(cx, derived); }},
      {"size ordering", [&] { return criterion7(cx); }},
      {"split recovery", [&] { return criterion8(cx, derived); }},
      {"property suites", [&] { return criterion9(cx); }},
  };
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    failed += !o.pass;
    emit(fmt("criterion %d (%s): %s", index, name, o.pass ? "PASS" : "FAIL") + " - " + o.detail +
         fmt(" [%.1f s]", seconds_since(t0)));
  }
  emit(fmt("acceptance: 9 criteria evaluated, %d passed, %d failed", 9 - failed, failed));

  if (!report.empty()) {
    std::ofstream out(report);
    for (const auto& l : lines) out << l << '\n';
  }
  if (!keep) fs::remove_all(cx.work);
  return failed == 0 ? 0 : 1;
}
