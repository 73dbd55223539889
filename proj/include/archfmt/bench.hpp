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
#include <filesystem>
#include <string>
#include <vector>

#include "archfmt/convert.hpp"
#include "archfmt/io.hpp"
#include "archfmt/query.hpp"

namespace archfmt::bench {

inline constexpr int64_t kDefaultTimeLo = 1526774400000;  // 2018-05-20T00:00:00Z
inline constexpr int64_t kDefaultTimeHi = 1527119999000;  // 2018-05-23T23:59:59Z

struct SyntheticSpec {
  uint64_t record_count = 1000;
  uint32_t domain_count = 50;
  uint32_t payload_mean_bytes = 24000;
  double html_fraction = 0.8;
  int64_t time_lo_ms = kDefaultTimeLo;
  int64_t time_hi_ms = kDefaultTimeHi;
  double template_redundancy = 0.7;
  uint64_t seed = 42;
  /// Request records interleaved evenly among the responses.
  uint64_t request_records = 0;
  uint64_t max_file_bytes = 100ull << 20;
};

/// Member-gzip WARC files named corpus-NNNNN.warc.gz, rotated once a file
/// passes max_file_bytes. Byte-identical for identical specs.
std::vector<std::filesystem::path> generate_corpus(const SyntheticSpec& spec,
                                                   const std::filesystem::path& out_dir);

/// Index of record i is HTML iff floor((i+1)f) > floor(i f).
bool is_html_index(uint64_t i, double fraction);

struct TimeRange {
  double target = 0;
  int64_t lo_ms = 0;
  int64_t hi_ms = 0;
  uint64_t matched = 0;
  double selectivity = 0;
};

/// One closed time range per target selectivity, matched fraction within
/// 10% (relative) of the target. Throws Unachievable.
std::vector<TimeRange> selectivity_ranges(const std::filesystem::path& cdx,
                                          const std::vector<double>& targets);

struct UrlList {
  double target = 0;
  std::vector<std::string> urlkeys;
  uint64_t matched = 0;
  double selectivity = 0;
};

/// URL lists sampled (seeded shuffle of distinct urlkeys) until the
/// captured-record count reaches the target selectivity.
std::vector<UrlList> selectivity_url_lists(const std::filesystem::path& cdx,
                                           const std::vector<double>& targets, uint64_t seed);

struct CostModel {
  double seek_ms = 10.0;
  double mb_per_s = 100.0;

  double modeled_ms(const Measurement& m) const;
};

/// Builds the CDX, CARC and RARC artifacts of a corpus in work_dir.
query::Dataset prepare_dataset(const std::vector<std::filesystem::path>& warc_files,
                               const std::filesystem::path& work_dir,
                               const convert::Options& options);

/// Copies the records matching `range` into a smaller corpus (WARC, CDX,
/// CARC, RARC) under out_dir.
query::Dataset derive_dataset(const query::Dataset& source, const TimeRange& range,
                              const std::filesystem::path& out_dir,
                              const convert::Options& options);

enum class Task { kT1, kT2, kT3, kT4, kT5, kT6, kSingleUrl };

std::string_view task_name(Task t);
Task parse_task(std::string_view s);

struct SuiteConfig {
  query::Dataset data;
  std::vector<query::Backend> backends{std::begin(query::kAllBackends),
                                       std::end(query::kAllBackends)};
  std::vector<Task> tasks{Task::kT1, Task::kT2, Task::kT3, Task::kT4,
                          Task::kT5, Task::kT6, Task::kSingleUrl};
  std::vector<double> selectivities{0.001, 0.01, 0.1, 0.25, 0.5, 1.0};
  int repeats = 3;
  CostModel cost;
  uint64_t seed = 42;
  /// Fraction of the corpus kept in the derived dataset for t6.
  double derived_fraction = 0.05;
  /// Scratch space for the derived dataset and extraction outputs.
  std::filesystem::path work_dir;
  convert::Options convert_options;
};

struct Cell {
  Task task = Task::kT1;
  query::Backend backend = query::Backend::kWarc;
  double selectivity = 0;
  int repeat = 0;
  Measurement measurement;
  double modeled_ms = 0;
  uint64_t dataset_bytes = 0;
  std::string digest;
};

inline constexpr std::string_view kCsvHeader =
    "task,backend,selectivity,repeat,wall_ms,bytes_read,seek_count,open_count,records_out,"
    "modeled_ms,dataset_bytes";

std::string csv_line(const Cell& c);
std::vector<Cell> parse_csv(std::string_view text);

/// Runs every (task, selectivity, repeat) across the configured backends,
/// checking that all backends agree before recording the cell. Throws
/// EquivalenceFailure. Writes the CSV to `csv_out`.
std::vector<Cell> run_suite(const SuiteConfig& config, const std::filesystem::path& csv_out);

/// Total stored bytes of each backend's artifacts.
uint64_t dataset_bytes(const query::Dataset& data, query::Backend backend);

struct SizeRow {
  std::string format;
  uint64_t bytes = 0;
  double ratio = 0;        // bytes / warc bytes
  double reference_ratio = 0;  // full-scale reference
};

std::vector<SizeRow> size_table(const std::vector<Cell>& cells);

struct Crossover {
  Task task = Task::kT4;
  bool found = false;
  double selectivity = 0;  // smallest selectivity where warc_cdx is slower
};

/// Crossover of warc_cdx over warc in median modeled_ms.
std::vector<Crossover> crossovers(const std::vector<Cell>& cells);

/// One SVG per task (wall_ms and modeled_ms vs selectivity, log-log), plus
/// report.md with the size table and crossover summary. Throws BadCsv.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& csv,
                                               const std::filesystem::path& out_dir);

}  // namespace archfmt::bench
