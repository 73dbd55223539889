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

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "archfmt/bench.hpp"
#include "archfmt/cdx.hpp"
#include "archfmt/civil_time.hpp"
#include "archfmt/convert.hpp"
#include "archfmt/error.hpp"
#include "archfmt/parallel.hpp"
#include "archfmt/query.hpp"

namespace archfmt::cli {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void usage(const std::string& msg) { fail(ErrorCode::kUsage, msg); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    if (comma > start) out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

/// ISO-8601 or 14-digit CDX form.
int64_t parse_time_flag(const std::string& flag, const std::string& v) {
  if (v.size() == 14 && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    try {
      return cdx::parse_timestamp14(v);
    } catch (const Error&) {
    }
  } else if (auto ms = civil::parse_iso8601(v)) {
    return *ms;
  }
  usage(flag + ": cannot parse '" + v + "' as an ISO-8601 or 14-digit timestamp");
}

convert::TypeSet parse_types(const std::string& s) {
  convert::TypeSet types;
  for (const auto& name : split_list(s)) {
    auto t = warc::parse_record_type(name);
    if (t == warc::RecordType::kOther) usage("--include: unknown record type '" + name + "'");
    types.insert(t);
  }
  if (types.empty()) usage("--include: no record types given");
  return types;
}

bool is_warc_name(const fs::path& p) {
  std::string n = p.filename().string();
  auto ends = [&](std::string_view suf) {
    return n.size() >= suf.size() && n.compare(n.size() - suf.size(), suf.size(), suf) == 0;
  };
  return ends(".warc") || ends(".warc.gz");
}

/// Expands directories to their WARC files, sorted by name.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && is_warc_name(e.path())) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(in)) {
      files.emplace_back(in);
    } else {
      fail(ErrorCode::kIoFailure, in + ": no such file or directory");
    }
  }
  return files;
}

void print_stats(std::ostream& err, const Measurement& m) {
  nlohmann::json j = {{"wall_ms", m.wall_ms},
                      {"bytes_read", m.bytes_read},
                      {"seek_count", m.seek_count},
                      {"open_count", m.open_count},
                      {"records_out", m.records_out}};
  err << j.dump() << "\n";
}

std::string render(const Value& v) {
  if (!v) return "-";
  if (auto* i = std::get_if<int64_t>(&*v)) return std::to_string(*i);
  return query::escape_field(std::get<std::string>(*v));
}

/// Writes to --out when given, else to stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) fail(ErrorCode::kIoFailure, path + ": cannot open for writing");
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

struct GenArgs {
  uint64_t records = 1000;
  uint64_t seed = 42;
  std::string out;
  uint32_t domains = 50;
  uint32_t payload_mean = 24000;
  double html_fraction = 0.8;
  double redundancy = 0.7;
  uint64_t requests = 0;
  uint64_t max_file_mb = 100;
  std::string from, to;
};

struct ConvertArgs {
  std::string target = "carc";
  std::string out;
  std::string sort = "none";
  std::string timestamp_type = "int64";
  uint32_t rows_per_group = 4096;
  uint32_t rows_per_block = 1024;
  std::string codec = "gzip";
  int carc_level = 6;
  int rarc_level = 6;
  uint64_t seed = 0;
  std::string include = "response";
  std::vector<std::string> inputs;
};

struct QueryArgs {
  std::string kind;
  std::string backend;
  std::string data;
  std::string cdx;
  std::string from, to;
  std::string url_file;
  std::string columns = "url,mime,status";
  std::string extractor = "text";
  std::string out;
  std::string include = "response";
  bool stats = false;
};

struct BenchArgs {
  std::string work;
  std::string warc_dir;
  uint64_t records = 0;
  uint64_t seed = 42;
  std::string tasks = "t1,t2,t3,t4,t5,t6,single_url";
  std::string backends = "warc,warc_cdx,carc,rarc";
  std::string selectivities = "0.001,0.01,0.1,0.25,0.5,1.0";
  int repeats = 3;
  double seek_ms = 10;
  double mb_per_s = 100;
  std::string sort = "timestamp";
  std::string out;
};

convert::Options convert_options(const ConvertArgs& a, unsigned threads) {
  convert::Options o;
  o.target = convert::parse_target(a.target);
  o.sort = convert::parse_sort(a.sort);
  if (a.timestamp_type == "int64") {
    o.timestamp_type = convert::TimestampType::kInt64;
  } else if (a.timestamp_type == "string") {
    o.timestamp_type = convert::TimestampType::kString;
  } else {
    usage("--timestamp-type must be int64 or string");
  }
  if (a.rows_per_group == 0 || a.rows_per_block == 0) usage("row counts per group/block must be positive");
  o.rows_per_group = a.rows_per_group;
  o.rows_per_block = a.rows_per_block;
  o.codec = parse_codec(a.codec);
  if (a.carc_level < 1 || a.carc_level > 9 || a.rarc_level < 1 || a.rarc_level > 9) {
    usage("gzip levels must be within 1..9");
  }
  o.carc_gzip_level = a.carc_level;
  o.rarc_gzip_level = a.rarc_level;
  o.seed = a.seed;
  o.include = parse_types(a.include);
  o.threads = threads;
  return o;
}

int run_gen(const GenArgs& a, std::ostream& out) {
  bench::SyntheticSpec spec;
  spec.record_count = a.records;
  spec.seed = a.seed;
  spec.domain_count = a.domains;
  spec.payload_mean_bytes = a.payload_mean;
  spec.html_fraction = a.html_fraction;
  spec.template_redundancy = a.redundancy;
  spec.request_records = a.requests;
  spec.max_file_bytes = a.max_file_mb << 20;
  if (!a.from.empty()) spec.time_lo_ms = parse_time_flag("--from", a.from);
  if (!a.to.empty()) spec.time_hi_ms = parse_time_flag("--to", a.to);
  if (spec.time_hi_ms < spec.time_lo_ms) usage("--to is earlier than --from");
  if (a.html_fraction < 0 || a.html_fraction > 1) usage("--html-fraction must be within [0, 1]");
  if (a.redundancy < 0 || a.redundancy > 1) usage("--template-redundancy must be within [0, 1]");
  if (a.max_file_mb == 0) usage("--max-file-mb must be positive");
  for (const auto& f : bench::generate_corpus(spec, a.out)) out << f.string() << "\n";
  return kOk;
}

int run_index(const std::vector<std::string>& inputs, const std::string& out_path,
              const std::string& include, unsigned threads, std::ostream& out) {
  cdx::BuildOptions bo;
  bo.types = parse_types(include);
  bo.threads = threads;
  auto files = expand_inputs(inputs);
  out << cdx::build(files, out_path, bo) << "\n";
  return kOk;
}

int run_convert(const ConvertArgs& a, unsigned threads, std::ostream& out) {
  auto o = convert_options(a, threads);
  auto files = expand_inputs(a.inputs);
  auto m = convert::convert(files, a.out, o);
  out << m.to_text();
  return kOk;
}

int run_query_cmd(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  std::string kind_text = a.kind == "extract" ? "scan_extract" : a.kind;
  query::Kind kind = query::parse_kind(kind_text);
  query::Backend backend = query::parse_backend(a.backend);
  std::vector<std::string> missing;
  if (backend == query::Backend::kWarcCdx && a.cdx.empty()) missing.push_back("--cdx");
  if (a.data.empty()) missing.push_back("--data");
  if (kind == query::Kind::kScanExtract && a.out.empty()) missing.push_back("--out");
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    usage("query " + a.kind + " --backend " + a.backend + " requires " + names);
  }
  if (!a.url_file.empty() && (!a.from.empty() || !a.to.empty())) {
    usage("--url-file cannot be combined with --from/--to");
  }
  query::QuerySpec spec;
  spec.kind = kind;
  spec.extractor = query::parse_extractor(a.extractor);
  if (kind == query::Kind::kMeta) {
    spec.projection = split_list(a.columns);
    for (const auto& c : spec.projection) {
      if (std::find(std::begin(query::kMetaColumns), std::end(query::kMetaColumns), c) ==
          std::end(query::kMetaColumns)) {
        usage("--columns: unknown column '" + c + "'");
      }
    }
  }
  int64_t lo = INT64_MIN, hi = INT64_MAX;
  if (!a.from.empty()) lo = parse_time_flag("--from", a.from);
  if (!a.to.empty()) hi = parse_time_flag("--to", a.to);
  query::QueryOptions qo;
  qo.include = parse_types(a.include);

  if (!a.url_file.empty()) {
    std::ifstream in(a.url_file);
    if (!in) fail(ErrorCode::kIoFailure, a.url_file + ": cannot open");
    std::vector<std::string> keys;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) keys.push_back(cdx::urlkey_of(line));
    }
    spec.predicate = query::Predicate::url_list(std::move(keys));
  } else if (!a.from.empty() || !a.to.empty()) {
    if (hi < lo) usage("--to is earlier than --from");
    spec.predicate = query::Predicate::time_range(lo, hi);
  }

  query::Dataset data;
  switch (backend) {
    case query::Backend::kWarc:
    case query::Backend::kWarcCdx:
      data.warc_files = expand_inputs({a.data});
      data.warc_dir = fs::is_directory(a.data) ? fs::path(a.data) : fs::path(a.data).parent_path();
      data.cdx = a.cdx;
      break;
    case query::Backend::kCarc: data.carc = a.data; break;
    case query::Backend::kRarc: data.rarc = a.data; break;
  }

  if (kind == query::Kind::kScanExtract) {
    auto r = query::scan_extract(backend, data, spec.extractor, a.out, qo);
    out << r.rows << "\n";
    if (a.stats) print_stats(err, r.measurement);
    return kOk;
  }
  Sink sink(kind == query::Kind::kCount ? "" : a.out, out);
  auto r = query::run_query(spec, backend, data, qo);
  std::ostream& os = *sink;
  switch (kind) {
    case query::Kind::kCount:
      os << r.count << "\n";
      break;
    case query::Kind::kMeta: {
      for (size_t i = 0; i < spec.projection.size(); ++i) os << (i ? "\t" : "") << spec.projection[i];
      os << "\n";
      for (const auto& row : r.meta_rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "\t" : "") << render(row[i]);
        os << "\n";
      }
      break;
    }
    default:
      os << "urlkey\ttimestamp\tdigest\turl\tmime\tstatus\tcontent_length\n";
      for (const auto& c : r.records) {
        os << query::escape_field(c.urlkey) << "\t" << civil::format_iso8601(c.timestamp_ms) << "\t"
           << c.digest << "\t" << query::escape_field(c.url) << "\t" << query::escape_field(c.mime)
           << "\t" << c.status << "\t" << c.content_length << "\n";
      }
      break;
  }
  if (a.stats) {
    err << "digest " << r.record_ids_digest << "\n";
    print_stats(err, r.measurement);
  }
  return kOk;
}

int run_bench(const BenchArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
  bench::SuiteConfig cfg;
  cfg.tasks.clear();
  for (const auto& t : split_list(a.tasks)) cfg.tasks.push_back(bench::parse_task(t));
  cfg.backends.clear();
  for (const auto& b : split_list(a.backends)) cfg.backends.push_back(query::parse_backend(b));
  cfg.selectivities.clear();
  for (const auto& s : split_list(a.selectivities)) {
    try {
      size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size() || !(v > 0) || v > 1) throw std::invalid_argument(s);
      cfg.selectivities.push_back(v);
    } catch (const std::logic_error&) {
      usage("--selectivities: '" + s + "' is not a number in (0, 1]");
    }
  }
  if (a.repeats < 1) usage("--repeats must be at least 1");
  if (!(a.seek_ms >= 0) || !(a.mb_per_s > 0)) usage("cost model parameters must be positive");
  if (a.warc_dir.empty() == (a.records == 0)) usage("bench needs exactly one of --warc-dir or --records");
  cfg.repeats = a.repeats;
  cfg.cost.seek_ms = a.seek_ms;
  cfg.cost.mb_per_s = a.mb_per_s;
  cfg.seed = a.seed;
  cfg.convert_options.sort = convert::parse_sort(a.sort);
  cfg.convert_options.threads = threads;
  cfg.convert_options.seed = a.seed;
  fs::path work = a.work;
  cfg.work_dir = work / "scratch";

  std::vector<fs::path> warcs;
  if (!a.warc_dir.empty()) {
    warcs = expand_inputs({a.warc_dir});
  } else {
    bench::SyntheticSpec spec;
    spec.record_count = a.records;
    spec.seed = a.seed;
    err << "generating " << a.records << " records\n";
    warcs = bench::generate_corpus(spec, work / "warc");
  }
  err << "preparing CDX, CARC and RARC artifacts\n";
  cfg.data = bench::prepare_dataset(warcs, work / "data", cfg.convert_options);
  fs::path csv = a.out.empty() ? work / "results.csv" : fs::path(a.out);
  bench::run_suite(cfg, csv);
  if (a.out.empty()) {
    out << read_text_file(csv);
  } else {
    out << csv.string() << "\n";
  }
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return kUsageError;
    case ErrorCode::kIoFailure: return kIoError;
    default: return kDataError;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Web archive storage formats: generation, indexing, conversion, queries and benchmarks",
               "archfmt"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads_flag = 0;
  app.add_option("--threads", threads_flag, "Worker threads (default: $ARCHFMT_THREADS or 1)")
      ->check(CLI::NonNegativeNumber);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic WARC corpus");
  g->add_option("--records", gen.records, "Response records");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--domains", gen.domains, "Distinct host names")->check(CLI::PositiveNumber);
  g->add_option("--payload-mean", gen.payload_mean, "Mean payload bytes")->check(CLI::PositiveNumber);
  g->add_option("--html-fraction", gen.html_fraction, "Fraction of HTML responses");
  g->add_option("--template-redundancy", gen.redundancy, "Share of each page from per-site templates");
  g->add_option("--request-records", gen.requests, "Request records interleaved with the responses");
  g->add_option("--max-file-mb", gen.max_file_mb, "Rotate output files past this size");
  g->add_option("--from", gen.from, "Earliest capture time");
  g->add_option("--to", gen.to, "Latest capture time");

  std::vector<std::string> index_inputs;
  std::string index_out, index_include = "response";
  auto* ix = app.add_subcommand("index", "Build a sorted CDX index");
  ix->add_option("inputs", index_inputs, "WARC files or directories")->required();
  ix->add_option("--out", index_out, "CDX output path")->required();
  ix->add_option("--include", index_include, "Record types to index");

  ConvertArgs conv;
  auto* cv = app.add_subcommand("convert", "Convert WARC files to CARC or RARC");
  cv->add_option("inputs", conv.inputs, "WARC files or directories")->required();
  cv->add_option("--target", conv.target, "carc or rarc");
  cv->add_option("--out", conv.out, "Output file")->required();
  cv->add_option("--sort", conv.sort, "none, timestamp or urlkey");
  cv->add_option("--timestamp-type", conv.timestamp_type, "int64 or string");
  cv->add_option("--rows-per-group", conv.rows_per_group, "CARC rows per row group");
  cv->add_option("--rows-per-block", conv.rows_per_block, "RARC rows per block");
  cv->add_option("--codec", conv.codec, "none or gzip");
  cv->add_option("--carc-gzip-level", conv.carc_level, "CARC gzip level");
  cv->add_option("--rarc-gzip-level", conv.rarc_level, "RARC gzip level");
  cv->add_option("--seed", conv.seed, "RARC sync marker seed");
  cv->add_option("--include", conv.include, "Record types to convert");

  QueryArgs q;
  auto* qc = app.add_subcommand("query", "Run a query against one backend");
  qc->add_option("kind", q.kind, "count, meta, records or extract")->required();
  qc->add_option("--backend", q.backend, "warc, warc_cdx, carc or rarc")->required();
  qc->add_option("--data", q.data, "Backend data: CARC/RARC file, or WARC file/directory");
  qc->add_option("--cdx", q.cdx, "CDX index (warc_cdx)");
  qc->add_option("--from", q.from, "Range start, ISO-8601 or 14 digits");
  qc->add_option("--to", q.to, "Range end (inclusive)");
  qc->add_option("--url-file", q.url_file, "File of URLs, one per line");
  qc->add_option("--columns", q.columns, "Meta columns, comma separated");
  qc->add_option("--extractor", q.extractor, "text or links");
  qc->add_option("--out", q.out, "Output file");
  qc->add_option("--include", q.include, "Record types considered");
  qc->add_flag("--stats", q.stats, "Print the I/O measurement to stderr");

  BenchArgs b;
  auto* bc = app.add_subcommand("bench", "Run the benchmark suite");
  bc->add_option("--work", b.work, "Working directory")->required();
  bc->add_option("--warc-dir", b.warc_dir, "Existing WARC corpus");
  bc->add_option("--records", b.records, "Generate a corpus of this many records");
  bc->add_option("--seed", b.seed, "Random seed");
  bc->add_option("--tasks", b.tasks, "Comma-separated tasks");
  bc->add_option("--backends", b.backends, "Comma-separated backends");
  bc->add_option("--selectivities", b.selectivities, "Comma-separated selectivities");
  bc->add_option("--repeats", b.repeats, "Repeats per cell");
  bc->add_option("--seek-ms", b.seek_ms, "Cost model: ms per seek");
  bc->add_option("--mb-per-s", b.mb_per_s, "Cost model: transfer rate");
  bc->add_option("--sort", b.sort, "Sort order of the CARC/RARC artifacts");
  bc->add_option("--out", b.out, "CSV output path");

  std::string report_csv, report_out;
  auto* rc = app.add_subcommand("report", "Render SVG charts and a summary from a CSV");
  rc->add_option("--csv", report_csv, "Benchmark CSV")->required();
  rc->add_option("--out", report_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "archfmt: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    unsigned threads = resolve_threads(static_cast<unsigned>(threads_flag));
    if (g->parsed()) return run_gen(gen, out);
    if (ix->parsed()) return run_index(index_inputs, index_out, index_include, threads, out);
    if (cv->parsed()) return run_convert(conv, threads, out);
    if (qc->parsed()) return run_query_cmd(q, out, err);
    if (bc->parsed()) return run_bench(b, threads, out, err);
    for (const auto& f : bench::emit_report(report_csv, report_out)) out << f.string() << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "archfmt: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "archfmt: IoFailure: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "archfmt: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace archfmt::cli
