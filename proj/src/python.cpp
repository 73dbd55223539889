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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "archfmt/bench.hpp"
#include "archfmt/cdx.hpp"
#include "archfmt/convert.hpp"
#include "archfmt/error.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/html.hpp"
#include "archfmt/query.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace archfmt;

namespace {

py::object to_py(const Value& v) {
  if (!v) return py::none();
  if (auto* i = std::get_if<int64_t>(&*v)) return py::int_(*i);
  const auto& s = std::get<std::string>(*v);
  return py::reinterpret_steal<py::str>(
      PyUnicode_DecodeUTF8(s.data(), static_cast<Py_ssize_t>(s.size()), "surrogateescape"));
}

py::dict measurement_dict(const Measurement& m) {
  py::dict d;
  d["wall_ms"] = m.wall_ms;
  d["bytes_read"] = m.bytes_read;
  d["seek_count"] = m.seek_count;
  d["open_count"] = m.open_count;
  d["records_out"] = m.records_out;
  return d;
}

query::Predicate make_predicate(std::optional<std::pair<int64_t, int64_t>> time_range,
                                std::optional<std::vector<std::string>> urls) {
  if (time_range && urls) fail(ErrorCode::kUsage, "time_range and urls are exclusive");
  if (time_range) return query::Predicate::time_range(time_range->first, time_range->second);
  if (urls) {
    std::vector<std::string> keys;
    for (const auto& u : *urls) keys.push_back(cdx::urlkey_of(u));
    return query::Predicate::url_list(std::move(keys));
  }
  return query::Predicate::none();
}

py::dict run_query(const std::string& kind, const std::string& backend,
                   const query::Dataset& data,
                   std::optional<std::pair<int64_t, int64_t>> time_range,
                   std::optional<std::vector<std::string>> urls,
                   std::vector<std::string> columns, bool materialize) {
  query::QuerySpec spec;
  spec.kind = query::parse_kind(kind);
  spec.predicate = make_predicate(time_range, urls);
  spec.projection = std::move(columns);
  query::QueryOptions options;
  options.materialize = materialize;
  query::QueryResult r;
  {
    py::gil_scoped_release release;
    r = query::run_query(spec, query::parse_backend(backend), data, options);
  }
  py::dict out;
  out["backend"] = std::string(query::backend_name(r.backend));
  out["count"] = r.count;
  out["digest"] = r.record_ids_digest;
  out["measurement"] = measurement_dict(r.measurement);
  py::list rows;
  for (const auto& row : r.meta_rows) {
    py::dict d;
    for (size_t i = 0; i < row.size(); ++i) d[py::str(spec.projection[i])] = to_py(row[i]);
    rows.append(d);
  }
  out["rows"] = rows;
  py::list records;
  Schema schema = convert::canonical_schema();
  for (const auto& c : r.records) {
    py::dict d;
    Row row = c.to_row();
    for (size_t i = 0; i < convert::kColumnCount; ++i) {
      d[py::str(schema[i].name)] =
          i == convert::kPayload ? py::object(py::bytes(c.payload)) : to_py(row[i]);
    }
    records.append(d);
  }
  out["records"] = records;
  return out;
}

}  // namespace

PYBIND11_MODULE(_archfmt, m) {
  m.doc() = "Web archive container formats: WARC, CDX, CARC and RARC.";

  static py::exception<Error> error(m, "ArchfmtError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      py::setattr(exc, "code", py::str(error_code_name(e.code())));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<query::Dataset>(m, "Dataset")
      .def(py::init([](std::vector<fs::path> warc_files, fs::path cdx, fs::path carc,
                       fs::path rarc, std::optional<fs::path> warc_dir) {
             query::Dataset d;
             d.warc_files = std::move(warc_files);
             d.cdx = std::move(cdx);
             d.carc = std::move(carc);
             d.rarc = std::move(rarc);
             if (warc_dir) d.warc_dir = *warc_dir;
             else if (!d.warc_files.empty()) d.warc_dir = d.warc_files.front().parent_path();
             return d;
           }),
           py::arg("warc_files") = std::vector<fs::path>{}, py::arg("cdx") = fs::path(),
           py::arg("carc") = fs::path(), py::arg("rarc") = fs::path(),
           py::arg("warc_dir") = std::nullopt)
      .def_readwrite("warc_files", &query::Dataset::warc_files)
      .def_readwrite("warc_dir", &query::Dataset::warc_dir)
      .def_readwrite("cdx", &query::Dataset::cdx)
      .def_readwrite("carc", &query::Dataset::carc)
      .def_readwrite("rarc", &query::Dataset::rarc);

  m.def(
      "generate_corpus",
      [](const fs::path& out_dir, uint64_t records, uint64_t seed, uint32_t domains,
         uint32_t payload_mean, double html_fraction, double template_redundancy,
         uint64_t request_records) {
        bench::SyntheticSpec spec;
        spec.record_count = records;
        spec.seed = seed;
        spec.domain_count = domains;
        spec.payload_mean_bytes = payload_mean;
        spec.html_fraction = html_fraction;
        spec.template_redundancy = template_redundancy;
        spec.request_records = request_records;
        py::gil_scoped_release release;
        return bench::generate_corpus(spec, out_dir);
      },
      py::arg("out_dir"), py::arg("records") = 1000, py::arg("seed") = 42,
      py::arg("domains") = 50, py::arg("payload_mean") = 24000, py::arg("html_fraction") = 0.8,
      py::arg("template_redundancy") = 0.7, py::arg("request_records") = 0,
      "Writes a seeded synthetic WARC corpus; returns the file paths.");

  m.def(
      "build_cdx",
      [](const std::vector<fs::path>& inputs, const fs::path& out) {
        py::gil_scoped_release release;
        return cdx::build(inputs, out);
      },
      py::arg("inputs"), py::arg("out"), "Indexes WARC files into a sorted CDX; returns the entry count.");

  m.def(
      "convert",
      [](const std::vector<fs::path>& inputs, const fs::path& output, const std::string& target,
         const std::string& sort, const std::string& timestamp_type, uint32_t rows_per_group,
         uint32_t rows_per_block, uint64_t seed) {
        convert::Options o;
        o.target = convert::parse_target(target);
        o.sort = convert::parse_sort(sort);
        if (timestamp_type == "string") o.timestamp_type = convert::TimestampType::kString;
        else if (timestamp_type != "int64") fail(ErrorCode::kUsage, "timestamp_type must be int64 or string");
        o.rows_per_group = rows_per_group;
        o.rows_per_block = rows_per_block;
        o.seed = seed;
        convert::Manifest man;
        {
          py::gil_scoped_release release;
          man = convert::convert(inputs, output, o);
        }
        py::dict d;
        d["output"] = man.output;
        d["schema"] = man.schema;
        d["sort"] = man.sort;
        d["codec"] = man.codec;
        d["in_count"] = man.in_count;
        d["out_count"] = man.out_count;
        d["excluded"] = man.excluded;
        return d;
      },
      py::arg("inputs"), py::arg("output"), py::arg("target") = "carc", py::arg("sort") = "none",
      py::arg("timestamp_type") = "int64", py::arg("rows_per_group") = 4096,
      py::arg("rows_per_block") = 1024, py::arg("seed") = 0,
      "Converts WARC files to one CARC or RARC file; returns the manifest.");

  m.def(
      "prepare_dataset",
      [](const std::vector<fs::path>& inputs, const fs::path& work_dir, const std::string& sort,
         uint64_t seed) {
        convert::Options o;
        o.sort = convert::parse_sort(sort);
        o.seed = seed;
        py::gil_scoped_release release;
        return bench::prepare_dataset(inputs, work_dir, o);
      },
      py::arg("inputs"), py::arg("work_dir"), py::arg("sort") = "timestamp", py::arg("seed") = 0,
      "Builds the CDX, CARC and RARC artifacts of a corpus.");

  m.def("query", &run_query, py::arg("kind"), py::arg("backend"), py::arg("data"),
        py::arg("time_range") = std::nullopt, py::arg("urls") = std::nullopt,
        py::arg("columns") = std::vector<std::string>{"url", "mime", "status"},
        py::arg("materialize") = true,
        "Runs a count, meta or records query. time_range is a closed (lo_ms, hi_ms) pair; "
        "urls are canonicalized before matching.");

  m.def(
      "scan_extract",
      [](const std::string& backend, const query::Dataset& data, const fs::path& out,
         const std::string& extractor) {
        query::ExtractResult r;
        {
          py::gil_scoped_release release;
          r = query::scan_extract(query::parse_backend(backend), data,
                                  query::parse_extractor(extractor), out);
        }
        py::dict d;
        d["rows"] = r.rows;
        d["measurement"] = measurement_dict(r.measurement);
        return d;
      },
      py::arg("backend"), py::arg("data"), py::arg("out"), py::arg("extractor") = "text");

  m.def("canonicalize_url", &cdx::canonicalize_url, py::arg("url"));
  m.def("timestamp14", &cdx::timestamp14_of, py::arg("epoch_ms"));
  m.def("parse_timestamp14", &cdx::parse_timestamp14, py::arg("ts"));
  m.def("parse_warc_date", &convert::parse_warc_date, py::arg("date"));
  m.def("payload_digest", [](py::bytes b) { return payload_digest(std::string(b)); },
        py::arg("payload"));
  m.def("extract_text",
        [](py::bytes payload, const std::string& mime) {
          return html::extract_text(std::string(payload), mime);
        },
        py::arg("payload"), py::arg("mime") = "text/html");
  m.def("extract_links",
        [](py::bytes payload, const std::string& base_url) {
          return html::extract_links(std::string(payload), base_url);
        },
        py::arg("payload"), py::arg("base_url"));
}
