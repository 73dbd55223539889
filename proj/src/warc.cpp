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

#include "archfmt/warc.hpp"

#include <cctype>
#include <charconv>
#include <cstring>

#include "archfmt/error.hpp"
#include "archfmt/gzip.hpp"

namespace archfmt::warc {
namespace {

constexpr std::string_view kTerminator = "\r\n\r\n";
// Bounds the header scan so a misaligned plain read cannot buffer the whole file.
constexpr size_t kMaxHeaderBytes = 1 << 20;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_version_line(std::string_view line) {
  return line == "WARC/1.0" || line == "WARC/1.1";
}

std::string location_text(const std::string& file, uint64_t offset) {
  return file + " at offset " + std::to_string(offset);
}

std::optional<uint64_t> parse_u64(std::string_view s) {
  uint64_t v = 0;
  if (s.empty()) return std::nullopt;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Header section of a record: version line, fields, and the byte length of
/// everything up to and including the blank line.
struct HeaderBlock {
  std::vector<HeaderField> fields;
  size_t length = 0;
  uint64_t content_length = 0;
};

/// Parses the header starting at bytes[0]. Returns nullopt if the blank line
/// has not been seen yet (caller should supply more bytes).
std::optional<HeaderBlock> parse_header(std::string_view bytes, const std::string& where,
                                        ErrorCode misaligned) {
  size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) {
    if (bytes.size() >= 8 && bytes.substr(0, 5) != "WARC/") {
      fail(misaligned, "no WARC version line in " + where);
    }
    return std::nullopt;
  }
  std::string_view version = trim(bytes.substr(0, eol));
  if (!is_version_line(version)) {
    fail(misaligned, "expected WARC/1.0 or WARC/1.1 version line in " + where);
  }
  HeaderBlock hb;
  size_t pos = eol + 1;
  for (;;) {
    size_t next = bytes.find('\n', pos);
    if (next == std::string_view::npos) return std::nullopt;
    std::string_view line = bytes.substr(pos, next - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = next + 1;
    if (line.empty()) break;
    if ((line.front() == ' ' || line.front() == '\t') && !hb.fields.empty()) {
      auto& value = hb.fields.back().second;
      value.push_back(' ');
      value.append(trim(line));
      continue;
    }
    size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      fail(ErrorCode::kMalformedHeader, "header line without name in " + where);
    }
    hb.fields.emplace_back(std::string(trim(line.substr(0, colon))),
                           std::string(trim(line.substr(colon + 1))));
  }
  hb.length = pos;
  bool found = false;
  for (const auto& [name, value] : hb.fields) {
    if (iequals(name, "Content-Length")) {
      auto n = parse_u64(value);
      if (!n) fail(ErrorCode::kMalformedHeader, "bad Content-Length '" + value + "' in " + where);
      hb.content_length = *n;
      found = true;
      break;
    }
  }
  if (!found) fail(ErrorCode::kMalformedHeader, "missing Content-Length in " + where);
  return hb;
}

}  // namespace

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string_view record_type_name(RecordType t) {
  switch (t) {
    case RecordType::kWarcinfo: return "warcinfo";
    case RecordType::kRequest: return "request";
    case RecordType::kResponse: return "response";
    case RecordType::kMetadata: return "metadata";
    case RecordType::kResource: return "resource";
    case RecordType::kRevisit: return "revisit";
    case RecordType::kOther: return "other";
  }
  return "other";
}

RecordType parse_record_type(std::string_view value) {
  for (auto t : {RecordType::kWarcinfo, RecordType::kRequest, RecordType::kResponse,
                 RecordType::kMetadata, RecordType::kResource, RecordType::kRevisit}) {
    if (iequals(value, record_type_name(t))) return t;
  }
  return RecordType::kOther;
}

std::optional<std::string_view> Record::header(std::string_view name) const {
  for (const auto& [n, v] : header_fields) {
    if (iequals(n, name)) return std::string_view(v);
  }
  return std::nullopt;
}

Record Record::from_headers(std::vector<HeaderField> fields, std::string block) {
  Record r;
  r.header_fields = std::move(fields);
  r.block = std::move(block);
  auto need = [&](std::string_view name) -> std::string {
    auto v = r.header(name);
    if (!v) fail(ErrorCode::kMalformedHeader, "missing mandatory header " + std::string(name));
    return std::string(*v);
  };
  r.record_id = need("WARC-Record-ID");
  r.warc_date_raw = need("WARC-Date");
  r.type_name = need("WARC-Type");
  r.record_type = parse_record_type(r.type_name);
  auto length = parse_u64(need("Content-Length"));
  if (!length) fail(ErrorCode::kMalformedHeader, "unparseable Content-Length");
  r.content_length = *length;
  if (r.content_length != r.block.size()) {
    fail(ErrorCode::kLengthMismatch, "Content-Length " + std::to_string(r.content_length) +
                                         " but block has " + std::to_string(r.block.size()) +
                                         " bytes");
  }
  r.target_uri = std::string(r.header("WARC-Target-URI").value_or(""));
  r.content_type = std::string(r.header("Content-Type").value_or(""));
  return r;
}

Record Record::make(RecordType type, std::string record_id, std::string date,
                    std::string target_uri, std::string content_type, std::string block,
                    std::vector<HeaderField> extra) {
  std::vector<HeaderField> fields;
  fields.emplace_back("WARC-Type", std::string(record_type_name(type)));
  fields.emplace_back("WARC-Record-ID", std::move(record_id));
  fields.emplace_back("WARC-Date", std::move(date));
  if (!target_uri.empty()) fields.emplace_back("WARC-Target-URI", std::move(target_uri));
  for (auto& f : extra) fields.push_back(std::move(f));
  if (!content_type.empty()) fields.emplace_back("Content-Type", std::move(content_type));
  fields.emplace_back("Content-Length", std::to_string(block.size()));
  return from_headers(std::move(fields), std::move(block));
}

std::string serialize(const Record& record) {
  std::string out;
  size_t header_bytes = 12;
  for (const auto& [n, v] : record.header_fields) header_bytes += n.size() + v.size() + 4;
  out.reserve(header_bytes + record.block.size() + 4);
  out += "WARC/1.1\r\n";
  for (const auto& [n, v] : record.header_fields) {
    out += n;
    out += ": ";
    out += v;
    out += "\r\n";
  }
  out += "\r\n";
  out += record.block;
  out += kTerminator;
  return out;
}

Record parse_record(std::string_view bytes, const std::string& where, ErrorCode misaligned) {
  auto hb = parse_header(bytes, where, misaligned);
  if (!hb) fail(ErrorCode::kMalformedHeader, "unterminated header in " + where);
  uint64_t need = hb->length + hb->content_length;
  if (bytes.size() < need) {
    fail(ErrorCode::kLengthMismatch, "block shorter than Content-Length " +
                                         std::to_string(hb->content_length) + " in " + where);
  }
  if (bytes.size() < need + kTerminator.size() ||
      bytes.substr(need, kTerminator.size()) != kTerminator) {
    fail(ErrorCode::kMalformedHeader, "missing CRLF CRLF record terminator in " + where);
  }
  if (bytes.size() != need + kTerminator.size()) {
    fail(ErrorCode::kMalformedHeader, "unexpected bytes after record in " + where);
  }
  return Record::from_headers(std::move(hb->fields),
                              std::string(bytes.substr(hb->length, hb->content_length)));
}

struct Reader::State {
  InputFile file;
  SequentialReader reader;
  std::string name;
  std::string scratch;

  State(const std::filesystem::path& path, Measurement* stats)
      : file(path, stats), reader(file), name(path.filename().string()) {}
};

Reader::Reader(const std::filesystem::path& path, Mode mode, Measurement* stats)
    : state_(std::make_unique<State>(path, stats)), mode_(mode) {
  if (mode_ == Mode::kAuto) {
    state_->reader.fill(2);
    mode_ = gzip::has_magic(state_->reader.available()) ? Mode::kMemberGzip : Mode::kPlain;
  }
}

Reader::~Reader() = default;
Reader::Reader(Reader&&) noexcept = default;

std::optional<std::pair<Record, RecordLocation>> Reader::next() {
  auto& st = *state_;
  auto& rd = st.reader;
  if (rd.at_eof()) return std::nullopt;
  uint64_t start = rd.offset();
  std::string where = location_text(st.name, start);

  if (mode_ == Mode::kMemberGzip) {
    st.scratch.clear();
    uint64_t stored = gzip::inflate_member(rd, st.scratch, ErrorCode::kGzipCorrupt);
    Record r = parse_record(st.scratch, where, ErrorCode::kMalformedHeader);
    return std::make_pair(std::move(r), RecordLocation{st.name, start, stored});
  }

  // Plain: grow the window until the header is complete, then pull the block.
  size_t want = 4096;
  std::optional<HeaderBlock> hb;
  for (;;) {
    size_t got = rd.fill(want);
    auto avail = rd.available();
    std::string_view view(reinterpret_cast<const char*>(avail.data()), got);
    hb = parse_header(view, where, ErrorCode::kMalformedHeader);
    if (hb) break;
    if (got < want) fail(ErrorCode::kMalformedHeader, "truncated header in " + where);
    if (want >= kMaxHeaderBytes) fail(ErrorCode::kMalformedHeader, "oversized header in " + where);
    want *= 4;
  }
  uint64_t total = hb->length + hb->content_length + kTerminator.size();
  size_t got = rd.fill(total);
  if (got < hb->length + hb->content_length) {
    fail(ErrorCode::kLengthMismatch, "block shorter than Content-Length " +
                                         std::to_string(hb->content_length) + " in " + where);
  }
  auto avail = rd.available();
  std::string_view view(reinterpret_cast<const char*>(avail.data()), std::min<size_t>(got, total));
  Record r = parse_record(view, where, ErrorCode::kMalformedHeader);
  rd.consume(total);
  return std::make_pair(std::move(r), RecordLocation{st.name, start, total});
}

std::vector<std::pair<Record, RecordLocation>> scan(const std::filesystem::path& path, Mode mode,
                                                    Measurement* stats) {
  Reader reader(path, mode, stats);
  std::vector<std::pair<Record, RecordLocation>> out;
  while (auto item = reader.next()) out.push_back(std::move(*item));
  return out;
}

Record read_record_at(InputFile& file, const RecordLocation& loc, Mode mode) {
  std::string where = location_text(file.path().filename().string(), loc.offset);
  if (loc.offset >= file.size() || loc.stored_length == 0) {
    fail(ErrorCode::kBadOffset, "no record at " + where);
  }
  std::vector<uint8_t> bytes = file.read_at(loc.offset, static_cast<size_t>(loc.stored_length));
  if (mode == Mode::kAuto) mode = gzip::has_magic(bytes) ? Mode::kMemberGzip : Mode::kPlain;
  if (mode == Mode::kMemberGzip) {
    if (!gzip::has_magic(bytes)) fail(ErrorCode::kBadOffset, "no gzip member starts at " + where);
    if (bytes.size() < loc.stored_length) {
      fail(ErrorCode::kLengthMismatch, "stored length runs past end of file at " + where);
    }
    auto plain = gzip::decompress(bytes, ErrorCode::kGzipCorrupt);
    return parse_record(std::string_view(reinterpret_cast<const char*>(plain.data()), plain.size()),
                        where, ErrorCode::kBadOffset);
  }
  std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (view.substr(0, 5) != "WARC/") fail(ErrorCode::kBadOffset, "no record starts at " + where);
  return parse_record(view, where, ErrorCode::kBadOffset);
}

Record read_record_at(const std::filesystem::path& path, const RecordLocation& loc, Mode mode,
                      Measurement* stats) {
  InputFile file(path, stats);
  return read_record_at(file, loc, mode);
}

Writer::Writer(const std::filesystem::path& path, Mode mode, int gzip_level)
    : name_(path.filename().string()), out_(path), mode_(mode), level_(gzip_level) {
  if (mode_ == Mode::kAuto) mode_ = Mode::kPlain;
}

RecordLocation Writer::append(const Record& record) {
  auto declared = record.header("Content-Length");
  if (record.content_length != record.block.size() || !declared ||
      *declared != std::to_string(record.block.size())) {
    fail(ErrorCode::kLengthMismatch, "record " + record.record_id +
                                         " violates Content-Length == block size");
  }
  uint64_t start = out_.position();
  scratch_ = serialize(record);
  if (mode_ == Mode::kMemberGzip) {
    auto member = gzip::compress(
        std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(scratch_.data()),
                                 scratch_.size()),
        level_);
    out_.write(member);
  } else {
    out_.write(scratch_);
  }
  return RecordLocation{name_, start, out_.position() - start};
}

std::vector<RecordLocation> write(const std::vector<Record>& records,
                                  const std::filesystem::path& path, Mode mode, int gzip_level) {
  Writer writer(path, mode, gzip_level);
  std::vector<RecordLocation> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(writer.append(r));
  writer.close();
  return out;
}

}  // namespace archfmt::warc
