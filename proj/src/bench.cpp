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

#include "archfmt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "archfmt/carc.hpp"
#include "archfmt/cdx.hpp"
#include "archfmt/civil_time.hpp"
#include "archfmt/error.hpp"
#include "archfmt/hashing.hpp"
#include "archfmt/rarc.hpp"
#include "archfmt/warc.hpp"

namespace archfmt::bench {
namespace {

/// SplitMix64: tiny, portable, and identical on every platform, unlike the
/// standard distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, n).
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  double normal() {
    double u1 = 1.0 - unit();
    double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t state_;
};

uint64_t mix(uint64_t a, uint64_t b) {
  Rng r(a * 0x100000001b3ull ^ b);
  return r.next();
}

const char* const kSyllables[] = {"ka", "lo", "mi", "ren", "sa", "to", "vel", "an", "dor", "ie",
                                  "qu", "bra", "nel", "os", "ti", "mar", "pe", "lu", "gan", "es",
                                  "ro", "fin", "da", "ul", "cre", "vo", "sel", "ha", "ni", "tor"};

class Vocabulary {
 public:
  explicit Vocabulary(uint64_t seed) {
    Rng r(seed);
    words_.reserve(4096);
    for (int i = 0; i < 4096; ++i) {
      std::string w;
      int n = 1 + static_cast<int>(r.below(3));
      for (int k = 0; k < n; ++k) w += kSyllables[r.below(std::size(kSyllables))];
      words_.push_back(std::move(w));
    }
  }
  /// Skewed toward low indices so frequent words dominate, as in prose.
  const std::string& pick(Rng& r) const {
    double u = r.unit();
    return words_[static_cast<size_t>(u * u * u * static_cast<double>(words_.size()))];
  }

 private:
  std::vector<std::string> words_;
};

void append_words(std::string& out, Rng& r, const Vocabulary& v, int count) {
  for (int i = 0; i < count; ++i) {
    if (i) out.push_back(' ');
    out += v.pick(r);
  }
}

std::string domain_name(uint32_t d) { return "www.site" + std::to_string(d) + ".example"; }

/// Boilerplate shared by every page of one domain. Mostly markup, which is
/// what makes real pages compress well.
std::string make_template(uint32_t domain, uint64_t seed, size_t target, const Vocabulary& v) {
  Rng r(mix(seed, 0x7e3a11ull + domain));
  std::string t;
  t += "<link rel=\"stylesheet\" href=\"/static/site.css\">\n<style>\n";
  for (int i = 0; i < 12; ++i) {
    t += ".c-" + v.pick(r) + "{margin:0 auto;padding:" + std::to_string(r.below(16)) +
         "px 8px;color:#333;font-size:1" + std::to_string(r.below(10)) + "px}\n";
  }
  t += "</style>\n<script>var site_id=" + std::to_string(domain) +
       ";function track(p){return p&&p.length<128;}</script>\n";
  int section = 0;
  while (t.size() < target) {
    uint64_t kind = r.below(10);
    if (kind < 5) {
      t += "<nav class=\"site-nav\"><ul class=\"nav-list\">\n";
      int links = 4 + static_cast<int>(r.below(8));
      for (int i = 0; i < links; ++i) {
        const std::string& w = v.pick(r);
        t += "<li class=\"nav-item\"><a class=\"nav-link\" href=\"/section/" + w + "/\">" + w +
             "</a></li>\n";
      }
      t += "</ul></nav>\n";
    } else if (kind < 8) {
      t += "<aside class=\"sidebar\" id=\"s" + std::to_string(section++) + "\"><h3 class=\"sidebar-title\">";
      append_words(t, r, v, 3);
      t += "</h3><p class=\"sidebar-text\">";
      append_words(t, r, v, 10 + static_cast<int>(r.below(20)));
      t += "</p></aside>\n";
    } else {
      t += "<footer class=\"site-footer\"><div class=\"footer-inner\"><p>&copy; ";
      append_words(t, r, v, 4);
      t += " &amp; ";
      append_words(t, r, v, 2);
      t += "</p><a class=\"footer-link\" href=\"https://" + domain_name(domain) +
           "/contact\">contact</a></div></footer>\n";
    }
  }
  return t;
}

struct UrlPool {
  std::vector<std::string> urls;
  std::vector<uint32_t> domains;
};

UrlPool make_url_pool(const SyntheticSpec& spec, const Vocabulary& v) {
  Rng r(mix(spec.seed, 0x0412ull));
  UrlPool pool;
  uint64_t size = std::max<uint64_t>(1, spec.record_count / 2);
  uint32_t domains = std::max<uint32_t>(1, spec.domain_count);
  for (uint64_t j = 0; j < size; ++j) {
    auto d = static_cast<uint32_t>(r.below(domains));
    std::string u = "http://" + domain_name(d) + "/";
    int depth = static_cast<int>(r.below(4));
    for (int k = 0; k < depth; ++k) {
      u += v.pick(r);
      u += k + 1 < depth ? "/" : (r.chance(0.5) ? ".html" : "/");
    }
    if (r.chance(0.2)) u += "?id=" + std::to_string(r.below(100000)) + "&lang=en";
    pool.urls.push_back(std::move(u));
    pool.domains.push_back(d);
  }
  return pool;
}

std::string uuid(Rng& r) {
  uint64_t a = r.next(), b = r.next();
  char buf[48];
  std::snprintf(buf, sizeof(buf), "<urn:uuid:%08x-%04x-%04x-%04x-%012llx>",
                static_cast<unsigned>(a >> 32), static_cast<unsigned>((a >> 16) & 0xffff),
                static_cast<unsigned>(0x4000 | (a & 0x0fff)),
                static_cast<unsigned>(0x8000 | ((b >> 48) & 0x3fff)),
                static_cast<unsigned long long>(b & 0xffffffffffffull));
  return buf;
}

std::string http_date(int64_t ms) {
  static const char* const kDays[] = {"Thu", "Fri", "Sat", "Sun", "Mon", "Tue", "Wed"};
  static const char* const kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  civil::DateTime dt = civil::from_epoch_ms(ms);
  int64_t days = civil::floor_div(ms, 86400000);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s, %02d %s %04lld %02d:%02d:%02d GMT",
                kDays[((days % 7) + 7) % 7], dt.day, kMonths[dt.month - 1],
                static_cast<long long>(dt.year), dt.hour, dt.minute, dt.second);
  return buf;
}

size_t lognormal_size(Rng& r, double mean) {
  constexpr double kSigma = 0.6;
  double s = mean * std::exp(kSigma * r.normal() - kSigma * kSigma / 2);
  return static_cast<size_t>(std::clamp(s, 256.0, mean * 8));
}

std::string html_page(Rng& r, const Vocabulary& v, const std::string& tmpl, size_t size,
                      double redundancy, const std::string& url) {
  std::string p;
  p.reserve(size + 512);
  p += "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>";
  append_words(p, r, v, 4);
  p += "</title>\n";
  size_t shared = std::min(tmpl.size(), static_cast<size_t>(static_cast<double>(size) * redundancy));
  // Cut the template at an element boundary.
  size_t cut = shared == tmpl.size() ? shared : tmpl.rfind('\n', shared);
  if (cut == std::string::npos) cut = 0;
  size_t head_end = tmpl.find("</script>\n");
  size_t split = head_end == std::string::npos ? 0 : std::min(cut, head_end + 10);
  p.append(tmpl, 0, split);
  p += "</head>\n<body>\n";
  p.append(tmpl, split, cut - split);
  p += "<main>\n";
  while (p.size() + 24 < size) {
    p += "<p>";
    int words = 20 + static_cast<int>(r.below(60));
    for (int i = 0; i < words; ++i) {
      if (i) p.push_back(' ');
      uint64_t roll = r.below(100);
      if (roll < 3) {
        p += "<a href=\"";
        if (r.chance(0.5)) {
          p += v.pick(r) + ".html";
        } else {
          p += url.substr(0, url.find('/', 8)) + "/" + v.pick(r) + "#top";
        }
        p += "\">" + v.pick(r) + "</a>";
      } else if (roll < 4) {
        p += "&amp;";
      } else if (roll < 5) {
        p += "caf&#233;";
      } else {
        p += v.pick(r);
      }
    }
    p += "</p>\n";
  }
  p += "</main>\n</body></html>\n";
  return p;
}

std::string binary_blob(Rng& r, size_t size) {
  std::string s(size, '\0');
  for (size_t i = 0; i < size; i += 8) {
    uint64_t x = r.next();
    for (size_t k = 0; k < 8 && i + k < size; ++k) s[i + k] = static_cast<char>(x >> (8 * k));
  }
  return s;
}

}  // namespace

bool is_html_index(uint64_t i, double fraction) {
  return std::floor(static_cast<double>(i + 1) * fraction) > std::floor(static_cast<double>(i) * fraction);
}

std::vector<std::filesystem::path> generate_corpus(const SyntheticSpec& spec,
                                                   const std::filesystem::path& out_dir) {
  if (spec.html_fraction < 0 || spec.html_fraction > 1 || spec.template_redundancy < 0 ||
      spec.template_redundancy > 1 || spec.time_hi_ms < spec.time_lo_ms) {
    fail(ErrorCode::kUsage, "synthetic spec out of range");
  }
  std::filesystem::create_directories(out_dir);
  Vocabulary vocab(mix(spec.seed, 0xC0DEull));
  UrlPool pool = make_url_pool(spec, vocab);
  uint32_t domains = std::max<uint32_t>(1, spec.domain_count);
  std::vector<std::string> templates(domains);
  size_t template_bytes =
      static_cast<size_t>(static_cast<double>(spec.payload_mean_bytes) * spec.template_redundancy * 3) + 512;
  Rng r(spec.seed);

  std::vector<std::filesystem::path> files;
  std::unique_ptr<warc::Writer> writer;
  auto open_next = [&] {
    if (writer) writer->close();
    char name[32];
    std::snprintf(name, sizeof(name), "corpus-%05zu.warc.gz", files.size());
    files.push_back(out_dir / name);
    writer = std::make_unique<warc::Writer>(files.back(), warc::Mode::kMemberGzip);
  };
  open_next();

  uint64_t total = spec.record_count + spec.request_records;
  uint64_t response_index = 0;
  int64_t lo_s = civil::floor_div(spec.time_lo_ms, 1000);
  int64_t hi_s = civil::floor_div(spec.time_hi_ms, 1000);
  for (uint64_t j = 0; j < total; ++j) {
    if (writer->bytes_written() >= spec.max_file_bytes) open_next();
    uint64_t u = r.below(pool.urls.size());
    const std::string& url = pool.urls[u];
    int64_t ts = (lo_s + static_cast<int64_t>(r.below(static_cast<uint64_t>(hi_s - lo_s + 1)))) * 1000;
    std::string date = civil::format_iso8601(ts);
    std::string id = uuid(r);
    bool request = spec.request_records > 0 &&
                   (j + 1) * spec.request_records / total > j * spec.request_records / total;
    if (request) {
      size_t path_at = url.find('/', 8);
      std::string block = "GET " + url.substr(path_at) + " HTTP/1.1\r\nHost: " +
                          url.substr(7, path_at - 7) +
                          "\r\nUser-Agent: archfmt-gen/1.0\r\nAccept: */*\r\n\r\n";
      writer->append(warc::Record::make(warc::RecordType::kRequest, id, date, url,
                                        "application/http; msgtype=request", std::move(block)));
      continue;
    }
    bool html = is_html_index(response_index++, spec.html_fraction);
    size_t size = lognormal_size(r, spec.payload_mean_bytes);
    std::string payload, ctype;
    if (html) {
      uint32_t d = pool.domains[u];
      if (templates[d].empty()) templates[d] = make_template(d, spec.seed, template_bytes, vocab);
      payload = html_page(r, vocab, templates[d], size, spec.template_redundancy, url);
      ctype = "text/html; charset=utf-8";
    } else {
      switch (r.below(3)) {
        case 0:
          payload = binary_blob(r, size / 3);
          ctype = "image/jpeg";
          break;
        case 1:
          payload = "%PDF-1.4\n" + binary_blob(r, size / 4);
          ctype = "application/pdf";
          break;
        default:
          append_words(payload, r, vocab, static_cast<int>(size / 6));
          ctype = "text/plain";
          break;
      }
    }
    uint64_t roll = r.below(100);
    int status = roll < 92 ? 200 : (roll < 97 ? 404 : 301);
    const char* reason = status == 200 ? "OK" : (status == 404 ? "Not Found" : "Moved Permanently");
    std::string block = "HTTP/1.1 " + std::to_string(status) + " " + reason + "\r\nDate: " +
                        http_date(ts) + "\r\nServer: nginx/1." + std::to_string(10 + r.below(10)) +
                        "\r\nContent-Type: " + ctype + "\r\nContent-Length: " +
                        std::to_string(payload.size()) + "\r\n";
    if (status == 301) block += "Location: " + url + "/\r\n";
    block += "Connection: close\r\n\r\n";
    std::vector<warc::HeaderField> extra = {
        {"WARC-IP-Address", "10." + std::to_string(r.below(256)) + "." + std::to_string(r.below(256)) +
                                "." + std::to_string(r.below(256))},
        {"WARC-Payload-Digest", "sha1:" + payload_digest(payload)}};
    block += payload;
    writer->append(warc::Record::make(warc::RecordType::kResponse, id, date, url,
                                      "application/http; msgtype=response", std::move(block),
                                      std::move(extra)));
  }
  writer->close();
  return files;
}

std::vector<TimeRange> selectivity_ranges(const std::filesystem::path& cdx_path,
                                          const std::vector<double>& targets) {
  auto entries = cdx::parse(cdx_path);
  std::vector<int64_t> ts;
  ts.reserve(entries.size());
  for (const auto& e : entries) ts.push_back(cdx::parse_timestamp14(e.timestamp14));
  std::sort(ts.begin(), ts.end());
  const auto n = static_cast<int64_t>(ts.size());
  std::vector<TimeRange> out;
  for (double s : targets) {
    double want = s * static_cast<double>(n);
    if (n == 0 || s <= 0 || want < 1.0 || s > 1.0) {
      fail(ErrorCode::kUnachievable, "selectivity " + std::to_string(s) + " on " +
                                         std::to_string(n) + " records");
    }
    TimeRange tr;
    tr.target = s;
    auto k = std::min<int64_t>(n, std::llround(want));
    auto count_in = [&](int64_t lo, int64_t hi) {
      return static_cast<uint64_t>(std::upper_bound(ts.begin(), ts.end(), hi) -
                                   std::lower_bound(ts.begin(), ts.end(), lo));
    };
    bool found = false;
    int64_t center = (n - k) / 2;
    for (int64_t step = 0; step <= n - k && !found; ++step) {
      for (int64_t start : {center - step, center + step}) {
        if (start < 0 || start + k > n) continue;
        uint64_t m = count_in(ts[start], ts[start + k - 1]);
        if (std::abs(static_cast<double>(m) - want) <= 0.1 * want) {
          tr.lo_ms = ts[start];
          tr.hi_ms = ts[start + k - 1];
          tr.matched = m;
          found = true;
          break;
        }
      }
    }
    if (!found) {
      fail(ErrorCode::kUnachievable, "no time range reaches selectivity " + std::to_string(s));
    }
    tr.selectivity = static_cast<double>(tr.matched) / static_cast<double>(n);
    out.push_back(tr);
  }
  return out;
}

std::vector<UrlList> selectivity_url_lists(const std::filesystem::path& cdx_path,
                                           const std::vector<double>& targets, uint64_t seed) {
  auto entries = cdx::parse(cdx_path);
  std::map<std::string, uint64_t> counts;
  for (const auto& e : entries) ++counts[e.urlkey];
  std::vector<std::pair<std::string, uint64_t>> keys(counts.begin(), counts.end());
  Rng r(mix(seed, 0x0111ull));
  for (size_t i = keys.size(); i > 1; --i) std::swap(keys[i - 1], keys[r.below(i)]);
  const double n = static_cast<double>(entries.size());
  std::vector<UrlList> out;
  for (double s : targets) {
    double want = s * n;
    if (entries.empty() || s <= 0 || s > 1.0 || want < 1.0) {
      fail(ErrorCode::kUnachievable, "selectivity " + std::to_string(s) + " on " +
                                         std::to_string(entries.size()) + " records");
    }
    UrlList list;
    list.target = s;
    for (const auto& [key, c] : keys) {
      if (static_cast<double>(list.matched) >= 0.9 * want) break;
      if (static_cast<double>(list.matched + c) > 1.1 * want) continue;
      list.urlkeys.push_back(key);
      list.matched += c;
    }
    if (static_cast<double>(list.matched) < 0.9 * want) {
      fail(ErrorCode::kUnachievable, "no URL list reaches selectivity " + std::to_string(s));
    }
    list.selectivity = static_cast<double>(list.matched) / n;
    out.push_back(std::move(list));
  }
  return out;
}

double CostModel::modeled_ms(const Measurement& m) const {
  return static_cast<double>(m.seek_count) * seek_ms +
         static_cast<double>(m.bytes_read) / (mb_per_s * 1048576.0) * 1000.0;
}

query::Dataset prepare_dataset(const std::vector<std::filesystem::path>& warc_files,
                               const std::filesystem::path& work_dir,
                               const convert::Options& options) {
  std::filesystem::create_directories(work_dir);
  query::Dataset d;
  d.warc_files = warc_files;
  d.warc_dir = warc_files.empty() ? work_dir : warc_files.front().parent_path();
  d.cdx = work_dir / "index.cdx";
  cdx::BuildOptions bo;
  bo.types = options.include;
  bo.threads = options.threads;
  cdx::build(warc_files, d.cdx, bo);
  convert::Options co = options;
  co.target = convert::Target::kCarc;
  d.carc = work_dir / "data.carc";
  convert::convert(warc_files, d.carc, co);
  co.target = convert::Target::kRarc;
  d.rarc = work_dir / "data.rarc";
  convert::convert(warc_files, d.rarc, co);
  return d;
}

query::Dataset derive_dataset(const query::Dataset& source, const TimeRange& range,
                              const std::filesystem::path& out_dir,
                              const convert::Options& options) {
  std::filesystem::create_directories(out_dir);
  auto warc_path = out_dir / "derived.warc.gz";
  {
    warc::Writer writer(warc_path, warc::Mode::kMemberGzip);
    for (const auto& f : source.warc_files) {
      warc::Reader reader(f, warc::Mode::kAuto);
      while (auto item = reader.next()) {
        const auto& rec = item->first;
        if (!options.include.count(rec.record_type)) continue;
        int64_t ts = convert::parse_warc_date(rec.warc_date_raw);
        if (ts < range.lo_ms || ts > range.hi_ms) continue;
        writer.append(rec);
      }
    }
    writer.close();
  }
  return prepare_dataset({warc_path}, out_dir, options);
}

std::string_view task_name(Task t) {
  switch (t) {
    case Task::kT1: return "t1";
    case Task::kT2: return "t2";
    case Task::kT3: return "t3";
    case Task::kT4: return "t4";
    case Task::kT5: return "t5";
    case Task::kT6: return "t6";
    case Task::kSingleUrl: return "single_url";
  }
  return "t1";
}

Task parse_task(std::string_view s) {
  for (auto t : {Task::kT1, Task::kT2, Task::kT3, Task::kT4, Task::kT5, Task::kT6,
                 Task::kSingleUrl}) {
    if (s == task_name(t)) return t;
  }
  fail(ErrorCode::kUsage, "unknown task '" + std::string(s) + "'");
}

uint64_t dataset_bytes(const query::Dataset& data, query::Backend backend) {
  auto size_or_zero = [](const std::filesystem::path& p) {
    return p.empty() || !std::filesystem::exists(p) ? uint64_t{0} : archfmt::file_size(p);
  };
  uint64_t warc = 0;
  for (const auto& f : data.warc_files) warc += size_or_zero(f);
  switch (backend) {
    case query::Backend::kWarc: return warc;
    case query::Backend::kWarcCdx: return warc + size_or_zero(data.cdx);
    case query::Backend::kCarc: return size_or_zero(data.carc);
    case query::Backend::kRarc: return size_or_zero(data.rarc);
  }
  return 0;
}

std::string csv_line(const Cell& c) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%d,%.3f,%llu,%llu,%llu,%llu,%.3f,%llu",
                std::string(task_name(c.task)).c_str(),
                std::string(query::backend_name(c.backend)).c_str(), c.selectivity, c.repeat,
                c.measurement.wall_ms, static_cast<unsigned long long>(c.measurement.bytes_read),
                static_cast<unsigned long long>(c.measurement.seek_count),
                static_cast<unsigned long long>(c.measurement.open_count),
                static_cast<unsigned long long>(c.measurement.records_out), c.modeled_ms,
                static_cast<unsigned long long>(c.dataset_bytes));
  return buf;
}

std::vector<Cell> parse_csv(std::string_view text) {
  std::vector<Cell> cells;
  size_t pos = 0;
  uint64_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) fail(ErrorCode::kBadCsv, "line 1: unexpected CSV header");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> f;
    size_t start = 0;
    for (;;) {
      size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    auto bad = [&](const std::string& why) {
      fail(ErrorCode::kBadCsv, "line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() != 11) bad("expected 11 fields");
    auto num_u = [&](std::string_view v) {
      uint64_t x = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc() || p != v.data() + v.size()) bad("bad integer '" + std::string(v) + "'");
      return x;
    };
    auto num_d = [&](std::string_view v) {
      double x = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc() || p != v.data() + v.size()) bad("bad number '" + std::string(v) + "'");
      return x;
    };
    Cell c;
    try {
      c.task = parse_task(f[0]);
      c.backend = query::parse_backend(f[1]);
    } catch (const Error& e) {
      bad(e.what());
    }
    c.selectivity = num_d(f[2]);
    c.repeat = static_cast<int>(num_u(f[3]));
    c.measurement.wall_ms = num_d(f[4]);
    c.measurement.bytes_read = num_u(f[5]);
    c.measurement.seek_count = num_u(f[6]);
    c.measurement.open_count = num_u(f[7]);
    c.measurement.records_out = num_u(f[8]);
    c.modeled_ms = num_d(f[9]);
    c.dataset_bytes = num_u(f[10]);
    cells.push_back(c);
  }
  if (cells.empty()) fail(ErrorCode::kBadCsv, "CSV has no data rows");
  return cells;
}

std::vector<Cell> run_suite(const SuiteConfig& cfg, const std::filesystem::path& csv_out) {
  if (cfg.repeats < 1) fail(ErrorCode::kUsage, "repeats must be at least 1");
  if (cfg.backends.empty()) fail(ErrorCode::kUsage, "no backends selected");
  std::filesystem::path work = cfg.work_dir.empty() ? csv_out.parent_path() / "bench-work" : cfg.work_dir;
  std::filesystem::create_directories(work);

  OutputFile csv(csv_out);
  csv.write(std::string(kCsvHeader) + "\n");
  std::vector<Cell> cells;
  uint64_t total = cdx::parse(cfg.data.cdx).size();

  auto record = [&](std::vector<Cell> group) {
    // Equivalence gate: every backend in the group must agree.
    for (const auto& c : group) {
      if (c.digest != group.front().digest) {
        std::string detail;
        for (const auto& g : group) {
          detail += " " + std::string(query::backend_name(g.backend)) + "=" + g.digest;
        }
        fail(ErrorCode::kEquivalenceFailure, std::string(task_name(c.task)) + " at selectivity " +
                                                 std::to_string(c.selectivity) + ":" + detail);
      }
    }
    for (auto& c : group) {
      csv.write(csv_line(c) + "\n");
      cells.push_back(std::move(c));
    }
  };

  auto run_spec = [&](Task task, const query::QuerySpec& spec, double selectivity) {
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      std::vector<Cell> group;
      for (auto b : cfg.backends) {
        query::QueryOptions qo;
        qo.materialize = false;
        qo.include = cfg.convert_options.include;
        auto res = query::run_query(spec, b, cfg.data, qo);
        Cell c;
        c.task = task;
        c.backend = b;
        c.selectivity = selectivity;
        c.repeat = rep;
        c.measurement = res.measurement;
        c.modeled_ms = cfg.cost.modeled_ms(res.measurement);
        c.dataset_bytes = dataset_bytes(cfg.data, b);
        c.digest = res.record_ids_digest;
        group.push_back(std::move(c));
      }
      record(std::move(group));
    }
  };

  std::vector<double> sweep = cfg.selectivities;
  std::vector<TimeRange> ranges;
  std::vector<UrlList> lists;
  auto needs = [&](std::initializer_list<Task> ts) {
    return std::any_of(ts.begin(), ts.end(), [&](Task t) {
      return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end();
    });
  };
  if (needs({Task::kT2, Task::kT4})) ranges = selectivity_ranges(cfg.data.cdx, sweep);
  if (needs({Task::kT3, Task::kT5})) lists = selectivity_url_lists(cfg.data.cdx, sweep, cfg.seed);

  for (Task task : cfg.tasks) {
    query::QuerySpec spec;
    switch (task) {
      case Task::kT1:
        spec.kind = query::Kind::kCount;
        run_spec(task, spec, 1.0);
        break;
      case Task::kT2:
      case Task::kT4:
        spec.kind = task == Task::kT2 ? query::Kind::kMeta : query::Kind::kRecords;
        spec.projection = {"url", "mime", "status"};
        for (const auto& r : ranges) {
          spec.predicate = query::Predicate::time_range(r.lo_ms, r.hi_ms);
          run_spec(task, spec, r.selectivity);
        }
        break;
      case Task::kT3:
      case Task::kT5:
        spec.kind = task == Task::kT3 ? query::Kind::kMeta : query::Kind::kRecords;
        spec.projection = {"url", "mime", "status"};
        for (const auto& l : lists) {
          spec.predicate = query::Predicate::url_list(l.urlkeys);
          run_spec(task, spec, l.selectivity);
        }
        break;
      case Task::kSingleUrl: {
        auto one = selectivity_url_lists(cfg.data.cdx, {1.0 / static_cast<double>(std::max<uint64_t>(total, 1))}, cfg.seed);
        spec.kind = query::Kind::kRecords;
        spec.predicate = query::Predicate::url_list(one.front().urlkeys);
        run_spec(task, spec, one.front().selectivity);
        break;
      }
      case Task::kT6: {
        auto range = selectivity_ranges(cfg.data.cdx, {cfg.derived_fraction}).front();
        query::Dataset derived = derive_dataset(cfg.data, range, work / "derived", cfg.convert_options);
        for (int rep = 0; rep < cfg.repeats; ++rep) {
          std::vector<Cell> group;
          for (auto b : cfg.backends) {
            auto out = work / ("extract-" + std::string(query::backend_name(b)) + ".tsv");
            query::QueryOptions qo;
            qo.include = cfg.convert_options.include;
            auto res = query::scan_extract(b, derived, query::Extractor::kText, out, qo);
            Cell c;
            c.task = task;
            c.backend = b;
            c.selectivity = range.selectivity;
            c.repeat = rep;
            c.measurement = res.measurement;
            c.modeled_ms = cfg.cost.modeled_ms(res.measurement);
            c.dataset_bytes = dataset_bytes(derived, b);
            c.digest = hex(sha1(read_text_file(out)));
            group.push_back(std::move(c));
          }
          record(std::move(group));
        }
        break;
      }
    }
  }
  csv.close();
  return cells;
}

std::vector<SizeRow> size_table(const std::vector<Cell>& cells) {
  std::map<query::Backend, uint64_t> bytes;
  for (const auto& c : cells) {
    if (c.task == Task::kT6) continue;
    bytes.emplace(c.backend, c.dataset_bytes);
  }
  const std::pair<query::Backend, double> full_scale[] = {
      {query::Backend::kWarc, 0.985 / 0.985},
      {query::Backend::kWarcCdx, 0.998 / 0.985},
      {query::Backend::kCarc, 0.914 / 0.985},
      {query::Backend::kRarc, 1.321 / 0.985},
  };
  uint64_t warc = bytes.count(query::Backend::kWarc) ? bytes[query::Backend::kWarc] : 0;
  std::vector<SizeRow> rows;
  for (const auto& [b, ref] : full_scale) {
    if (!bytes.count(b)) continue;
    SizeRow r;
    r.format = query::backend_name(b);
    r.bytes = bytes[b];
    r.ratio = warc ? static_cast<double>(r.bytes) / static_cast<double>(warc) : 0;
    r.reference_ratio = ref;
    rows.push_back(r);
  }
  return rows;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

using SeriesKey = std::pair<Task, query::Backend>;
/// Median per (task, backend) over repeats, keyed by selectivity.
std::map<SeriesKey, std::map<double, double>> medians(const std::vector<Cell>& cells, bool modeled) {
  std::map<SeriesKey, std::map<double, std::vector<double>>> raw;
  for (const auto& c : cells) {
    raw[{c.task, c.backend}][c.selectivity].push_back(modeled ? c.modeled_ms : c.measurement.wall_ms);
  }
  std::map<SeriesKey, std::map<double, double>> out;
  for (auto& [k, by_s] : raw) {
    for (auto& [s, v] : by_s) out[k][s] = median(v);
  }
  return out;
}

const char* color_of(query::Backend b) {
  switch (b) {
    case query::Backend::kWarc: return "#d62728";
    case query::Backend::kWarcCdx: return "#ff7f0e";
    case query::Backend::kCarc: return "#1f77b4";
    case query::Backend::kRarc: return "#2ca02c";
  }
  return "#000000";
}

std::string svg_chart(const std::string& title, const std::string& y_label,
                      const std::map<query::Backend, std::map<double, double>>& series) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 150, kT = 40, kB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [b, pts] : series) {
    for (const auto& [x, y] : pts) {
      double lx = std::log10(std::max(x, 1e-9));
      double ly = std::log10(std::max(y, 1e-3));
      xmin = std::min(xmin, lx);
      xmax = std::max(xmax, lx);
      ymin = std::min(ymin, ly);
      ymax = std::max(ymax, ly);
    }
  }
  xmin = std::floor(xmin);
  xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1);
  auto px = [&](double x) {
    return kL + (std::log10(std::max(x, 1e-9)) - xmin) / (xmax - xmin) * (kW - kL - kR);
  };
  auto py = [&](double y) {
    return kH - kB - (std::log10(std::max(y, 1e-3)) - ymin) / (ymax - ymin) * (kH - kT - kB);
  };
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
                "version=\"1.1\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\">\n",
                kW, kH);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf), "<text x=\"%.0f\" y=\"24\" font-size=\"15\">%s</text>\n", kL, title.c_str());
  s += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kL, kH - kB, kW - kR, kH - kB, kL, kT, kL, kH - kB);
  s += buf;
  for (double e = xmin; e <= xmax + 1e-9; e += 1) {
    double x = kL + (e - xmin) / (xmax - xmin) * (kW - kL - kR);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n",
                  x, kT, x, kH - kB, x, kH - kB + 16, std::pow(10.0, e));
    s += buf;
  }
  for (double e = ymin; e <= ymax + 1e-9; e += 1) {
    double y = kH - kB - (e - ymin) / (ymax - ymin) * (kH - kT - kB);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%g</text>\n",
                  kL, y, kW - kR, y, kL - 6, y + 4, std::pow(10.0, e));
    s += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">selectivity</text>\n"
                "<text x=\"16\" y=\"%.1f\" transform=\"rotate(-90 16 %.1f)\" text-anchor=\"middle\">%s</text>\n",
                (kL + kW - kR) / 2, kH - 12, (kT + kH - kB) / 2, (kT + kH - kB) / 2, y_label.c_str());
  s += buf;
  int row = 0;
  for (const auto& [b, pts] : series) {
    std::string points;
    for (const auto& [x, y] : pts) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(x), py(y));
      points += buf;
    }
    std::snprintf(buf, sizeof(buf), "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" points=\"",
                  color_of(b));
    s += buf;
    s += points;
    s += "\"/>\n";
    for (const auto& [x, y] : pts) {
      std::snprintf(buf, sizeof(buf), "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", px(x),
                    py(y), color_of(b));
      s += buf;
    }
    double ly = kT + 10 + 20 * row++;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  kW - kR + 15, ly, kW - kR + 40, ly, color_of(b), kW - kR + 46, ly + 4,
                  std::string(query::backend_name(b)).c_str());
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

std::vector<Crossover> crossovers(const std::vector<Cell>& cells) {
  auto med = medians(cells, true);
  std::vector<Crossover> out;
  for (Task t : {Task::kT2, Task::kT3, Task::kT4, Task::kT5}) {
    auto w = med.find({t, query::Backend::kWarc});
    auto c = med.find({t, query::Backend::kWarcCdx});
    if (w == med.end() || c == med.end()) continue;
    Crossover x;
    x.task = t;
    for (const auto& [s, cdx_ms] : c->second) {
      auto it = w->second.find(s);
      if (it != w->second.end() && cdx_ms > it->second) {
        x.found = true;
        x.selectivity = s;
        break;
      }
    }
    out.push_back(x);
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& csv,
                                               const std::filesystem::path& out_dir) {
  std::string text;
  try {
    text = read_text_file(csv);
  } catch (const Error& e) {
    fail(ErrorCode::kBadCsv, e.what());
  }
  if (text.empty()) fail(ErrorCode::kBadCsv, csv.string() + " is empty");
  auto cells = parse_csv(text);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto wall = medians(cells, false);
  auto modeled = medians(cells, true);

  std::set<Task> tasks;
  for (const auto& c : cells) tasks.insert(c.task);
  for (Task t : tasks) {
    for (bool is_modeled : {false, true}) {
      std::map<query::Backend, std::map<double, double>> series;
      for (const auto& [k, pts] : is_modeled ? modeled : wall) {
        if (k.first == t) series[k.second] = pts;
      }
      std::string name = std::string(task_name(t)) + (is_modeled ? "_modeled.svg" : ".svg");
      std::string title = std::string(task_name(t)) + (is_modeled ? ": modeled cold-read time" : ": wall time (warm cache)");
      OutputFile f(out_dir / name);
      f.write(svg_chart(title, is_modeled ? "modeled_ms" : "wall_ms", series));
      f.close();
      written.push_back(out_dir / name);
    }
  }

  std::string md = "# Benchmark report\n\n## Stored size\n\n| format | bytes | ratio to warc | full-scale reference |\n|---|---|---|---|\n";
  char buf[256];
  for (const auto& r : size_table(cells)) {
    std::snprintf(buf, sizeof(buf), "| %s | %llu | %.3f | %.3f |\n", r.format.c_str(),
                  static_cast<unsigned long long>(r.bytes), r.ratio, r.reference_ratio);
    md += buf;
  }
  md += "\nReference ratios are the published full-scale sizes (WARC 0.985 TB, WARC-CDX 0.998 TB, "
        "Avro 1.321 TB, Parquet 0.914 TB) divided by the WARC size; carc plays the Parquet role "
        "and rarc the Avro role.\n\n## warc_cdx versus warc crossover (median modeled_ms)\n\n";
  for (const auto& x : crossovers(cells)) {
    if (x.found) {
      std::snprintf(buf, sizeof(buf), "- %s: warc_cdx slower than a full warc scan from selectivity %.4g\n",
                    std::string(task_name(x.task)).c_str(), x.selectivity);
    } else {
      std::snprintf(buf, sizeof(buf), "- %s: no crossover in the measured range\n",
                    std::string(task_name(x.task)).c_str());
    }
    md += buf;
  }
  md += "\n## Medians\n\n| task | backend | selectivity | wall_ms | modeled_ms |\n|---|---|---|---|---|\n";
  for (const auto& [k, pts] : wall) {
    for (const auto& [s, w] : pts) {
      std::snprintf(buf, sizeof(buf), "| %s | %s | %.4g | %.1f | %.1f |\n",
                    std::string(task_name(k.first)).c_str(),
                    std::string(query::backend_name(k.second)).c_str(), s, w, modeled[k][s]);
      md += buf;
    }
  }
  md += "\nwall_ms was measured with a warm page cache; modeled_ms charges 10 ms per seek and "
        "100 MB/s of transfer by default to approximate a cold start.\n";
  OutputFile f(out_dir / "report.md");
  f.write(md);
  f.close();
  written.push_back(out_dir / "report.md");
  return written;
}

}  // namespace archfmt::bench
