// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "webpf/log_ingest.hpp"

using namespace webpf;
using webpf::testing::Gen;

namespace {

LogRecord page(std::string resource, int status = 200, std::string method = "GET") {
  LogRecord r;
  r.client_ip = "10.0.0.1";
  r.method = std::move(method);
  r.resource = std::move(resource);
  r.status = status;
  return r;
}

std::vector<std::string> resources(const std::vector<LogRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.resource);
  return out;
}

}  // namespace

TEST(ParseLine, CanonicalCommonLogFormat) {
  const auto r = parse_line(R"(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a.html HTTP/1.0" 200 512)",
                            LogFormat::kCommon);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->client_ip, "10.0.0.1");
  EXPECT_EQ(r->resource, "/a.html");
  EXPECT_EQ(r->method, "GET");
  EXPECT_EQ(r->protocol, "HTTP/1.0");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->bytes, 512u);
  EXPECT_EQ(r->timestamp.time_since_epoch().count(), 1268388000);
}

TEST(ParseLine, OffsetIsAppliedToInstant) {
  const auto r = parse_line(R"(::1 - bob [12/Mar/2010:12:30:00 +0230] "GET / HTTP/1.1" 304 -)", LogFormat::kCommon);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->timestamp.time_since_epoch().count(), 1268388000);
  EXPECT_EQ(r->utc_offset_minutes, 150);
  EXPECT_EQ(r->bytes, 0u);
}

TEST(ParseLine, CombinedTrailingFieldsTolerated) {
  const std::string line =
      R"x(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a.html HTTP/1.0" 200 512 "http://x/" "Mozilla/5.0 (X11)")x";
  EXPECT_TRUE(parse_line(line, LogFormat::kCombined));
  EXPECT_TRUE(parse_line(line, LogFormat::kCommon));
  EXPECT_FALSE(parse_line(R"(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0" 200 5)", LogFormat::kCombined));
}

TEST(ParseLine, DiagnosticsNameTheProblem) {
  std::string why;
  EXPECT_FALSE(parse_line(R"(10.0.0.1 - - [32/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0" 200 5)", LogFormat::kCommon, &why));
  EXPECT_NE(why.find("timestamp"), std::string::npos);
  EXPECT_FALSE(parse_line(R"(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0" OK 5)", LogFormat::kCommon, &why));
  EXPECT_NE(why.find("status"), std::string::npos);
  EXPECT_FALSE(parse_line(R"(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0" 200 12k)", LogFormat::kCommon, &why));
  EXPECT_NE(why.find("bytes"), std::string::npos);
  EXPECT_FALSE(parse_line(R"(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0" 200)", LogFormat::kCommon, &why));
  EXPECT_NE(why.find("bytes"), std::string::npos);
  EXPECT_FALSE(parse_line(R"(host.example - - [12/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0" 200 1)", LogFormat::kCommon, &why));
  EXPECT_NE(why.find("address"), std::string::npos);
  EXPECT_FALSE(parse_line(R"(10.0.0.1 - - [12/Mar/2010:10:00:00 +0000] "GET /a HTTP/1.0 200 1)", LogFormat::kCommon, &why));
}

TEST(NormalizeResource, QueryFragmentSlashesCaseAndEscapes) {
  EXPECT_EQ(normalize_resource("/News//Item.html?id=3#top"), "/news/item.html");
  EXPECT_EQ(normalize_resource("/a%20b"), "/a b");
  EXPECT_EQ(normalize_resource("/a%2541"), "/a%41");  // decoded exactly once
  EXPECT_EQ(normalize_resource("http://Example.com//x/Y"), "/x/y");
  EXPECT_EQ(normalize_resource("/bad%FFbyte"), "/bad\xEF\xBF\xBD" "byte");
  EXPECT_EQ(normalize_resource("/trailing%4"), "/trailing%4");
}

TEST(ParseLog, EmptyStream) {
  std::istringstream in("");
  const auto r = parse_log(in);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(ParseLog, PlantedMalformedLinesAreReportedWithLineNumbers) {
  Gen g(77);
  std::ostringstream text;
  const std::set<std::size_t> planted{17, 500, 1000};
  for (std::size_t line = 1; line <= 1000; ++line) {
    if (planted.contains(line)) {
      text << (line == 17 ? "garbage" : line == 500 ? "10.0.0.1 - - [bad] \"GET / HTTP/1.0\" 200 1" : "") << '\n';
    } else {
      text << render_line(webpf::testing::random_record(g)) << '\n';
    }
  }
  std::istringstream in(text.str());
  const auto r = parse_log(in);
  EXPECT_EQ(r.records.size(), 997u);
  ASSERT_EQ(r.diagnostics.size(), 3u);
  std::set<std::size_t> reported;
  for (const auto& d : r.diagnostics) reported.insert(d.line);
  EXPECT_EQ(reported, planted);
}

TEST(ParseLog, RecordsPlusDiagnosticsEqualsLines) {
  Gen g(5);
  for (int round = 0; round < 20; ++round) {
    std::ostringstream text;
    const std::size_t n = g.between(0, 60);
    for (std::size_t i = 0; i < n; ++i) {
      std::string line = render_line(webpf::testing::random_record(g));
      if (g.chance(0.2)) line.resize(g.below(line.size()));
      text << line << '\n';
    }
    std::istringstream in(text.str());
    const auto r = parse_log(in);
    EXPECT_EQ(r.records.size() + r.diagnostics.size(), n);
  }
}

TEST(ParseLog, RenderParseRoundTrip) {
  Gen g(2010);
  for (int i = 0; i < 2000; ++i) {
    const LogRecord rec = webpf::testing::random_record(g);
    const std::string line = render_line(rec);
    std::string why;
    const auto back = parse_line(line, LogFormat::kCommon, &why);
    ASSERT_TRUE(back) << line << ": " << why;
    EXPECT_EQ(*back, rec) << line;
  }
}

TEST(ParseLogFormat, Names) {
  EXPECT_EQ(parse_log_format("common"), LogFormat::kCommon);
  EXPECT_EQ(parse_log_format("clf"), LogFormat::kCommon);
  EXPECT_EQ(parse_log_format("combined"), LogFormat::kCombined);
  EXPECT_THROW(parse_log_format("w3c"), std::invalid_argument);
}

TEST(Clean, DropsImages) {
  const std::vector<LogRecord> in{page("/a.html"), page("/logo.gif"), page("/b.html")};
  EXPECT_EQ(resources(clean(in)), (std::vector<std::string>{"/a.html", "/b.html"}));
}

TEST(Clean, AllPngIsEmpty) {
  const std::vector<LogRecord> in{page("/x.png"), page("/y.PNG")};
  EXPECT_TRUE(clean(in).empty());
}

TEST(Clean, StatusAndMethodFilters) {
  const std::vector<LogRecord> in{page("/ok"), page("/moved", 301), page("/missing", 404), page("/err", 500),
                                  page("/post", 200, "POST")};
  EXPECT_EQ(resources(clean(in)), (std::vector<std::string>{"/ok", "/moved"}));
  CleanOptions all_methods;
  all_methods.keep_methods.clear();
  EXPECT_EQ(clean(in, all_methods).size(), 3u);
}

TEST(Clean, EmptySuffixSetRejected) {
  CleanOptions o;
  o.ignore_suffixes.clear();
  EXPECT_THROW(clean({}, o), std::invalid_argument);
}

TEST(Clean, PlantedImageMixKeepsExactlyTheRest) {
  Gen g(37);
  const char* images[] = {".jpg", ".JPEG", ".gif", ".png", ".css", ".js", ".ico"};
  std::vector<LogRecord> in;
  std::vector<std::string> expected;
  std::vector<std::size_t> order(500);
  for (std::size_t i = 0; i < 500; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), g.engine());
  std::set<std::size_t> image_slots(order.begin(), order.begin() + 185);  // 37%
  for (std::size_t i = 0; i < 500; ++i) {
    if (image_slots.contains(i)) {
      in.push_back(page("/img/" + std::to_string(i) + images[g.below(7)]));
    } else {
      in.push_back(page("/page" + std::to_string(i) + ".html"));
      expected.push_back(in.back().resource);
    }
  }
  const auto out = clean(in);
  EXPECT_EQ(out.size(), 315u);
  EXPECT_EQ(resources(out), expected);
}

TEST(Clean, Idempotent) {
  Gen g(8);
  std::vector<LogRecord> in;
  for (int i = 0; i < 300; ++i) in.push_back(webpf::testing::random_record(g));
  const auto once = clean(in);
  EXPECT_EQ(clean(once), once);
}

TEST(Encode, DecodeInvertsEncode) {
  Gen g(3);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    for (std::uint64_t k = g.below(20); k > 0; --k) s.push_back(static_cast<char>(g.below(256)));
    EXPECT_EQ(decode_resource(encode_resource(s, ",|:")), s);
  }
}
