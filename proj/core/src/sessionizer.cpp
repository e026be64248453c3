// SPDX-License-Identifier: Apache-2.0
#include "webpf/sessionizer.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace webpf {

Sequence Session::pages() const {
  Sequence out;
  out.reserve(visits.size());
  for (const auto& v : visits) out.push_back(v.page);
  return out;
}

std::vector<Session> sessionize(std::span<const LogRecord> records, PageTable& pages, const SessionOptions& options) {
  if (options.gap <= std::chrono::seconds::zero()) throw std::invalid_argument("session gap must be positive");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.client_ip != rb.client_ip) return ra.client_ip < rb.client_ip;
    return ra.timestamp < rb.timestamp;
  });

  std::vector<Session> sessions;
  auto close = [&](Session& s) {
    for (std::size_t i = 0; i + 1 < s.visits.size(); ++i) {
      s.visits[i].dwell = (s.visits[i + 1].at - s.visits[i].at).count();
    }
    s.visits.back().dwell = options.default_dwell;
    sessions.push_back(std::move(s));
  };

  Session current;
  for (std::size_t idx : order) {
    const auto& r = records[idx];
    const bool new_session = current.visits.empty() || current.user_key != r.client_ip ||
                             r.timestamp - current.visits.back().at > options.gap;
    if (new_session && !current.visits.empty()) {
      close(current);
      current = Session{};
    }
    if (current.visits.empty()) current.user_key = r.client_ip;
    current.visits.push_back(Visit{pages.intern(r.resource), r.timestamp, 0});
  }
  if (!current.visits.empty()) close(current);
  return sessions;
}

DwellProfile dwell_profile(const Session& session) {
  DwellProfile p;
  for (const auto& v : session.visits) {
    p.total += v.dwell;
    p.per_page[v.page] += v.dwell;
  }
  return p;
}

void write_session_dump(std::ostream& out, std::span<const Session> sessions, const PageTable& pages) {
  for (const auto& s : sessions) {
    out << s.user_key << '\t' << s.start().time_since_epoch().count() << '\t' << s.end().time_since_epoch().count()
        << '\t';
    for (std::size_t i = 0; i < s.visits.size(); ++i) {
      if (i) out << ',';
      out << encode_resource(pages.name(s.visits[i].page), ",:") << ':' << s.visits[i].dwell;
    }
    out << '\n';
  }
}

namespace {

std::int64_t parse_int(std::string_view s, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("session dump line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

std::vector<Session> read_session_dump(std::istream& in, PageTable& pages) {
  std::vector<Session> sessions;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4 || fields[0].empty() || fields[3].empty()) {
      throw std::runtime_error("session dump line " + std::to_string(number) + ": expected 4 tab-separated fields");
    }
    Session s;
    s.user_key = std::string(fields[0]);
    std::chrono::sys_seconds at{std::chrono::seconds{parse_int(fields[1], number)}};
    const std::chrono::sys_seconds end{std::chrono::seconds{parse_int(fields[2], number)}};
    for (auto item : split(fields[3], ',')) {
      const auto colon = item.rfind(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw std::runtime_error("session dump line " + std::to_string(number) + ": bad visit '" + std::string(item) +
                                 "'");
      }
      const std::int64_t dwell = parse_int(item.substr(colon + 1), number);
      s.visits.push_back(Visit{pages.intern(decode_resource(item.substr(0, colon))), at, dwell});
      at += std::chrono::seconds{dwell};
    }
    if (s.end() != end) {
      throw std::runtime_error("session dump line " + std::to_string(number) + ": end time does not match dwell sum");
    }
    sessions.push_back(std::move(s));
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading session dump");
  return sessions;
}

}  // namespace webpf
