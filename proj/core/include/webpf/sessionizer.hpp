// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "webpf/log_ingest.hpp"
#include "webpf/page_table.hpp"

namespace webpf {

struct Visit {
  PageId page;
  std::chrono::sys_seconds at{};
  std::int64_t dwell = 0;  // seconds
  friend bool operator==(const Visit&, const Visit&) = default;
};

/// A single user's visits with no inactivity gap above the session timeout.
struct Session {
  std::string user_key;
  std::vector<Visit> visits;

  std::chrono::sys_seconds start() const { return visits.front().at; }
  std::chrono::sys_seconds end() const { return visits.back().at; }
  Sequence pages() const;

  friend bool operator==(const Session&, const Session&) = default;
};

struct SessionOptions {
  std::chrono::seconds gap{30 * 60};
  /// Dwell assigned to the last page of a session, which the log cannot observe.
  std::int64_t default_dwell = 30;
};

/// Splits records into per-user sessions using an inactivity timeout. Records
/// need not be sorted; each user's records are stably sorted by timestamp.
/// A new session starts when the gap to the previous request exceeds
/// `options.gap`. Output is ordered by (user_key, start).
std::vector<Session> sessionize(std::span<const LogRecord> records, PageTable& pages,
                                const SessionOptions& options = {});

struct DwellProfile {
  std::int64_t total = 0;
  std::map<PageId, std::int64_t> per_page;
};

DwellProfile dwell_profile(const Session& session);

/// One line per session: user_key TAB start TAB end TAB page:dwell,...
/// Times are Unix seconds; page names are percent-encoded.
void write_session_dump(std::ostream& out, std::span<const Session> sessions, const PageTable& pages);

/// Inverse of write_session_dump. Throws std::runtime_error naming the line on
/// malformed input.
std::vector<Session> read_session_dump(std::istream& in, PageTable& pages);

}  // namespace webpf
