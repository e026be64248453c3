// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "webpf/log_ingest.hpp"

namespace webpf {

/// Seeded synthetic access trace with planted navigation patterns.
///
/// Users alternate between following a planted pattern and browsing at
/// random. Outside a pattern a user starts one with probability
/// `follow_probability`; inside a pattern each next step follows it with the
/// same probability, otherwise the user requests a random page and leaves the
/// pattern. Output depends only on the options (mt19937_64 with integer
/// arithmetic, no library distributions).
struct TraceGenOptions {
  std::uint64_t seed = 42;
  std::size_t requests = 5000;
  std::size_t users = 20;
  std::size_t alphabet = 400;
  std::size_t patterns = 20;
  std::size_t pattern_length = 5;
  double follow_probability = 0.8;
  /// Chance that a request is preceded by a long idle period (new session).
  double session_break_probability = 0.03;
  /// Chance that a request is followed by an embedded image request.
  double image_probability = 0.0;
  std::int64_t start_epoch = 1268388000;  // 2010-03-12 10:00:00 UTC
};

struct GeneratedTrace {
  std::vector<LogRecord> records;  // ordered by timestamp
  std::vector<std::vector<std::string>> patterns;
};

GeneratedTrace generate_trace(const TraceGenOptions& options);

/// "/p<index>.html"
std::string synthetic_page(std::size_t index);

}  // namespace webpf
