// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webpf {

/// One request line of an access log.
struct LogRecord {
  std::string client_ip;
  std::chrono::sys_seconds timestamp{};
  /// Offset of the logged local time from UTC, kept so a record renders back
  /// to the exact text it came from.
  int utc_offset_minutes = 0;
  std::string method;
  /// Normalized path: query and fragment stripped, percent-decoded once,
  /// duplicate slashes collapsed, lowercased.
  std::string resource;
  std::string protocol;
  int status = 0;
  std::uint64_t bytes = 0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

enum class LogFormat {
  /// host ident authuser [date] "request" status bytes; trailing Combined
  /// fields (referrer, agent) are tolerated and ignored.
  kCommon,
  /// Common fields followed by mandatory quoted referrer and user agent.
  kCombined,
};

LogFormat parse_log_format(std::string_view name);

struct LineDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string reason;
  friend bool operator==(const LineDiagnostic&, const LineDiagnostic&) = default;
};

struct ParseResult {
  std::vector<LogRecord> records;
  std::vector<LineDiagnostic> diagnostics;
};

/// Parses one line. On failure returns nullopt and, if `error` is given,
/// stores the reason there.
std::optional<LogRecord> parse_line(std::string_view line, LogFormat format, std::string* error = nullptr);

/// Parses a whole stream. Every line produces either a record or a diagnostic.
/// Throws std::runtime_error if the stream itself fails.
ParseResult parse_log(std::istream& in, LogFormat format = LogFormat::kCommon);

/// Renders a record as a Common Log Format line that parses back to `record`.
std::string render_line(const LogRecord& record);

/// Resource normalization applied by the parser to the request target.
std::string normalize_resource(std::string_view target);

/// Percent-encodes '%', whitespace, control bytes, non-ASCII bytes, the
/// characters that would be cut by normalization ('?', '#', '"') and any byte
/// in `extra`. Decoding the result with normalize_resource is the identity on
/// normalized resources.
std::string encode_resource(std::string_view resource, std::string_view extra = {});

/// Reverses encode_resource without applying any other normalization.
std::string decode_resource(std::string_view encoded);

struct CleanOptions {
  std::set<std::string> ignore_suffixes{".jpg", ".jpeg", ".gif", ".png", ".css", ".js", ".ico"};
  /// Status classes to keep, as status / 100 (2 = success, 3 = redirect).
  std::set<int> keep_status_classes{2, 3};
  /// Methods to keep, upper case. Empty keeps every method.
  std::set<std::string> keep_methods{"GET"};
};

/// Drops non-page resources, unwanted status classes and methods. Order is
/// preserved. Throws std::invalid_argument if ignore_suffixes is empty.
std::vector<LogRecord> clean(std::span<const LogRecord> records, const CleanOptions& options = {});

}  // namespace webpf
