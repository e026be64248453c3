// SPDX-License-Identifier: Apache-2.0
#include "webpf/log_ingest.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <stdexcept>

namespace webpf {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

bool is_ip_address(const std::string& text) {
  std::array<unsigned char, 16> buf{};
  return inet_pton(AF_INET, text.c_str(), buf.data()) == 1 || inet_pton(AF_INET6, text.c_str(), buf.data()) == 1;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

// "12/Mar/2010:10:00:00 +0000"
bool parse_clf_time(std::string_view s, std::chrono::sys_seconds& tp, int& offset_minutes) {
  using namespace std::chrono;
  if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' || s[17] != ':' || s[20] != ' ') {
    return false;
  }
  unsigned d = 0, hh = 0, mm = 0, ss = 0, off = 0;
  int y = 0;
  if (!parse_number(s.substr(0, 2), d) || !parse_number(s.substr(7, 4), y) || !parse_number(s.substr(12, 2), hh) ||
      !parse_number(s.substr(15, 2), mm) || !parse_number(s.substr(18, 2), ss) || !parse_number(s.substr(22, 4), off)) {
    return false;
  }
  const auto mon = std::find(kMonths.begin(), kMonths.end(), s.substr(3, 3));
  if (mon == kMonths.end()) return false;
  const char sign = s[21];
  if (sign != '+' && sign != '-') return false;
  const unsigned off_h = off / 100, off_m = off % 100;
  if (hh > 23 || mm > 59 || ss > 60 || off_m > 59) return false;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mon - kMonths.begin()) + 1}, day{d}};
  if (!ymd.ok()) return false;
  offset_minutes = static_cast<int>(off_h * 60 + off_m) * (sign == '-' ? -1 : 1);
  const auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  tp = local - minutes{offset_minutes};
  return true;
}

std::string format_clf_time(std::chrono::sys_seconds tp, int offset_minutes) {
  using namespace std::chrono;
  const auto local = tp + minutes{offset_minutes};
  const auto day_point = floor<days>(local);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{local - day_point};
  const int off = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02lld:%02lld:%02lld %c%02d%02d", static_cast<unsigned>(ymd.day()),
                kMonths[static_cast<unsigned>(ymd.month()) - 1].data(), static_cast<int>(ymd.year()),
                static_cast<long long>(hms.hours().count()), static_cast<long long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()), offset_minutes < 0 ? '-' : '+', off / 60, off % 60);
  return buf;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view s) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len != 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (ok) {
      // Reject overlong forms, surrogates and out-of-range code points.
      static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      ok = cp >= kMin[len] && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    }
    if (ok) {
      out.append(s.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

// Reads a double-quoted field starting at `pos` (which must point at '"').
// Backslash escapes are unescaped.
std::optional<std::string> read_quoted(std::string_view line, std::size_t& pos) {
  if (pos >= line.size() || line[pos] != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = pos + 1; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size()) {
      out.push_back(line[++i]);
    } else if (line[i] == '"') {
      pos = i + 1;
      return out;
    } else {
      out.push_back(line[i]);
    }
  }
  return std::nullopt;
}

std::string_view read_token(std::string_view line, std::size_t& pos) {
  const std::size_t start = pos;
  while (pos < line.size() && line[pos] != ' ') ++pos;
  return line.substr(start, pos - start);
}

bool skip_space(std::string_view line, std::size_t& pos) {
  if (pos >= line.size() || line[pos] != ' ') return false;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  return true;
}

std::optional<LogRecord> fail(std::string* error, std::string reason) {
  if (error) *error = std::move(reason);
  return std::nullopt;
}

}  // namespace

LogFormat parse_log_format(std::string_view name) {
  if (name == "common" || name == "clf") return LogFormat::kCommon;
  if (name == "combined") return LogFormat::kCombined;
  throw std::invalid_argument("unknown log format '" + std::string(name) + "'");
}

std::string normalize_resource(std::string_view target) {
  // Absolute-form targets carry scheme and host; keep only the path.
  if (auto scheme = target.find("://"); scheme != std::string_view::npos && target.find('/') > scheme) {
    const auto path = target.find('/', scheme + 3);
    target = path == std::string_view::npos ? std::string_view{"/"} : target.substr(path);
  }
  target = target.substr(0, std::min(target.find('?'), target.find('#')));
  std::string decoded = decode_resource(target);
  decoded = sanitize_utf8(decoded);
  std::string out;
  out.reserve(decoded.size());
  for (char c : decoded) {
    if (c == '/' && !out.empty() && out.back() == '/') continue;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::string decode_resource(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%' && i + 2 < encoded.size()) {
      const int hi = hex_value(encoded[i + 1]);
      const int lo = hex_value(encoded[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(encoded[i]);
  }
  return out;
}

std::string encode_resource(std::string_view resource, std::string_view extra) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(resource.size());
  for (char ch : resource) {
    const auto c = static_cast<unsigned char>(ch);
    const bool escape = c <= 0x20 || c >= 0x7F || ch == '%' || ch == '?' || ch == '#' || ch == '"' || ch == '\\' ||
                        extra.find(ch) != std::string_view::npos;
    if (escape) {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

std::optional<LogRecord> parse_line(std::string_view line, LogFormat format, std::string* error) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.find_first_not_of(" \t") == std::string_view::npos) return fail(error, "empty line");

  LogRecord rec;
  std::size_t pos = 0;
  rec.client_ip = std::string(read_token(line, pos));
  if (!is_ip_address(rec.client_ip)) return fail(error, "invalid client address '" + rec.client_ip + "'");
  if (!skip_space(line, pos) || read_token(line, pos).empty()) return fail(error, "missing ident field");
  if (!skip_space(line, pos) || read_token(line, pos).empty()) return fail(error, "missing authuser field");
  if (!skip_space(line, pos) || pos >= line.size() || line[pos] != '[') return fail(error, "missing timestamp");
  const auto close = line.find(']', pos);
  if (close == std::string_view::npos) return fail(error, "unterminated timestamp");
  if (!parse_clf_time(line.substr(pos + 1, close - pos - 1), rec.timestamp, rec.utc_offset_minutes)) {
    return fail(error, "unparseable timestamp '" + std::string(line.substr(pos + 1, close - pos - 1)) + "'");
  }
  pos = close + 1;
  if (!skip_space(line, pos)) return fail(error, "missing request");
  const auto request = read_quoted(line, pos);
  if (!request) return fail(error, "missing or unterminated request field");

  std::size_t rpos = 0;
  std::string_view req{*request};
  rec.method = std::string(read_token(req, rpos));
  if (rec.method.empty()) return fail(error, "empty request");
  if (!skip_space(req, rpos)) return fail(error, "request has no target");
  const std::string_view target = read_token(req, rpos);
  if (skip_space(req, rpos)) rec.protocol = std::string(read_token(req, rpos));
  if (rpos != req.size()) return fail(error, "malformed request '" + *request + "'");
  rec.resource = normalize_resource(target);
  if (rec.resource.empty()) return fail(error, "empty resource");

  if (!skip_space(line, pos)) return fail(error, "missing status");
  const auto status = read_token(line, pos);
  if (!parse_number(status, rec.status) || rec.status < 100 || rec.status > 999) {
    return fail(error, "non-numeric status '" + std::string(status) + "'");
  }
  if (!skip_space(line, pos)) return fail(error, "missing bytes");
  const auto bytes = read_token(line, pos);
  if (bytes == "-") {
    rec.bytes = 0;
  } else if (!parse_number(bytes, rec.bytes)) {
    return fail(error, "non-numeric bytes '" + std::string(bytes) + "'");
  }

  if (format == LogFormat::kCombined) {
    if (!skip_space(line, pos) || !read_quoted(line, pos)) return fail(error, "missing referrer field");
    if (!skip_space(line, pos) || !read_quoted(line, pos)) return fail(error, "missing user-agent field");
  }
  return rec;
}

ParseResult parse_log(std::istream& in, LogFormat format) {
  ParseResult result;
  std::string line;
  std::size_t number = 0;
  std::string error;
  while (std::getline(in, line)) {
    ++number;
    if (auto rec = parse_line(line, format, &error)) {
      result.records.push_back(std::move(*rec));
    } else {
      result.diagnostics.push_back({number, error});
    }
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading log after line " + std::to_string(number));
  return result;
}

std::string render_line(const LogRecord& r) {
  std::string out = r.client_ip;
  out += " - - [";
  out += format_clf_time(r.timestamp, r.utc_offset_minutes);
  out += "] \"";
  out += r.method;
  out += ' ';
  out += encode_resource(r.resource);
  if (!r.protocol.empty()) {
    out += ' ';
    out += r.protocol;
  }
  out += "\" ";
  out += std::to_string(r.status);
  out += ' ';
  out += std::to_string(r.bytes);
  return out;
}

std::vector<LogRecord> clean(std::span<const LogRecord> records, const CleanOptions& options) {
  if (options.ignore_suffixes.empty()) throw std::invalid_argument("clean: ignore_suffixes must not be empty");
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    return out;
  };
  std::vector<std::string> suffixes;
  for (const auto& s : options.ignore_suffixes) suffixes.push_back(lower(s));

  std::vector<LogRecord> out;
  for (const auto& r : records) {
    const std::string path = lower(r.resource);
    const bool ignored = std::any_of(suffixes.begin(), suffixes.end(), [&](const std::string& s) {
      return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    });
    if (ignored) continue;
    if (!options.keep_status_classes.contains(r.status / 100)) continue;
    if (!options.keep_methods.empty() && !options.keep_methods.contains(r.method)) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace webpf
