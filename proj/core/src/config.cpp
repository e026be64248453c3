// SPDX-License-Identifier: Apache-2.0
#include "webpf/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace webpf {

namespace {

struct Value {
  enum class Kind { kString, kNumber, kBool, kArray } kind = Kind::kString;
  std::string text;  // unescaped string, or the raw numeral
  bool flag = false;
  std::vector<Value> items;
};

class Parser {
 public:
  Parser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  Value parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) error("missing value");
    const char c = s_[pos_];
    Value v;
    if (c == '"') {
      v.kind = Value::Kind::kString;
      ++pos_;
      while (true) {
        if (pos_ >= s_.size()) error("unterminated string");
        const char ch = s_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= s_.size()) error("unterminated escape");
          const char e = s_[pos_++];
          v.text.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        } else {
          v.text.push_back(ch);
        }
      }
    } else if (c == '[') {
      v.kind = Value::Kind::kArray;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value());
        skip_ws();
        if (pos_ >= s_.size()) error("unterminated array");
        if (s_[pos_] == ']') {
          ++pos_;
          break;
        }
        if (s_[pos_] != ',') error("expected ',' or ']' in array");
        ++pos_;
      }
    } else {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
      v.text = std::string(s_.substr(start, pos_ - start));
      if (v.text == "true" || v.text == "false") {
        v.kind = Value::Kind::kBool;
        v.flag = v.text == "true";
      } else {
        v.kind = Value::Kind::kNumber;
        if (v.text.empty() || v.text.find_first_not_of("0123456789.-+eE_") != std::string::npos) {
          error("invalid value '" + v.text + "'");
        }
      }
    }
    return v;
  }

  void expect_end() {
    skip_ws();
    if (pos_ < s_.size()) error("trailing characters after value");
  }

  [[noreturn]] void error(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && in_string) {
      ++i;
    } else if (s[i] == '"') {
      in_string = !in_string;
    } else if (s[i] == '#' && !in_string) {
      return s.substr(0, i);
    }
  }
  return s;
}

struct Binder {
  std::string where;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where + ": " + what); }

  std::string str(const Value& v) const {
    if (v.kind != Value::Kind::kString) fail("expected a string");
    return v.text;
  }
  template <typename T>
  T integer(const Value& v) const {
    if (v.kind != Value::Kind::kNumber) fail("expected an integer");
    std::string digits;
    for (char c : v.text) {
      if (c != '_') digits.push_back(c);
    }
    T out{};
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
    if (ec != std::errc{} || p != digits.data() + digits.size()) fail("expected an integer, got '" + v.text + "'");
    return out;
  }
  double real(const Value& v) const {
    if (v.kind != Value::Kind::kNumber) fail("expected a number");
    try {
      std::size_t used = 0;
      const double d = std::stod(v.text, &used);
      if (used != v.text.size()) fail("expected a number, got '" + v.text + "'");
      return d;
    } catch (const std::logic_error&) {
      fail("expected a number, got '" + v.text + "'");
    }
  }
  Ratio ratio(const Value& v) const {
    if (v.kind == Value::Kind::kArray || v.kind == Value::Kind::kBool) fail("expected a ratio");
    try {
      return Ratio::parse(v.text);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  const std::vector<Value>& array(const Value& v) const {
    if (v.kind != Value::Kind::kArray) fail("expected an array");
    return v.items;
  }
};

struct GroupSlot {
  std::size_t index = 0;
  std::optional<std::size_t> hint_capacity;
  std::optional<std::size_t> window;
};

void apply(PipelineConfig& cfg, const std::string& section, const std::string& key, const Value& v,
           std::map<std::string, GroupSlot>& group_slots) {
  const Binder b{"[" + section + "] " + key};
  auto unknown = [&] { throw ConfigError("unknown key '" + key + "' in [" + section + "]"); };

  if (section == "paths") {
    if (key == "log") cfg.paths.log = b.str(v);
    else if (key == "sessions") cfg.paths.sessions = b.str(v);
    else if (key == "rules") cfg.paths.rules = b.str(v);
    else if (key == "report") cfg.paths.report = b.str(v);
    else unknown();
  } else if (section == "ingest") {
    if (key == "log_format") {
      try {
        cfg.log_format = parse_log_format(b.str(v));
      } catch (const std::invalid_argument& e) {
        b.fail(e.what());
      }
    } else if (key == "ignore_suffixes") {
      cfg.clean.ignore_suffixes.clear();
      for (const auto& item : b.array(v)) {
        std::string suffix = b.str(item);
        for (char& ch : suffix) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        cfg.clean.ignore_suffixes.insert(std::move(suffix));
      }
    } else if (key == "keep_status") {
      cfg.clean.keep_status_classes.clear();
      for (const auto& item : b.array(v)) cfg.clean.keep_status_classes.insert(b.integer<int>(item));
    } else if (key == "keep_methods") {
      cfg.clean.keep_methods.clear();
      for (const auto& item : b.array(v)) cfg.clean.keep_methods.insert(b.str(item));
    } else {
      unknown();
    }
  } else if (section == "session") {
    if (key == "gap_seconds") cfg.session.gap = std::chrono::seconds{b.integer<std::int64_t>(v)};
    else if (key == "default_dwell") cfg.session.default_dwell = b.integer<std::int64_t>(v);
    else unknown();
  } else if (section == "roughset") {
    if (key == "dwell_thresholds") {
      cfg.quality.bucketing.thresholds.clear();
      for (const auto& item : b.array(v)) cfg.quality.bucketing.thresholds.push_back(b.integer<std::int64_t>(item));
    } else if (key == "min_page_support") {
      cfg.quality.bucketing.min_page_support = b.integer<std::size_t>(v);
    } else if (key == "target_quantile") {
      cfg.quality.target_quantile = b.real(v);
    } else {
      unknown();
    }
  } else if (section == "mining") {
    if (key == "t_c") cfg.mining.min_confidence = b.ratio(v);
    else if (key == "max_order") cfg.mining.max_order = b.integer<std::size_t>(v);
    else if (key == "max_tail") cfg.mining.max_tail = b.integer<std::size_t>(v);
    else unknown();
  } else if (section == "simulate") {
    if (key == "cache_capacity") cfg.replay.cache_capacity = b.integer<std::size_t>(v);
    else if (key == "hint_capacity") cfg.replay.default_agent.hint_capacity = b.integer<std::size_t>(v);
    else if (key == "window") cfg.replay.default_agent.window = b.integer<std::size_t>(v);
    else if (key == "default_page_bytes") cfg.replay.default_page_bytes = b.integer<std::uint64_t>(v);
    else unknown();
  } else if (section == "gen") {
    if (key == "seed") cfg.seed = b.integer<std::uint64_t>(v);
    else unknown();
  } else if (section.starts_with("group.")) {
    auto [slot, inserted] = group_slots.try_emplace(section, GroupSlot{cfg.groups.size(), {}, {}});
    if (inserted) {
      GroupClientConfig g;
      g.group_id = section.substr(6);
      cfg.groups.push_back(std::move(g));
    }
    auto& g = cfg.groups[slot->second.index];
    if (key == "ranges") {
      for (const auto& item : b.array(v)) {
        try {
          g.ranges.push_back(CidrRange::parse(b.str(item)));
        } catch (const std::invalid_argument& e) {
          b.fail(e.what());
        }
      }
    } else if (key == "hint_capacity") {
      slot->second.hint_capacity = b.integer<std::size_t>(v);
    } else if (key == "window") {
      slot->second.window = b.integer<std::size_t>(v);
    } else {
      unknown();
    }
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(!clean.ignore_suffixes.empty(), "ingest.ignore_suffixes must not be empty");
  require(session.gap.count() > 0, "session.gap_seconds must be positive");
  require(session.default_dwell >= 0, "session.default_dwell must be non-negative");
  const auto& t = quality.bucketing.thresholds;
  bool increasing = t.size() >= 2 && t.front() == 0;
  for (std::size_t i = 1; increasing && i < t.size(); ++i) increasing = t[i] > t[i - 1];
  require(increasing, "roughset.dwell_thresholds must start at 0 and increase strictly (at least two)");
  require(quality.bucketing.min_page_support >= 1, "roughset.min_page_support must be at least 1");
  require(quality.target_quantile >= 0.0 && quality.target_quantile <= 1.0, "roughset.target_quantile must lie in [0, 1]");
  require(mining.min_confidence.num() > 0 && mining.min_confidence <= Ratio{1, 1}, "mining.t_c must lie in (0, 1]");
  require(mining.max_order >= 1 && mining.max_order <= 16, "mining.max_order must lie in [1, 16]");
  require(mining.max_tail >= 1 && mining.max_tail <= 16, "mining.max_tail must lie in [1, 16]");
  require(replay.cache_capacity >= 1, "simulate.cache_capacity must be positive");
  require(replay.default_agent.window >= mining.max_order, "simulate.window must be at least mining.max_order");
  for (const auto& g : groups) {
    require(g.agent.window >= mining.max_order, "group '" + g.group_id + "': window must be at least mining.max_order");
  }
  try {
    validate_groups(groups);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg;
  std::map<std::string, GroupSlot> group_slots;
  std::set<std::string> seen_keys;
  std::string section;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("config line " + std::to_string(number) + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section == "group.") throw ConfigError("config line " + std::to_string(number) + ": empty group id");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    if (section.empty()) throw ConfigError("config line " + std::to_string(number) + ": key outside of a section");
    const std::string key(trim(line.substr(0, eq)));
    if (!seen_keys.insert(section + "." + key).second) {
      throw ConfigError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    Parser p(line.substr(eq + 1), number);
    const Value v = p.parse_value();
    p.expect_end();
    apply(cfg, section, key, v, group_slots);
  }
  // Groups inherit agent parameters from [simulate] wherever that section sits.
  for (const auto& [name, slot] : group_slots) {
    auto& agent = cfg.groups[slot.index].agent;
    agent.hint_capacity = slot.hint_capacity.value_or(cfg.replay.default_agent.hint_capacity);
    agent.window = slot.window.value_or(cfg.replay.default_agent.window);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace webpf
