// SPDX-License-Identifier: Apache-2.0
#include "webpf/markov_miner.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "webpf/log_ingest.hpp"

namespace webpf {

void SequenceCounts::add(std::span<const PageId> pattern, std::uint64_t n) {
  counts_[Sequence(pattern.begin(), pattern.end())] += n;
}

std::uint64_t SequenceCounts::count(std::span<const PageId> pattern) const {
  const auto it = counts_.find(Sequence(pattern.begin(), pattern.end()));
  return it == counts_.end() ? 0 : it->second;
}

void SequenceCounts::merge(const SequenceCounts& other) {
  for (const auto& [pattern, n] : other.counts_) counts_[pattern] += n;
}

SequenceCounts count_sequences(std::span<const Sequence> transactions, std::size_t max_len) {
  if (max_len < 2) throw std::invalid_argument("max pattern length must be at least 2");
  SequenceCounts counts;
  for (const auto& t : transactions) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t longest = std::min(max_len, t.size() - i);
      for (std::size_t len = 1; len <= longest; ++len) counts.add(std::span{t}.subspan(i, len));
    }
  }
  return counts;
}

SequenceCounts count_sequences(std::span<const Session> sessions, std::size_t max_len) {
  std::vector<Sequence> transactions;
  transactions.reserve(sessions.size());
  for (const auto& s : sessions) transactions.push_back(s.pages());
  return count_sequences(transactions, max_len);
}

std::uint64_t dynamic_threshold(const SequenceCounts& counts) {
  std::uint64_t max_count = 0;
  for (const auto& [pattern, n] : counts) {
    if (pattern.size() >= 2) max_count = std::max(max_count, n);
  }
  return std::max<std::uint64_t>(1, max_count / 2);
}

Sequence MarkovRule::sequence() const {
  Sequence s = head;
  s.insert(s.end(), tail.begin(), tail.end());
  return s;
}

std::vector<MarkovRule> mine_rules(const SequenceCounts& counts, const MiningParams& params) {
  if (params.min_confidence.num() == 0 || params.min_confidence > Ratio{1, 1}) {
    throw std::invalid_argument("confidence cut-off must lie in (0, 1]");
  }
  if (params.min_support == 0) throw std::invalid_argument("minimum support must be at least 1");

  std::vector<MarkovRule> rules;
  for (const auto& [pattern, support] : counts) {
    if (pattern.size() < 2 || support < params.min_support) continue;
    for (std::size_t n = 1; n < pattern.size() && n <= params.max_order; ++n) {
      if (pattern.size() - n > params.max_tail) continue;
      const std::span<const PageId> head{pattern.data(), n};
      const std::uint64_t head_count = counts.count(head);
      if (head_count == 0) continue;  // head longer than the counted length
      const Ratio conf{support, head_count};
      if (conf < params.min_confidence) continue;
      rules.push_back(MarkovRule{Sequence(pattern.begin(), pattern.begin() + static_cast<std::ptrdiff_t>(n)),
                                 Sequence(pattern.begin() + static_cast<std::ptrdiff_t>(n), pattern.end()), support,
                                 conf});
    }
  }
  std::sort(rules.begin(), rules.end(), [](const MarkovRule& a, const MarkovRule& b) {
    return std::tie(a.head, a.tail) < std::tie(b.head, b.tail);
  });
  return rules;
}

Ratio rule_confidence(std::span<const PageId> head, std::span<const PageId> tail, const SequenceCounts& counts) {
  const std::uint64_t head_count = counts.count(head);
  if (head_count == 0) throw std::invalid_argument("confidence undefined for an unseen head");
  Sequence joined(head.begin(), head.end());
  joined.insert(joined.end(), tail.begin(), tail.end());
  return Ratio{counts.count(joined), head_count};
}

namespace {

std::string join_pages(const Sequence& seq, const PageTable& pages) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ',';
    out += encode_resource(pages.name(seq[i]), ",|");
  }
  return out;
}

Sequence split_pages(std::string_view field, PageTable& pages) {
  Sequence out;
  std::size_t start = 0;
  while (true) {
    const auto comma = field.find(',', start);
    const auto item = field.substr(start, comma - start);
    if (item.empty()) throw std::runtime_error("empty page name");
    out.push_back(pages.intern(decode_resource(item)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t to_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_rule(const MarkovRule& rule, const PageTable& pages) {
  return join_pages(rule.head, pages) + '|' + join_pages(rule.tail, pages) + '|' + std::to_string(rule.support) + '|' +
         rule.confidence.to_string();
}

MarkovRule parse_rule(std::string_view line, PageTable& pages) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    fields.push_back(line.substr(start, bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (fields.size() != 4) throw std::runtime_error("expected 4 '|'-separated fields");
  MarkovRule rule;
  rule.head = split_pages(fields[0], pages);
  rule.tail = split_pages(fields[1], pages);
  rule.support = to_u64(fields[2]);
  const auto slash = fields[3].find('/');
  if (slash == std::string_view::npos) throw std::runtime_error("confidence must be num/den");
  const std::uint64_t num = to_u64(fields[3].substr(0, slash));
  const std::uint64_t den = to_u64(fields[3].substr(slash + 1));
  if (den == 0 || num == 0 || num > den) throw std::runtime_error("confidence must lie in (0, 1]");
  if (num != rule.support) throw std::runtime_error("confidence numerator must equal support");
  rule.confidence = Ratio{num, den};
  return rule;
}

void write_rules(std::ostream& out, std::span<const MarkovRule> rules, const PageTable& pages) {
  std::vector<std::string> lines;
  lines.reserve(rules.size());
  for (const auto& r : rules) lines.push_back(format_rule(r, pages));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out << l << '\n';
}

std::vector<MarkovRule> read_rules(std::istream& in, PageTable& pages) {
  std::vector<MarkovRule> rules;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      rules.push_back(parse_rule(line, pages));
    } catch (const std::exception& e) {
      throw std::runtime_error("rule file line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading rule file");
  return rules;
}

}  // namespace webpf
