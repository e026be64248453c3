// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "webpf/page_table.hpp"
#include "webpf/ratio.hpp"
#include "webpf/sessionizer.hpp"

namespace webpf {

/// Occurrence counts of contiguous page subsequences. Overlapping occurrences
/// are counted separately.
class SequenceCounts {
 public:
  using Map = std::map<Sequence, std::uint64_t>;

  void add(std::span<const PageId> pattern, std::uint64_t n = 1);
  std::uint64_t count(std::span<const PageId> pattern) const;
  void merge(const SequenceCounts& other);

  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  Map::const_iterator begin() const { return counts_.begin(); }
  Map::const_iterator end() const { return counts_.end(); }

  friend bool operator==(const SequenceCounts&, const SequenceCounts&) = default;

 private:
  Map counts_;
};

SequenceCounts count_sequences(std::span<const Sequence> transactions, std::size_t max_len);
SequenceCounts count_sequences(std::span<const Session> sessions, std::size_t max_len);

/// Minimum support derived from the data: half the highest count of any
/// pattern of length >= 2, floored, never below 1.
std::uint64_t dynamic_threshold(const SequenceCounts& counts);

/// head => tail, with support = count(head ++ tail) and
/// confidence = count(head ++ tail) / count(head), unreduced.
struct MarkovRule {
  Sequence head;
  Sequence tail;
  std::uint64_t support = 0;
  Ratio confidence;

  std::size_t order() const { return head.size(); }
  Sequence sequence() const;

  friend bool operator==(const MarkovRule& a, const MarkovRule& b) {
    return a.head == b.head && a.tail == b.tail && a.support == b.support && a.confidence.identical(b.confidence);
  }
};

struct MiningParams {
  Ratio min_confidence{1, 2};
  std::uint64_t min_support = 1;
  std::size_t max_order = 3;
  std::size_t max_tail = 2;
};

/// Every rule with head length in [1, max_order], tail length in [1, max_tail],
/// support >= min_support and confidence >= min_confidence, drawn from the
/// counted patterns. Sorted by (head, tail).
std::vector<MarkovRule> mine_rules(const SequenceCounts& counts, const MiningParams& params);

/// count(head ++ tail) / count(head). Throws std::invalid_argument if the
/// head was never observed.
Ratio rule_confidence(std::span<const PageId> head, std::span<const PageId> tail, const SequenceCounts& counts);

/// `head|tail|support|num/den`, pages comma-separated and percent-encoded.
std::string format_rule(const MarkovRule& rule, const PageTable& pages);

/// Throws std::runtime_error on malformed text.
MarkovRule parse_rule(std::string_view line, PageTable& pages);

/// Writes rules one per line, lines sorted bytewise.
void write_rules(std::ostream& out, std::span<const MarkovRule> rules, const PageTable& pages);

/// Reads a rule file; errors name the offending line.
std::vector<MarkovRule> read_rules(std::istream& in, PageTable& pages);

}  // namespace webpf
