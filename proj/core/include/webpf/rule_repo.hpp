// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "webpf/markov_miner.hpp"
#include "webpf/page_table.hpp"

namespace webpf {

using RuleId = std::size_t;

struct SequenceHash {
  std::size_t operator()(const Sequence& s) const noexcept;
};

/// Mined rules with a head index and an inverted page index.
///
/// The head index maps each head sequence to its rules. The containment index
/// lists a rule under page X when X occurs in head ++ tail anywhere except the
/// final position, so that a scan for X yields rules that still have pages
/// after X. Both indices are derived data and can be rebuilt from rules().
///
/// Inserts are single-writer. After freeze() the repository rejects inserts
/// and may be read concurrently.
class RuleRepository {
 public:
  RuleRepository() = default;
  explicit RuleRepository(std::span<const MarkovRule> rules);

  /// Adds a rule. A rule with the same head and tail is replaced if the new
  /// one has higher support, otherwise kept. Returns the rule's id.
  RuleId insert(MarkovRule rule);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::size_t size() const { return rules_.size(); }
  const MarkovRule& rule(RuleId id) const { return rules_.at(id); }
  const std::vector<MarkovRule>& rules() const { return rules_; }
  std::size_t max_order() const { return max_order_; }

  /// Rules whose head equals `head`, best first (see rule_precedes).
  std::vector<RuleId> lookup_by_head(std::span<const PageId> head) const;

  /// Tries suffixes of `window` from the longest usable length down to 1 and
  /// returns the rules of the first suffix that matches any head.
  std::vector<RuleId> lookup_longest_suffix(std::span<const PageId> window) const;

  /// Rules containing `page` at a non-final position of head ++ tail, best first.
  std::vector<RuleId> scan_containing(PageId page) const;

  /// True when rebuilding both indices from rules() reproduces them exactly.
  bool indices_consistent() const;

  void save(std::ostream& out, const PageTable& pages) const;
  /// Throws std::runtime_error naming the line on malformed input.
  static RuleRepository load(std::istream& in, PageTable& pages);

 private:
  using HeadIndex = std::unordered_map<Sequence, std::vector<RuleId>, SequenceHash>;
  using PageIndex = std::unordered_map<PageId, std::vector<RuleId>>;

  void index(RuleId id, HeadIndex& heads, PageIndex& pages) const;
  void sort_best_first(std::vector<RuleId>& ids) const;

  std::vector<MarkovRule> rules_;
  HeadIndex head_index_;
  PageIndex containment_index_;
  std::size_t max_order_ = 0;
  bool frozen_ = false;
};

/// Precedence between rules: higher confidence, then higher support, then the
/// lexicographically smaller tail, then the smaller head.
bool rule_precedes(const MarkovRule& a, const MarkovRule& b);

}  // namespace webpf
