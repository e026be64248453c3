// SPDX-License-Identifier: Apache-2.0
#include "webpf/rule_repo.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace webpf {

std::size_t SequenceHash::operator()(const Sequence& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (PageId p : s) {
    h ^= p.value;
    h *= 0x100000001b3ull;
  }
  return h;
}

bool rule_precedes(const MarkovRule& a, const MarkovRule& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.support != b.support) return a.support > b.support;
  if (a.tail != b.tail) return a.tail < b.tail;
  return a.head < b.head;
}

RuleRepository::RuleRepository(std::span<const MarkovRule> rules) {
  for (const auto& r : rules) insert(r);
}

void RuleRepository::index(RuleId id, HeadIndex& heads, PageIndex& pages) const {
  const MarkovRule& r = rules_[id];
  heads[r.head].push_back(id);
  const Sequence seq = r.sequence();
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    auto& list = pages[seq[i]];
    if (list.empty() || list.back() != id) list.push_back(id);
  }
}

RuleId RuleRepository::insert(MarkovRule rule) {
  if (frozen_) throw std::logic_error("insert into a frozen rule repository");
  if (rule.head.empty() || rule.tail.empty()) throw std::invalid_argument("rule head and tail must be non-empty");
  if (auto it = head_index_.find(rule.head); it != head_index_.end()) {
    for (RuleId id : it->second) {
      if (rules_[id].tail == rule.tail) {
        if (rule.support > rules_[id].support) rules_[id] = std::move(rule);
        return id;
      }
    }
  }
  const RuleId id = rules_.size();
  max_order_ = std::max(max_order_, rule.head.size());
  rules_.push_back(std::move(rule));
  index(id, head_index_, containment_index_);
  return id;
}

void RuleRepository::sort_best_first(std::vector<RuleId>& ids) const {
  std::sort(ids.begin(), ids.end(), [&](RuleId a, RuleId b) { return rule_precedes(rules_[a], rules_[b]); });
}

std::vector<RuleId> RuleRepository::lookup_by_head(std::span<const PageId> head) const {
  const auto it = head_index_.find(Sequence(head.begin(), head.end()));
  if (it == head_index_.end()) return {};
  std::vector<RuleId> out = it->second;
  sort_best_first(out);
  return out;
}

std::vector<RuleId> RuleRepository::lookup_longest_suffix(std::span<const PageId> window) const {
  for (std::size_t n = std::min(window.size(), max_order_); n >= 1; --n) {
    auto found = lookup_by_head(window.last(n));
    if (!found.empty()) return found;
  }
  return {};
}

std::vector<RuleId> RuleRepository::scan_containing(PageId page) const {
  const auto it = containment_index_.find(page);
  if (it == containment_index_.end()) return {};
  std::vector<RuleId> out = it->second;
  sort_best_first(out);
  return out;
}

bool RuleRepository::indices_consistent() const {
  HeadIndex heads;
  PageIndex pages;
  for (RuleId id = 0; id < rules_.size(); ++id) index(id, heads, pages);
  return heads == head_index_ && pages == containment_index_;
}

void RuleRepository::save(std::ostream& out, const PageTable& pages) const { write_rules(out, rules_, pages); }

RuleRepository RuleRepository::load(std::istream& in, PageTable& pages) {
  RuleRepository repo;
  for (auto& r : read_rules(in, pages)) repo.insert(std::move(r));
  if (!repo.indices_consistent()) throw std::runtime_error("rule repository indices inconsistent after load");
  return repo;
}

}  // namespace webpf
