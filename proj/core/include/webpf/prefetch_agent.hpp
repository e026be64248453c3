// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "webpf/cidr.hpp"
#include "webpf/markov_miner.hpp"
#include "webpf/page_table.hpp"
#include "webpf/ratio.hpp"
#include "webpf/rule_repo.hpp"

namespace webpf {

struct AgentParams {
  std::size_t hint_capacity = 16;
  /// Number of recent requests kept for head matching; should be at least the
  /// highest rule order.
  std::size_t window = 3;
};

struct GroupClientConfig {
  std::string group_id;
  std::vector<CidrRange> ranges;
  AgentParams agent;
};

/// Throws std::invalid_argument when a group has no ranges, ids repeat, or
/// ranges of two different groups overlap.
void validate_groups(std::span<const GroupClientConfig> groups);

/// Index of the group whose ranges contain `ip`.
std::optional<std::size_t> ip_match(const IpAddress& ip, std::span<const GroupClientConfig> groups);
std::optional<std::size_t> ip_match(std::string_view ip, std::span<const GroupClientConfig> groups);

struct HintEntry {
  PageId page;
  RuleId source_rule = 0;
  Ratio priority;
};

/// Pages scheduled for prefetch, highest priority first, no duplicates, at
/// most `capacity` entries. Equal priorities keep insertion order.
class HintList {
 public:
  explicit HintList(std::size_t capacity) : capacity_(capacity) {}

  /// Inserts or raises the priority of `page`. Returns true when the page was
  /// not present before and is present afterwards.
  bool add(PageId page, RuleId source, Ratio priority);
  bool remove(PageId page);
  bool contains(PageId page) const;
  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<HintEntry>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::vector<HintEntry> entries_;
};

struct CacheEntry {
  PageId page;
  bool prefetched = false;
  bool used = false;
  /// Size charged when the entry was prefetched.
  std::uint64_t bytes = 0;
};

struct AccessResult {
  bool hit = false;
  /// First demand hit on a prefetched entry.
  bool prefetch_used = false;
  std::optional<CacheEntry> evicted;
};

/// Entry-count LRU cache that remembers which entries were prefetched and
/// whether they were used.
class CacheModel {
 public:
  explicit CacheModel(std::size_t capacity);

  /// Demand access: a hit refreshes recency and marks the entry used; a miss
  /// inserts the page as a demand entry.
  AccessResult access(PageId page);

  /// Inserts a prefetched page. Returns the evicted entry, if any. A page
  /// that is already resident is only refreshed.
  std::optional<CacheEntry> insert_prefetched(PageId page, std::uint64_t bytes);

  bool touch(PageId page);
  bool contains(PageId page) const { return index_.contains(page); }
  const CacheEntry* find(PageId page) const;
  std::size_t size() const { return lru_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Most recently used first.
  std::vector<CacheEntry> entries() const { return {lru_.begin(), lru_.end()}; }

 private:
  std::optional<CacheEntry> make_room();

  std::size_t capacity_;
  std::list<CacheEntry> lru_;
  std::unordered_map<PageId, std::list<CacheEntry>::iterator> index_;
};

/// Last observed object size per page.
class PageSizes {
 public:
  explicit PageSizes(std::uint64_t default_bytes = 1024) : default_(default_bytes) {}
  void observe(PageId page, std::uint64_t bytes) { sizes_[page] = bytes; }
  std::uint64_t size_of(PageId page) const;

 private:
  std::uint64_t default_;
  std::unordered_map<PageId, std::uint64_t> sizes_;
};

struct PageLoadResult {
  std::uint64_t bytes_prefetched = 0;
  /// Pages newly inserted, in load order.
  std::vector<PageId> loaded;
  std::vector<CacheEntry> evicted;
};

/// Loads `hints` in order. Resident pages are refreshed without being charged.
/// At most capacity() hints are processed so a batch never evicts its own
/// pages; the rest are skipped.
PageLoadResult page_load(CacheModel& cache, std::span<const PageId> hints, const PageSizes& sizes);

/// Best rule among candidates sharing a head: highest confidence, then
/// support, then smallest tail.
const MarkovRule& resolve_conflict(std::span<const MarkovRule> candidates);
/// Same, with confidences recomputed from `counts`.
const MarkovRule& resolve_conflict(std::span<const MarkovRule> candidates, const SequenceCounts& counts);

enum class Transition {
  kContinued,  ///< request was the next element of the followed sequence
  kMatched,    ///< sequence broken (or none), a rule head matched the window
  kNoMatch,    ///< sequence broken (or none), no rule matched: crawl request
};

struct RequestActions {
  bool hit = false;
  bool prefetch_used = false;
  std::optional<CacheEntry> evicted;
  Transition transition = Transition::kNoMatch;
  /// Newly scheduled hints, highest priority first.
  std::vector<PageId> prefetch;
  bool crawl_request = false;
};

struct ActiveSequence {
  RuleId rule = 0;
  Sequence pages;
  std::size_t cursor = 0;  // index of the last matched page
};

struct AgentState {
  std::deque<PageId> recent;
  HintList hints{0};
  std::optional<ActiveSequence> active;
};

/// Per-client prefetching agent driven one request at a time.
///
/// A request that is the next page of the followed rule sequence advances the
/// cursor and schedules every page after it, plus the pages that follow it in
/// any other rule. When the sequence is used up the agent looks for a new rule
/// without dropping its hints. Any other request clears the hints and looks
/// up the longest suffix of the recent window among rule heads; with no match
/// it raises a crawl request and leaves the hint list empty.
class PrefetchAgent {
 public:
  PrefetchAgent(const RuleRepository& repo, AgentParams params);

  RequestActions on_request(PageId page, CacheModel& cache);

  /// Forgets everything, e.g. at a session boundary.
  void reset();

  const AgentState& state() const { return state_; }
  const AgentParams& params() const { return params_; }

 private:
  bool activate_from_window(std::vector<PageId>& added);
  void schedule_successors(PageId page, std::vector<PageId>& added);
  void add_hint(PageId page, RuleId source, Ratio priority, std::vector<PageId>& added);

  const RuleRepository* repo_;
  AgentParams params_;
  AgentState state_;
  PageId current_{};
};

}  // namespace webpf
