// SPDX-License-Identifier: Apache-2.0
#include "webpf/prefetch_agent.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace webpf {

void validate_groups(std::span<const GroupClientConfig> groups) {
  std::set<std::string> ids;
  for (const auto& g : groups) {
    if (g.ranges.empty()) throw std::invalid_argument("group '" + g.group_id + "' has no IP ranges");
    if (!ids.insert(g.group_id).second) throw std::invalid_argument("duplicate group id '" + g.group_id + "'");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      for (const auto& a : groups[i].ranges) {
        for (const auto& b : groups[j].ranges) {
          if (a.overlaps(b)) {
            throw std::invalid_argument("range " + a.to_string() + " of group '" + groups[i].group_id +
                                        "' overlaps " + b.to_string() + " of group '" + groups[j].group_id + "'");
          }
        }
      }
    }
  }
}

std::optional<std::size_t> ip_match(const IpAddress& ip, std::span<const GroupClientConfig> groups) {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (const auto& r : groups[i].ranges) {
      if (r.contains(ip)) return i;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> ip_match(std::string_view ip, std::span<const GroupClientConfig> groups) {
  const auto parsed = IpAddress::parse(ip);
  if (!parsed) return std::nullopt;
  return ip_match(*parsed, groups);
}

// --- HintList ---------------------------------------------------------------

bool HintList::add(PageId page, RuleId source, Ratio priority) {
  auto existing = std::find_if(entries_.begin(), entries_.end(), [&](const HintEntry& e) { return e.page == page; });
  if (existing != entries_.end()) {
    if (priority <= existing->priority) return false;
    entries_.erase(existing);
    add(page, source, priority);
    return false;
  }
  const auto pos = std::find_if(entries_.begin(), entries_.end(),
                                [&](const HintEntry& e) { return e.priority < priority; });
  if (static_cast<std::size_t>(pos - entries_.begin()) >= capacity_) return false;
  entries_.insert(pos, HintEntry{page, source, priority});
  if (entries_.size() > capacity_) entries_.pop_back();
  return true;
}

bool HintList::remove(PageId page) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const HintEntry& e) { return e.page == page; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

bool HintList::contains(PageId page) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const HintEntry& e) { return e.page == page; });
}

// --- CacheModel -------------------------------------------------------------

CacheModel::CacheModel(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("cache capacity must be positive");
}

std::optional<CacheEntry> CacheModel::make_room() {
  if (lru_.size() < capacity_) return std::nullopt;
  CacheEntry victim = lru_.back();
  index_.erase(victim.page);
  lru_.pop_back();
  return victim;
}

AccessResult CacheModel::access(PageId page) {
  AccessResult result;
  if (auto it = index_.find(page); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    CacheEntry& e = *it->second;
    result.hit = true;
    result.prefetch_used = e.prefetched && !e.used;
    e.used = true;
    return result;
  }
  result.evicted = make_room();
  lru_.push_front(CacheEntry{page, false, true, 0});
  index_[page] = lru_.begin();
  return result;
}

std::optional<CacheEntry> CacheModel::insert_prefetched(PageId page, std::uint64_t bytes) {
  if (touch(page)) return std::nullopt;
  auto evicted = make_room();
  lru_.push_front(CacheEntry{page, true, false, bytes});
  index_[page] = lru_.begin();
  return evicted;
}

bool CacheModel::touch(PageId page) {
  const auto it = index_.find(page);
  if (it == index_.end()) return false;
  lru_.splice(lru_.begin(), lru_, it->second);
  return true;
}

const CacheEntry* CacheModel::find(PageId page) const {
  const auto it = index_.find(page);
  return it == index_.end() ? nullptr : &*it->second;
}

std::uint64_t PageSizes::size_of(PageId page) const {
  const auto it = sizes_.find(page);
  return it == sizes_.end() ? default_ : it->second;
}

PageLoadResult page_load(CacheModel& cache, std::span<const PageId> hints, const PageSizes& sizes) {
  PageLoadResult result;
  std::size_t slots = 0;
  for (PageId page : hints) {
    if (slots == cache.capacity()) break;
    ++slots;
    if (cache.touch(page)) continue;
    const std::uint64_t bytes = sizes.size_of(page);
    if (auto ev = cache.insert_prefetched(page, bytes)) result.evicted.push_back(*ev);
    result.bytes_prefetched += bytes;
    result.loaded.push_back(page);
  }
  return result;
}

// --- conflict resolution ----------------------------------------------------

const MarkovRule& resolve_conflict(std::span<const MarkovRule> candidates) {
  if (candidates.empty()) throw std::invalid_argument("resolve_conflict needs at least one candidate");
  return *std::min_element(candidates.begin(), candidates.end(), rule_precedes);
}

const MarkovRule& resolve_conflict(std::span<const MarkovRule> candidates, const SequenceCounts& counts) {
  if (candidates.empty()) throw std::invalid_argument("resolve_conflict needs at least one candidate");
  std::vector<MarkovRule> rescored(candidates.begin(), candidates.end());
  for (auto& r : rescored) {
    r.confidence = rule_confidence(r.head, r.tail, counts);
    r.support = r.confidence.num();
  }
  const auto best = std::min_element(rescored.begin(), rescored.end(), rule_precedes) - rescored.begin();
  return candidates[static_cast<std::size_t>(best)];
}

// --- PrefetchAgent ----------------------------------------------------------

PrefetchAgent::PrefetchAgent(const RuleRepository& repo, AgentParams params) : repo_(&repo), params_(params) {
  if (params_.window == 0) throw std::invalid_argument("agent window must be at least 1");
  state_.hints = HintList{params_.hint_capacity};
}

void PrefetchAgent::reset() {
  state_.recent.clear();
  state_.hints.clear();
  state_.active.reset();
}

void PrefetchAgent::add_hint(PageId page, RuleId source, Ratio priority, std::vector<PageId>& added) {
  if (page == current_) return;
  if (state_.hints.add(page, source, priority)) added.push_back(page);
}

// Every page that follows `page` in a rule where `page` is not last.
void PrefetchAgent::schedule_successors(PageId page, std::vector<PageId>& added) {
  for (RuleId id : repo_->scan_containing(page)) {
    const MarkovRule& rule = repo_->rule(id);
    const Sequence seq = rule.sequence();
    const auto first = std::find(seq.begin(), seq.end(), page);
    if (first == seq.end()) continue;
    for (auto it = first + 1; it < seq.end(); ++it) add_hint(*it, id, rule.confidence, added);
  }
}

bool PrefetchAgent::activate_from_window(std::vector<PageId>& added) {
  const Sequence window(state_.recent.begin(), state_.recent.end());
  const auto candidates = repo_->lookup_longest_suffix(window);
  if (candidates.empty()) return false;
  // Candidates come best first, which is the conflict-resolution order.
  const RuleId chosen = candidates.front();
  const MarkovRule& rule = repo_->rule(chosen);
  state_.active = ActiveSequence{chosen, rule.sequence(), rule.head.size() - 1};
  for (PageId p : rule.tail) add_hint(p, chosen, rule.confidence, added);
  for (PageId p : rule.tail) schedule_successors(p, added);
  return true;
}

RequestActions PrefetchAgent::on_request(PageId page, CacheModel& cache) {
  RequestActions actions;
  const AccessResult access = cache.access(page);
  actions.hit = access.hit;
  actions.prefetch_used = access.prefetch_used;
  actions.evicted = access.evicted;

  current_ = page;
  state_.recent.push_back(page);
  while (state_.recent.size() > params_.window) state_.recent.pop_front();
  state_.hints.remove(page);

  std::vector<PageId> added;
  auto& active = state_.active;
  const bool continues = active && active->cursor + 1 < active->pages.size() && active->pages[active->cursor + 1] == page;
  if (continues) {
    actions.transition = Transition::kContinued;
    ++active->cursor;
    const MarkovRule& rule = repo_->rule(active->rule);
    for (std::size_t i = active->cursor + 1; i < active->pages.size(); ++i) {
      add_hint(active->pages[i], active->rule, rule.confidence, added);
    }
    schedule_successors(page, added);
    if (active->cursor + 1 == active->pages.size()) activate_from_window(added);
  } else {
    state_.hints.clear();
    active.reset();
    if (activate_from_window(added)) {
      actions.transition = Transition::kMatched;
    } else {
      actions.transition = Transition::kNoMatch;
      actions.crawl_request = true;
    }
  }

  for (const auto& e : state_.hints.entries()) {
    if (std::find(added.begin(), added.end(), e.page) != added.end()) actions.prefetch.push_back(e.page);
  }
  return actions;
}

}  // namespace webpf
